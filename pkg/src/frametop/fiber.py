"""Exploring a single fiber of the diagonal map on the Grassmannian.

The fiber over d is the set of rank-k projections with diagonal d.  Points
are found by Riemannian gradient descent of the diagonal mismatch from
random starts; components are estimated by linking nearby samples and
probing the remaining gaps with the numerical path search.  Two special
targets have fully catalogued fibers and serve as exact references.
"""

from __future__ import annotations

from itertools import product
from typing import List, Optional, Tuple

import numpy as np

from .errors import InvalidStart, NoConvergedSamples
from .hypersimplex import DiagonalTarget
from .linalg import Frame, ProjectionPoint, factor_projection, gram, random_frame, retract_projection
from .paths import numerical_path_search, PathSearchFailure

TOL_FIBER = 1e-8
LINK_TOL = 0.05


def fiber_objective(P: ProjectionPoint, d: DiagonalTarget) -> float:
    """Squared euclidean mismatch ||diag(P) - d||^2."""
    return float(np.sum((np.diag(P.entries) - d.values) ** 2))


def fiber_gradient(P: ProjectionPoint, d: DiagonalTarget) -> np.ndarray:
    """Riemannian gradient of the mismatch at P.

    The euclidean gradient E = 2 Diag(diag P - d) is projected onto the
    tangent space of the projection manifold: grad = PE + EP - 2 PEP.
    """
    Pm = P.entries
    e = 2.0 * (np.diag(Pm) - d.values)
    EP = e[:, None] * Pm          # Diag(e) @ P
    PE = Pm * e[None, :]          # P @ Diag(e)
    return PE + EP - 2.0 * (Pm @ EP)


def tangent_project(P: ProjectionPoint, X: np.ndarray) -> np.ndarray:
    """Projection of a symmetric matrix onto the tangent space at P."""
    Pm = P.entries
    S = 0.5 * (X + X.T)
    return Pm @ S + S @ Pm - 2.0 * Pm @ S @ Pm


def descend_to_fiber(P0: ProjectionPoint, d: DiagonalTarget,
                     max_iters: int = 10000,
                     tol: float = TOL_FIBER) -> Optional[ProjectionPoint]:
    """Gradient descent of the diagonal mismatch; None if it fails to converge.

    Steps are retracted back onto the manifold (symmetrize + snap the top-k
    eigenspace); the step size backtracks by halving from 1.  Convergence
    means ||diag(P) - d|| <= tol.
    """
    try:
        P0.check(1e-6)
    except Exception as exc:
        raise InvalidStart(str(exc))
    if P0.n != d.n or P0.k != d.k:
        raise InvalidStart(f"start has (n={P0.n}, k={P0.k}), target ({d.n}, {d.k})")
    P = retract_projection(P0.entries, d.k)
    f = fiber_objective(P, d)
    coarse = max(tol, 1e-4)
    for _ in range(max_iters):
        if f <= tol * tol:
            return P
        if f <= coarse * coarse:
            # descent rate degenerates near vertex-like targets; an
            # alternating-projection polish in the frame picture finishes
            Q = _polish(P, d)
            if Q is not None and fiber_objective(Q, d) <= tol * tol:
                return Q
            coarse = 0.0     # polish unavailable; grind on with descent
        G = fiber_gradient(P, d)
        gnorm2 = float(np.sum(G * G))
        if gnorm2 < 1e-30:
            break   # stalled at a critical point off the fiber
        step = 1.0
        for _ in range(40):
            Q = retract_projection(P.entries - step * G, d.k)
            fq = fiber_objective(Q, d)
            if fq < f - 1e-4 * step * gnorm2:
                break
            step *= 0.5
        else:
            break
        P, f = Q, fq
    return P if f <= tol * tol else None


def _polish(P: ProjectionPoint, d: DiagonalTarget) -> Optional[ProjectionPoint]:
    """Snap a near-fiber projection onto the fiber through its frame factor.

    Gauss-Newton on the frame-level system (row orthonormality + column
    norms); the least-squares step absorbs the O(k) gauge degeneracy and
    still converges when the fiber meets the norm constraints tangentially.
    """
    try:
        F = factor_projection(P, tol=1e-5)
    except Exception:
        return None
    M = F.entries
    k, n = M.shape
    iu = np.triu_indices(k)
    for _ in range(60):
        r = np.concatenate([(M @ M.T - np.eye(k))[iu],
                            (M ** 2).sum(0) - d.values])
        if np.linalg.norm(r) < 1e-14:
            return ProjectionPoint(M.T @ M)
        J = np.zeros((len(r), k * n))
        row = 0
        for a, b in zip(*iu):
            g = np.zeros((k, n))
            g[a] += M[b]
            g[b] += M[a]
            J[row] = g.ravel()
            row += 1
        for j in range(n):
            g = np.zeros((k, n))
            g[:, j] = 2.0 * M[:, j]
            J[row] = g.ravel()
            row += 1
        delta, *_ = np.linalg.lstsq(J, -r, rcond=1e-12)
        M = M + delta.reshape(k, n)
    return None


def count_components(d: DiagonalTarget, num_samples: int = 100, seed: int = 0,
                     link_tol: float = LINK_TOL, path_budget: int = 4000,
                     tol: float = TOL_FIBER,
                     max_iters: int = 10000) -> Tuple[int, List[ProjectionPoint]]:
    """Estimated component count of the fiber over d, with representatives.

    Converged descents from random starts are linked when chordally close;
    the surviving cluster representatives are then probed pairwise with the
    numerical path search.  Raises NoConvergedSamples when no start lands
    on the fiber.
    """
    points: List[ProjectionPoint] = []
    for i in range(num_samples):
        P0 = gram(random_frame(d.n, d.k, (seed, i)))
        P = descend_to_fiber(P0, d, max_iters=max_iters, tol=tol)
        if P is not None:
            points.append(P)
    if not points:
        raise NoConvergedSamples(f"0 of {num_samples} descents converged")
    points.sort(key=lambda P: tuple(np.round(np.ravel(P.entries), 6)))
    parent = list(range(len(points)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            if find(i) == find(j):
                continue
            if np.linalg.norm(points[i].entries - points[j].entries) <= link_tol:
                parent[find(j)] = find(i)
    reps = sorted({find(i) for i in range(len(points))})
    # distance linking done; probe the remaining gaps with actual paths
    merged = True
    while merged and len(reps) > 1:
        merged = False
        for a in range(len(reps)):
            for b in range(a + 1, len(reps)):
                Fa = _aligned_frame(points[reps[a]])
                Fb = _aligned_frame(points[reps[b]], match=Fa)
                try:
                    numerical_path_search(Fa, Fb, d, budget=path_budget,
                                          seed=seed, tol=tol)
                except PathSearchFailure:
                    continue
                parent[find(reps[b])] = find(reps[a])
                reps = sorted({find(i) for i in range(len(points))})
                merged = True
                break
            if merged:
                break
    return len(reps), [points[i] for i in reps]


def _aligned_frame(P: ProjectionPoint, match: Optional[Frame] = None) -> Frame:
    """A frame factoring P, Procrustes-rotated towards `match` if given."""
    F = factor_projection(P, tol=1e-6)
    if match is None:
        return F
    U, _, Vt = np.linalg.svd(match.entries @ F.entries.T)
    return Frame((U @ Vt) @ F.entries)


def exact_fiber_special(d: DiagonalTarget,
                        tol: float = 1e-9) -> Optional[List[ProjectionPoint]]:
    """Complete fiber for the two catalogued targets, None otherwise.

    Supported: permutations of (1,..,1,0,..,0) (a single coordinate
    projection) and of (1, 1/3, 1/3, 1/3) at k = 2 (four isolated planes
    spanned by the axis of the unit entry and a diagonal of the cube).
    """
    dv = d.values
    on = np.abs(dv - 1.0) <= tol
    off = np.abs(dv) <= tol
    if np.all(on | off) and int(on.sum()) == d.k:
        return [ProjectionPoint(np.diag(on.astype(float)))]
    if d.n == 4 and d.k == 2:
        ones = np.flatnonzero(np.abs(dv - 1.0) <= tol)
        thirds = np.flatnonzero(np.abs(dv - 1.0 / 3.0) <= tol)
        if len(ones) == 1 and len(thirds) == 3:
            i0 = int(ones[0])
            out = []
            for s1, s2 in product((1.0, -1.0), repeat=2):
                v = np.zeros(4)
                v[thirds[0]], v[thirds[1]], v[thirds[2]] = 1.0, s1, s2
                v /= np.sqrt(3.0)
                P = np.outer(v, v)
                P[i0, i0] = 1.0
                out.append(ProjectionPoint(P))
            return out
    return None
