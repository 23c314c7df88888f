"""Deterministic construction of tight frames with prescribed column norms.

`build_ntf` walks the diagonal of a coordinate projection to the target by
two-index plane rotations (one diagonal entry is pinned exactly per
rotation).  The remaining builders are the explicit block constructions
used by the connectivity certificates: the simplex-shaped matrix, its
identity-augmented equal-norm frame, doubled frames, and the odd-size
bordered frame.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import (
    FrameInvariantViolation,
    HypersimplexViolation,
    NormDeficit,
    RankOutOfRange,
    ShapeMismatch,
)
from .hypersimplex import DiagonalTarget, in_hypersimplex
from .linalg import TOL_FRAME, Frame, ProjectionPoint, factor_projection


def _pin_rotation(a: float, b: float, c: float, t: float):
    """(cos, sin) rotating the 2x2 block [[a,b],[b,c]] so entry (1,1) becomes t.

    Returns None when t is outside the spectrum of the block.
    """
    disc = b * b - (c - t) * (a - t)
    if disc < 0:
        return None
    root = math.sqrt(disc)
    if abs(a - t) <= abs(c - t):
        # solve (c-t) u^2 + 2b u + (a-t) = 0 for u = sin/cos
        if abs(c - t) < 1e-300:
            if abs(b) < 1e-300:
                return (1.0, 0.0) if abs(a - t) < 1e-12 else None
            u = -(a - t) / (2.0 * b)
        else:
            num = -b - root if b > 0 else -b + root
            u = (a - t) / num if abs(num) > 1e-300 else 0.0
        h = math.hypot(1.0, u)
        return 1.0 / h, u / h
    # symmetric form: solve (a-t) v^2 + 2b v + (c-t) = 0 for v = cos/sin
    if abs(a - t) < 1e-300:
        if abs(b) < 1e-300:
            return (0.0, 1.0) if abs(c - t) < 1e-12 else None
        v = -(c - t) / (2.0 * b)
    else:
        num = -b - root if b > 0 else -b + root
        v = (c - t) / num if abs(num) > 1e-300 else 0.0
    h = math.hypot(1.0, v)
    return v / h, 1.0 / h


def build_ntf(t: DiagonalTarget, tol: float = TOL_FRAME):
    """Frame with orthonormal rows and column norms d; deterministic.

    Starting from the coordinate projection, each plane rotation mixes the
    two active diagonal entries straddling the largest remaining target and
    pins that target exactly (the straddle pair keeps the active diagonal
    majorizing the remaining targets, so a feasible pair always exists).
    Columns are permuted at the end to put each pinned norm at its index.
    Returns (frame, rotation_count); rotation_count <= n-1.
    """
    if not in_hypersimplex(t, tol=1e-9):
        raise HypersimplexViolation(f"{t} is not a hypersimplex point")
    n, k = t.n, t.k
    d = t.values
    P = np.zeros((n, n))
    P[np.arange(k), np.arange(k)] = 1.0
    active = list(range(n))            # coordinates still carrying free values
    assign = np.empty(n, dtype=int)    # coordinate -> target index
    targets = sorted(range(n), key=lambda m: (-d[m], m))
    rotations = 0
    for step, m in enumerate(targets):
        tm = d[m]
        if len(active) == 1:
            assign[active[0]] = m
            break
        vals = np.array([P[i, i] for i in active])
        exact = np.flatnonzero(np.abs(vals - tm) <= 0.25 * tol)
        if exact.size:
            i = active[int(exact[0])]
            P[i, i] = tm
            assign[i] = m
            active.remove(i)
            continue
        ge = [idx for idx, v in enumerate(vals) if v > tm]
        lt = [idx for idx, v in enumerate(vals) if v < tm]
        if not ge or not lt:
            raise HypersimplexViolation(
                "active diagonal no longer straddles the target; "
                "input is outside the hypersimplex")
        ia = active[min(ge, key=lambda idx: (vals[idx], idx))]
        ib = active[max(lt, key=lambda idx: (vals[idx], -idx))]
        a, c = P[ia, ia], P[ib, ib]
        cs = _pin_rotation(a, P[ia, ib], c, tm)
        if cs is None:
            raise HypersimplexViolation("straddle rotation infeasible")
        co, si = cs
        gi = co * P[ia, :] + si * P[ib, :]
        gj = -si * P[ia, :] + co * P[ib, :]
        P[ia, :], P[ib, :] = gi, gj
        gi = co * P[:, ia] + si * P[:, ib]
        gj = -si * P[:, ia] + co * P[:, ib]
        P[:, ia], P[:, ib] = gi, gj
        P[ia, ia] = tm                  # pinned exactly
        P[ib, ib] = a + c - tm          # block trace is conserved
        assign[ia] = m
        active.remove(ia)
        rotations += 1
    P = 0.5 * (P + P.T)
    F = factor_projection(ProjectionPoint(P), tol=1e-8)
    # column permutation moves each pinned norm to its target index
    cols = np.empty(n, dtype=int)
    cols[assign] = np.arange(n)
    return Frame(F.entries[:, cols]), rotations


def simplex_frame(k: int) -> Frame:
    """k x (k+1) matrix with unit columns and orthogonal rows of norm^2 (k+1)/k.

    Columns are the vertices of a regular simplex centered at the origin;
    built by recursion on k, the last column pinned to -e_k and the first
    two columns differing only in the sign of the first coordinate.
    """
    if k < 1:
        raise RankOutOfRange("k >= 1 required")
    G = np.array([[1.0, -1.0]])
    for m in range(2, k + 1):
        s = math.sqrt(m * m - 1.0) / m
        top = np.hstack([s * G, np.zeros((m - 1, 1))])
        bottom = np.full((1, m + 1), 1.0 / m)
        bottom[0, -1] = -1.0
        G = np.vstack([top, bottom])
    return Frame(G)   # not row-orthonormal; scaled variant is


def identity_augmented(k: int) -> Frame:
    """sqrt(k/(2k+1)) [ G | I_k ]: an equal-norm frame on 2k+1 columns."""
    if k < 2:
        raise RankOutOfRange("k >= 2 required")
    G = simplex_frame(k).entries
    F = math.sqrt(k / (2 * k + 1)) * np.hstack([G, np.eye(k)])
    return Frame(F)


def doubled_frame(G: Frame, tol: float = 1e-8) -> Frame:
    """(1/sqrt2) [ G | DG ] with D = diag(1,...,1,-1); halves all norms."""
    G.check(tol)
    Gm = G.entries.copy()
    Gm[-1, :] *= -1.0
    return Frame(np.hstack([G.entries, Gm]) / math.sqrt(2.0))


def odd_frame(G_tilde: Frame, t: DiagonalTarget, tol: float = 1e-8) -> Frame:
    """Bordered frame for odd n = 2p+1.

    Top block is (1/sqrt2)[G~ | -G~ | 0]; the bottom row (g, g, sqrt(d_last))
    absorbs the norm surplus g_j^2 = d_j - d'_j/2.  Valid only when both
    the target and the sub-target are genuine hypersimplex points, which is
    exactly what makes the bottom row have unit norm.
    """
    if not in_hypersimplex(t, tol=1e-9):
        raise HypersimplexViolation(f"{t} is not a hypersimplex point")
    G_tilde.check(tol)
    p = G_tilde.n
    km1 = G_tilde.k
    if t.n != 2 * p + 1 or t.k != km1 + 1:
        raise ShapeMismatch(
            f"target (n={t.n}, k={t.k}) incompatible with sub-frame ({km1} x {p})")
    d = t.values
    if np.max(np.abs(d[:p] - d[p:2 * p])) > 1e-9:
        raise ShapeMismatch("target is not of the form (d_1..d_p, d_1..d_p, d_last)")
    d_prime = (G_tilde.entries ** 2).sum(axis=0)
    surplus = d[:p] - 0.5 * d_prime
    if np.min(surplus) < -tol:
        j = int(np.argmin(surplus))
        raise NormDeficit(f"d_{j} = {d[j]:.6g} < d'_{j}/2 = {0.5 * d_prime[j]:.6g}")
    g = np.sqrt(np.clip(surplus, 0.0, None))
    last = math.sqrt(max(d[-1], 0.0))
    top = np.hstack([G_tilde.entries, -G_tilde.entries, np.zeros((km1, 1))]) / math.sqrt(2.0)
    bottom = np.concatenate([g, g, [last]])[None, :]
    F = Frame(np.vstack([top, bottom]))
    return F.check(tol)
