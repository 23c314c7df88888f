"""Paths inside the frame variety and connectivity certificates.

A certificate for a target d is a verified discrete path from a frame F to
D·F where D is orthogonal with det D = -1.  Together with the transitive
SO(k)-action on each component this proves the frame space connected.  The
constructors below realize the constructive ingredients: column switches
through block rotations, the doubled-frame induction, the bordered odd-size
induction, the explicit equal-norm base path, the orthonormal-complement
duality transfer, and a bisection-based numerical fallback.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np
import scipy.linalg

from .builder import build_ntf, doubled_frame, identity_augmented, odd_frame, simplex_frame
from .errors import (
    BlockNotNTF,
    CompletionDiscontinuity,
    DetSignUnexpected,
    EndpointInvalid,
    HeadNormMismatch,
    HypothesisViolation,
    NotSpecialOrthogonal,
    PartitionInvalid,
    PathSearchFailure,
    PatternMismatch,
    RankOutOfRange,
    SubcertificateInvalid,
)
from .hypersimplex import DiagonalTarget, dual_target, satisfies_hypothesis
from .linalg import Frame, orthonormalize_rows

STEP_MAX = 0.1
TOL_PATH = 1e-8
MIN_SAMPLES = 64


# -- one-parameter rotation families -------------------------------------------

def _planar_form(A: np.ndarray, tol: float = 1e-10):
    """Decompose special orthogonal A as Q·blockdiag(rot(θ_i), I)·Qᵗ.

    Returns (Q, planes, angles) with planes a list of column-index pairs.
    """
    k = A.shape[0]
    if np.linalg.norm(A @ A.T - np.eye(k)) > 1e-8 or np.linalg.det(A) < 0:
        raise NotSpecialOrthogonal("input is not in SO(k)")
    T, Q = scipy.linalg.schur(A, output="real")
    planes, angles, minus = [], [], []
    i = 0
    while i < k:
        if i + 1 < k and abs(T[i + 1, i]) > tol:
            planes.append((i, i + 1))
            angles.append(math.atan2(T[i + 1, i], T[i, i]))
            i += 2
        else:
            if T[i, i] < 0:
                minus.append(i)
            i += 1
    if len(minus) % 2:
        raise NotSpecialOrthogonal("odd number of -1 eigenvalues (det = -1)")
    for a, b in zip(minus[::2], minus[1::2]):
        planes.append((a, b))
        angles.append(math.pi)
    return Q, planes, angles


def so_k_path(A: np.ndarray) -> Callable[[float], np.ndarray]:
    """R: [0,1] -> SO(k) with R(0) = I, R(1) = A, by angle interpolation."""
    Q, planes, angles = _planar_form(np.asarray(A, dtype=float))
    k = A.shape[0]

    def R(t: float) -> np.ndarray:
        B = np.eye(k)
        for (i, j), th in zip(planes, angles):
            c, s = math.cos(t * th), math.sin(t * th)
            B[i, i] = B[j, j] = c
            B[j, i], B[i, j] = s, -s
        return Q @ B @ Q.T

    return R


def rotation_to(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """A in SO(k) with A·u = v, for equal-norm u, v; planar in span{u, v}."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    k = len(u)
    nu = np.linalg.norm(u)
    if nu < 1e-14:
        return np.eye(k)
    a = u / nu
    b = v / nu
    c = float(a @ b)
    w = b - c * a
    s = np.linalg.norm(w)
    if s < 1e-12:
        if c > 0:
            return np.eye(k)
        # antipodal: rotate by pi in a plane containing a
        e = np.zeros(k)
        e[int(np.argmin(np.abs(a)))] = 1.0
        e -= (a @ e) * a
        e /= np.linalg.norm(e)
        return np.eye(k) - 2.0 * np.outer(a, a) - 2.0 * np.outer(e, e)
    w /= s
    A = np.eye(k)
    A += (c - 1.0) * (np.outer(a, a) + np.outer(w, w))
    A += s * (np.outer(w, a) - np.outer(a, w))
    return A


# -- segments ------------------------------------------------------------------

@dataclass
class BlockRotation:
    """Left-rotate the columns in `cols` by the family joining I to `rotation`.

    Valid when the partial Gram of those columns is a multiple of I_k, so
    the rotation preserves FFᵗ and all column norms.
    """

    cols: tuple
    rotation: np.ndarray
    kind: str = "BlockRotation"

    def sample(self, start: np.ndarray, samples: int) -> List[np.ndarray]:
        R = so_k_path(self.rotation)
        cols = list(self.cols)
        out = []
        for t in np.linspace(0.0, 1.0, samples):
            F = start.copy()
            F[:, cols] = R(t) @ start[:, cols]
            out.append(F)
        return out

    def descriptor(self) -> dict:
        return {"kind": self.kind, "columns": list(self.cols),
                "rotation": self.rotation.tolist()}


@dataclass
class Step1Rotation:
    """The explicit two-column family for the equal-norm base case n = 2k+1.

    Columns k and k+1 (0-based) sweep t in [π/2, π]:
    col_k(t) = s·(cos t, 0, …, 0, -sin t), col_{k+1}(t) = s·(sin t, 0, …, 0, cos t).
    """

    k: int
    kind: str = "Step1Rotation"

    def sample(self, start: np.ndarray, samples: int) -> List[np.ndarray]:
        k = self.k
        s = math.sqrt(k / (2 * k + 1))
        out = []
        for t in np.linspace(0.5 * math.pi, math.pi, samples):
            F = start.copy()
            ca, sa = math.cos(t), math.sin(t)
            F[:, k] = 0.0
            F[0, k], F[k - 1, k] = s * ca, -s * sa
            F[:, k + 1] = 0.0
            F[0, k + 1], F[k - 1, k + 1] = s * sa, s * ca
            out.append(F)
        return out

    def descriptor(self) -> dict:
        return {"kind": self.kind, "k": self.k,
                "t": [0.5 * math.pi, math.pi]}


@dataclass
class GridSegment:
    """Explicitly sampled piece of a path (numerical search, lifts)."""

    grid: List[np.ndarray]
    kind: str = "Reparametrized"

    def sample(self, start: np.ndarray, samples: int) -> List[np.ndarray]:
        return [g.copy() for g in self.grid]

    def descriptor(self) -> dict:
        return {"kind": self.kind, "samples": len(self.grid)}


# -- paths ---------------------------------------------------------------------

@dataclass
class FramePath:
    """A discrete path in F^d: segment list plus the sampled witness grid."""

    d: DiagonalTarget
    segments: list
    grid: List[np.ndarray]

    @property
    def start(self) -> Frame:
        return Frame(self.grid[0])

    @property
    def end(self) -> Frame:
        return Frame(self.grid[-1])


def compose_path(d: DiagonalTarget, start: np.ndarray, segments: list,
                 step_max: float = STEP_MAX) -> FramePath:
    """Sample each segment adaptively (≥ 64 points, steps ≤ step_max)."""
    grid = [np.array(start, dtype=float)]
    for seg in segments:
        samples = MIN_SAMPLES
        for _ in range(8):
            pts = seg.sample(grid[-1], samples)
            steps = [float(np.linalg.norm(a - b)) for a, b in zip(pts, pts[1:])]
            if not steps or max(steps) <= step_max:
                break
            samples *= 2
        if np.linalg.norm(pts[0] - grid[-1]) > 1e-6:
            raise EndpointInvalid("segment does not start at the current frame")
        grid.extend(pts[1:])
    return FramePath(d=d, segments=list(segments), grid=grid)


@dataclass
class VerificationReport:
    passed: bool
    max_frame_residual: float
    max_norm_residual: float
    max_step: float
    start_residual: float
    end_residual: float
    grid_size: int
    failure_index: Optional[int] = None

    def to_json(self) -> dict:
        return {"passed": self.passed,
                "max_frame_residual": self.max_frame_residual,
                "max_norm_residual": self.max_norm_residual,
                "max_step": self.max_step,
                "start_residual": self.start_residual,
                "end_residual": self.end_residual,
                "grid_size": self.grid_size,
                "failure_index": self.failure_index}


def verify_path(path: FramePath, tol: float = TOL_PATH,
                step_max: float = STEP_MAX,
                start: Optional[np.ndarray] = None,
                end: Optional[np.ndarray] = None) -> VerificationReport:
    """Check every grid frame, the step sizes, and (optionally) endpoints."""
    d = path.d.values
    k = path.d.k
    worst_frame = worst_norm = 0.0
    bad = None
    for idx, F in enumerate(path.grid):
        rf = np.linalg.norm(F @ F.T - np.eye(k))
        rn = np.max(np.abs((F ** 2).sum(axis=0) - d))
        if max(rf, rn) > tol and bad is None:
            bad = idx
        worst_frame = max(worst_frame, rf)
        worst_norm = max(worst_norm, rn)
    steps = [float(np.linalg.norm(a - b))
             for a, b in zip(path.grid, path.grid[1:])]
    max_step = max(steps) if steps else 0.0
    r0 = 0.0 if start is None else float(np.linalg.norm(path.grid[0] - start))
    r1 = 0.0 if end is None else float(np.linalg.norm(path.grid[-1] - end))
    passed = (bad is None and max_step <= step_max
              and r0 <= tol and r1 <= tol)
    return VerificationReport(passed=passed, max_frame_residual=worst_frame,
                              max_norm_residual=worst_norm, max_step=max_step,
                              start_residual=r0, end_residual=r1,
                              grid_size=len(path.grid), failure_index=bad)


# -- certificates --------------------------------------------------------------

@dataclass
class ConnectivityCertificate:
    """Verified path from F to D·F with det D = -1."""

    d: DiagonalTarget
    F: Frame
    D: np.ndarray
    path: FramePath
    report: VerificationReport = field(default=None)

    def __post_init__(self):
        if abs(np.linalg.det(self.D) + 1.0) > 1e-10:
            raise DetSignUnexpected(f"det D = {np.linalg.det(self.D):.6f}, expected -1")
        if self.report is None:
            self.report = verify_path(self.path, start=self.F.entries,
                                      end=self.D @ self.F.entries)

    @property
    def k(self) -> int:
        return self.d.k

    def to_json(self, include_grid: bool = True) -> dict:
        obj = {"d": list(self.d.d), "k": self.d.k,
               "frame": self.F.to_json(), "D": self.D.tolist(),
               "segments": [s.descriptor() for s in self.path.segments],
               "report": self.report.to_json()}
        if include_grid:
            obj["grid"] = [g.tolist() for g in self.path.grid]
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "ConnectivityCertificate":
        d = DiagonalTarget(n=len(obj["d"]), k=int(obj["k"]), d=tuple(obj["d"]))
        grid = [np.asarray(g, dtype=float) for g in obj["grid"]]
        path = FramePath(d=d, segments=[GridSegment(grid)], grid=grid)
        return cls(d=d, F=Frame.from_json(obj["frame"]),
                   D=np.asarray(obj["D"], dtype=float), path=path)


def _checked(cert: ConnectivityCertificate) -> ConnectivityCertificate:
    if not cert.report.passed:
        raise EndpointInvalid(f"constructed path failed verification: {cert.report}")
    return cert


def _permute_certificate(cert: ConnectivityCertificate,
                         perm: np.ndarray) -> ConnectivityCertificate:
    """Move column i of the certificate to position perm[i] everywhere."""
    n = cert.d.n
    perm = np.asarray(perm, dtype=int)
    inv = np.empty(n, dtype=int)
    inv[perm] = np.arange(n)
    d_new = DiagonalTarget(n=n, k=cert.d.k,
                           d=tuple(cert.d.values[inv]))
    grid = [g[:, inv] for g in cert.path.grid]
    path = FramePath(d=d_new, segments=[GridSegment(grid)], grid=grid)
    return _checked(ConnectivityCertificate(
        d=d_new, F=Frame(cert.F.entries[:, inv]), D=cert.D, path=path))


# -- the column-switch construction --------------------------------------------

def _check_block(F: np.ndarray, cols, scale2: float, tol: float):
    B = F[:, list(cols)]
    dev = np.linalg.norm(B @ B.T - scale2 * np.eye(F.shape[0]))
    if dev > max(tol, 1e-8):
        raise BlockNotNTF(f"partial Gram deviates from {scale2:.4g}·I by {dev:.3e}")


def switch_path(F: Frame, partI: list, partJ: list, alpha: float, beta: float,
                tol: float = TOL_PATH) -> FramePath:
    """Path interchanging the head columns of partI and partJ.

    Both parts must be scaled tight sub-frames (partial Gram α²I and β²I with
    α²+β² = 1) and the heads must have equal norms.  Two block rotations: the
    first carries the partI head onto the partJ head, the second (acting on
    the partJ head together with the tail of partI) undoes the motion of the
    tail and drops the old partI head at the partJ head's slot.
    """
    n = F.n
    if sorted(list(partI) + list(partJ)) != list(range(n)):
        raise PartitionInvalid("partI and partJ must partition the column set")
    if abs(alpha ** 2 + beta ** 2 - 1.0) > 1e-9:
        raise PartitionInvalid(f"alpha^2 + beta^2 = {alpha**2 + beta**2:.6g} != 1")
    E = F.entries
    _check_block(E, partI, alpha ** 2, tol)
    _check_block(E, partJ, beta ** 2, tol)
    i1, j1 = partI[0], partJ[0]
    ni, nj = np.linalg.norm(E[:, i1]), np.linalg.norm(E[:, j1])
    if abs(ni - nj) > 1e-8:
        raise HeadNormMismatch(f"head norms {ni:.6g} != {nj:.6g}")
    A = rotation_to(E[:, i1], E[:, j1])
    seg1 = BlockRotation(cols=tuple(partI), rotation=A)
    seg2 = BlockRotation(cols=tuple([j1] + list(partI[1:])), rotation=A.T)
    d = DiagonalTarget(n=n, k=F.k, d=tuple((E ** 2).sum(axis=0)))
    return compose_path(d, E, [seg1, seg2])


# -- certificate constructors --------------------------------------------------

def _pair_permutation(d: np.ndarray, odd_last: bool, tol: float = 1e-9):
    """Permutation putting d into (h_1..h_p, h_1..h_p[, leftover]) order.

    Entries are matched into equal-value pairs (descending); with odd_last a
    single unpaired entry is allowed and placed last.  Returns (perm, halves)
    or None when no such arrangement exists.
    """
    n = len(d)
    order = sorted(range(n), key=lambda i: (-d[i], i))
    firsts, seconds, leftover = [], [], []
    i = 0
    while i < len(order):
        if i + 1 < len(order) and abs(d[order[i]] - d[order[i + 1]]) <= tol:
            firsts.append(order[i])
            seconds.append(order[i + 1])
            i += 2
        elif odd_last and not leftover:
            leftover.append(order[i])
            i += 1
        else:
            return None
    if odd_last and not leftover:
        return None
    perm_order = np.asarray(firsts + seconds + leftover, dtype=int)
    halves = d[np.asarray(firsts, dtype=int)] if firsts else np.array([])
    return perm_order, halves


def certify_prop_first(t: DiagonalTarget, tol: float = 1e-9) -> ConnectivityCertificate:
    """Certificate for doubled targets (d_1..d_p, d_1..d_p) with all d_i ≤ 1/2, p ≥ k.

    Builds the doubled frame (1/√2)[G | DG] over G = build_ntf(2d_1..2d_p)
    and switches the paired columns r ↔ p+r one at a time; the concatenation
    joins F with D·F, D = diag(1,…,1,-1).
    """
    n, k = t.n, t.k
    if n % 2:
        raise PatternMismatch("doubled pattern requires even n")
    if not satisfies_hypothesis(t):
        raise HypothesisViolation("target fails the subset-sum hypothesis")
    match = _pair_permutation(t.values, odd_last=False, tol=tol)
    if match is None:
        raise PatternMismatch("entries do not pair up into a doubled target")
    perm_order, halves = match
    p = n // 2
    if p < k:
        raise PatternMismatch(f"p = {p} < k = {k}")
    if np.max(halves) > 0.5 + tol:
        raise PatternMismatch(f"max entry {np.max(halves):.6g} > 1/2")
    G, _ = build_ntf(DiagonalTarget(n=p, k=k, d=tuple(np.minimum(2.0 * halves, 1.0))))
    F0 = doubled_frame(G)
    d_c = DiagonalTarget(n=n, k=k, d=tuple((F0.entries ** 2).sum(axis=0)))
    cur = F0.entries
    segments, grid = [], [cur.copy()]
    a = 1.0 / math.sqrt(2.0)
    for r in range(p):
        partI = list(range(r, p)) + list(range(p, p + r))
        partJ = list(range(p + r, 2 * p)) + list(range(0, r))
        piece = switch_path(Frame(cur), partI, partJ, a, a)
        segments.extend(piece.segments)
        grid.extend(g.copy() for g in piece.grid[1:])
        cur = piece.grid[-1]
    D = np.eye(k)
    D[-1, -1] = -1.0
    path = FramePath(d=d_c, segments=segments, grid=grid)
    cert = _checked(ConnectivityCertificate(d=d_c, F=F0, D=D, path=path))
    # canonical column i is the caller's column perm_order[i]
    return _permute_certificate(cert, np.asarray(perm_order))


def certify_prop_second(t: DiagonalTarget, t_sub: DiagonalTarget,
                        subcert: ConnectivityCertificate,
                        tol: float = 1e-8) -> ConnectivityCertificate:
    """Certificate for odd targets (d_1..d_p, d_1..d_p, d_{2p+1}) from a rank
    k-1 certificate for d' on p columns with d_i ≥ d'_i/2.

    The path first rotates the whole frame by D' = blockdiag(subcert.D, -1)
    in SO(k), then replays the sub-certificate path backwards in the top k-1
    rows over both column blocks; the bottom row's signs cancel and the
    endpoint is diag(1,…,1,-1)·F.
    """
    k = t.k
    p = t_sub.n
    if k < 3:
        raise RankOutOfRange("rank k >= 3 required (the k = 2 sub-problem has no"
                             " connected rank-one frame space)")
    if t.n != 2 * p + 1 or t_sub.k != k - 1:
        raise PatternMismatch(f"shapes (n={t.n}, k={k}) vs sub ({t_sub.n}, {t_sub.k})")
    if np.max(np.abs(subcert.d.values - t_sub.values)) > 1e-8:
        raise SubcertificateInvalid("sub-certificate norms do not match d'")
    if not subcert.report.passed:
        raise SubcertificateInvalid("sub-certificate fails verification")
    F = odd_frame(subcert.F, t)            # raises NormDeficit / PatternMismatch
    Dp = scipy.linalg.block_diag(subcert.D, np.array([[-1.0]]))
    seg1 = BlockRotation(cols=tuple(range(t.n)), rotation=Dp)
    bottom = (-F.entries[-1:, :]).copy()
    lifted = []
    for g in reversed(subcert.path.grid):
        top = np.hstack([g, -g, np.zeros((k - 1, 1))]) / math.sqrt(2.0)
        lifted.append(np.vstack([top, bottom]))
    seg2 = GridSegment(lifted)
    path = compose_path(t, F.entries, [seg1, seg2])
    D = np.eye(k)
    D[-1, -1] = -1.0
    return _checked(ConnectivityCertificate(d=t, F=F, D=D, path=path))


def step1_path(k: int) -> ConnectivityCertificate:
    """Certificate for the equal-norm target (k/(2k+1))^{2k+1}.

    Four column switches around the explicit two-column rotation family join
    F = √(k/(2k+1))[G | I_k] with A·F, A = diag(-1,1,…,1).
    """
    if k < 2:
        raise RankOutOfRange("k >= 2 required")
    n = 2 * k + 1
    F0 = identity_augmented(k)
    d = DiagonalTarget(n=n, k=k, d=(k / n,) * n)
    alpha = math.sqrt((k + 1) / n)
    beta = math.sqrt(k / n)
    cur = F0.entries
    segments, grid = [], [cur.copy()]

    def do_switch(partI, partJ):
        nonlocal cur
        piece = switch_path(Frame(cur), partI, partJ, alpha, beta)
        segments.extend(piece.segments)
        grid.extend(g.copy() for g in piece.grid[1:])
        cur = piece.grid[-1]

    gcols = list(range(k + 1))
    icols = list(range(k + 1, n))
    do_switch(gcols, icols)                                    # 0 <-> k+1
    do_switch([1] + gcols[2:] + [k + 1], [0] + icols[1:])      # 1 <-> 0
    do_switch([k + 1] + [0] + gcols[2:], [1] + icols[1:])      # 1 <-> k+1
    seg = Step1Rotation(k=k)
    piece = compose_path(d, cur, [seg])
    segments.append(seg)
    grid.extend(g.copy() for g in piece.grid[1:])
    cur = piece.grid[-1]
    do_switch([k + 1] + list(range(k)), [k] + icols[1:])       # k+1 <-> k
    D = np.eye(k)
    D[0, 0] = -1.0
    path = FramePath(d=d, segments=segments, grid=grid)
    return _checked(ConnectivityCertificate(d=d, F=F0, D=D, path=path))


# -- duality -------------------------------------------------------------------

def _refine_grid(grid: List[np.ndarray], d: DiagonalTarget,
                 step_max: float) -> List[np.ndarray]:
    out = [grid[0]]
    for b in grid[1:]:
        a = out[-1]
        gap = np.linalg.norm(b - a)
        if gap > step_max:
            m = int(math.ceil(gap / step_max))
            for j in range(1, m):
                mid = _project_to_fiber(a + (j / m) * (b - a), d)
                if mid is not None:
                    out.append(mid)
        out.append(b)
    return out


def duality_lift(cert: ConnectivityCertificate, refine: bool = True,
                 step_max: float = STEP_MAX) -> ConnectivityCertificate:
    """Certificate for (1-d, n-k) by continuous orthonormal completion.

    Each grid frame γ is completed to an orthogonal matrix [γ; δ]; δ is kept
    continuous by projecting the previous completion onto the new complement
    and re-orthonormalizing.  The endpoint relation δ_N = B·δ_0 has det B = -1.
    """
    d2 = dual_target(cert.d)
    n = cert.d.n
    grid = cert.path.grid
    if refine:
        grid = _refine_grid(grid, cert.d, 0.4 * step_max)
    g0 = grid[0]
    ns = scipy.linalg.null_space(g0)
    delta = ns.T
    deltas = [delta]
    for g in grid[1:]:
        proj = deltas[-1] - (deltas[-1] @ g.T) @ g
        delta = orthonormalize_rows(proj)
        step = np.linalg.norm(delta - deltas[-1])
        if step > step_max:
            raise CompletionDiscontinuity(
                f"completion jumped by {step:.3g} > {step_max}; refine the grid")
        deltas.append(delta)
    B = deltas[-1] @ deltas[0].T
    detB = np.linalg.det(B)
    if detB > 0:
        raise DetSignUnexpected(f"det B = {detB:.6f}, expected -1")
    # snap the endpoint exactly onto B·δ_0
    deltas[-1] = orthonormalize_rows(B) @ deltas[0]
    path = FramePath(d=d2, segments=[GridSegment(deltas)], grid=deltas)
    return _checked(ConnectivityCertificate(
        d=d2, F=Frame(deltas[0]), D=orthonormalize_rows(B), path=path))


# -- reduction sequence --------------------------------------------------------

def reduction_sequence(n: int, k: int) -> List[tuple]:
    """The induction chain for equal-norm targets with odd n > 2k+1."""
    if not (2 <= k <= n - 2):
        raise RankOutOfRange(f"need 2 <= k <= n-2, got ({n}, {k})")
    seq = [(n, k)]
    while True:
        ni, ki = seq[-1]
        if ni % 2 == 0 or ni == 2 * ki + 1 or ki == 2 or ni < 2 * ki + 1:
            return seq
        nn = (ni - 1) // 2
        kp = ki - 1
        seq.append((nn, kp if ni >= 4 * ki - 1 else nn - kp))


# -- numerical fallback --------------------------------------------------------

def _project_to_fiber(M: np.ndarray, d: DiagonalTarget,
                      iters: int = 400, tol: float = 1e-12) -> Optional[np.ndarray]:
    """Alternate row orthonormalization and column rescaling to land in F^d."""
    sq = np.sqrt(np.clip(d.values, 0.0, None))
    k = d.k
    F = np.array(M, dtype=float)
    for _ in range(iters):
        F = orthonormalize_rows(F)
        norms = np.sqrt((F ** 2).sum(axis=0))
        scale = np.where(norms > 1e-13, sq / np.maximum(norms, 1e-13), 0.0)
        F = F * scale
        rf = np.linalg.norm(F @ F.T - np.eye(k))
        rn = np.max(np.abs((F ** 2).sum(axis=0) - d.values))
        if rf <= tol and rn <= tol:
            return F
    return None


def _k2_angle_path(F0: np.ndarray, F1: np.ndarray, d: DiagonalTarget,
                   step_max: float = STEP_MAX) -> Optional[List[np.ndarray]]:
    """Rank-2 continuation in angle coordinates.

    Columns are z_j = sqrt(d_j)·exp(iφ_j); the frame conditions reduce to the
    closure constraint Σ d_j exp(2iφ_j) = 0, a 2-equation system that Newton
    projection handles far more robustly than Stiefel bisection.  Returns a
    frame grid or None.
    """
    dv = d.values
    live = dv > 1e-13
    w = dv[live]
    z0 = F0[0, live] + 1j * F0[1, live]
    z1 = F1[0, live] + 1j * F1[1, live]
    phi0 = np.angle(z0)
    phi1 = np.angle(z1)
    phi1 = phi1 + 2.0 * math.pi * np.round((phi0 - phi1) / (2.0 * math.pi))

    def project(phi):
        phi = phi.copy()
        for _ in range(60):
            e = np.exp(2j * phi)
            g = np.array([np.real(w @ e), np.imag(w @ e)])
            if np.linalg.norm(g) <= 1e-14:
                return phi
            J = np.vstack([-2.0 * w * np.sin(2 * phi),
                           2.0 * w * np.cos(2 * phi)])
            JJt = J @ J.T
            if np.linalg.cond(JJt) > 1e10:
                return None
            phi = phi - J.T @ np.linalg.solve(JJt, g)
        return None

    def to_frame(phi):
        F = np.zeros_like(F0)
        z = np.sqrt(w) * np.exp(1j * phi)
        F[0, live], F[1, live] = np.real(z), np.imag(z)
        return F

    rng = np.random.default_rng(7)
    for trial in range(12):
        # a straight homotopy between conjugate angle vectors passes through
        # an exactly collinear (singular) configuration; the bump term bends
        # the reference path around it while keeping the endpoints fixed
        eta = rng.uniform(-1.6, 1.6, len(w)) if trial else np.zeros(len(w))

        def ref(t: float) -> np.ndarray:
            return (1 - t) * phi0 + t * phi1 + math.sin(math.pi * t) * eta

        pts = {0.0: phi0, 1.0: phi1}
        stack = [(0.0, 1.0)]
        budget = 6000
        ok = True
        while stack and ok:
            a, b = stack.pop()
            fa, fb = to_frame(pts[a]), to_frame(pts[b])
            if np.linalg.norm(fa - fb) <= 0.9 * step_max:
                continue
            if b - a < 1e-6 or budget <= 0:
                ok = False
                break
            m = 0.5 * (a + b)
            budget -= 1
            pm = project(ref(m))
            if pm is None:
                ok = False
                break
            pts[m] = pm
            stack.extend([(a, m), (m, b)])
        if not ok:
            continue
        ts = sorted(pts)
        grid = [F0] + [to_frame(pts[t]) for t in ts[1:-1]] + [F1]
        steps = [np.linalg.norm(x - y) for x, y in zip(grid, grid[1:])]
        if steps and max(steps) > step_max:
            continue
        return grid
    return None


def numerical_path_search(F0: Frame, F1: Frame, d: DiagonalTarget,
                          budget: int = 40000, seed: int = 0,
                          step_max: float = STEP_MAX,
                          tol: float = TOL_PATH) -> FramePath:
    """Bisection homotopy between two frames in F^d.

    Midpoints of the linear interpolation are projected back to the fiber;
    segments still longer than step_max are split recursively, with seeded
    jitter retries where the projection stalls.  Exhausting the budget raises
    PathSearchFailure (inconclusive, never a disconnectedness proof).
    """
    for F in (F0, F1):
        if F.residual() > 1e-8 or \
           np.max(np.abs((F.entries ** 2).sum(axis=0) - d.values)) > 1e-6:
            raise EndpointInvalid("endpoint is not in the frame space of d")
    if d.k == 2:
        grid = _k2_angle_path(F0.entries, F1.entries, d, step_max=step_max)
        if grid is not None:
            path = FramePath(d=d, segments=[GridSegment(grid)], grid=grid)
            report = verify_path(path, tol=tol, step_max=step_max)
            if report.passed:
                return path
    rng = np.random.default_rng(seed)
    counter = {"calls": 0}

    def mid(a: np.ndarray, b: np.ndarray) -> Optional[np.ndarray]:
        for attempt in range(6):
            counter["calls"] += 1
            if counter["calls"] > budget:
                raise PathSearchFailure("projection budget exhausted")
            seed_pt = 0.5 * (a + b)
            if attempt:
                seed_pt = seed_pt + 0.3 * attempt * rng.standard_normal(a.shape)
            m = _project_to_fiber(seed_pt, d)
            if m is not None:
                return m
        return None

    def join(a: np.ndarray, b: np.ndarray, depth: int) -> List[np.ndarray]:
        if np.linalg.norm(a - b) <= 0.9 * step_max:
            return [b]
        if depth > 26:
            raise PathSearchFailure("bisection depth exhausted")
        m = mid(a, b)
        if m is None:
            raise PathSearchFailure("midpoint projection failed")
        if min(np.linalg.norm(m - a), np.linalg.norm(m - b)) < 1e-9 and \
           np.linalg.norm(a - b) > step_max:
            raise PathSearchFailure("bisection is not contracting")
        return join(a, m, depth + 1) + join(m, b, depth + 1)

    def attempt(waypoints: List[np.ndarray]) -> List[np.ndarray]:
        chain = [F0.entries]
        stops = waypoints + [F1.entries]
        for stop in stops:
            chain.extend(join(chain[-1], stop, 0))
        return chain

    grid = None
    last_err = None
    for trial in range(6):
        ways = []
        for _ in range(trial):
            w = _project_to_fiber(rng.standard_normal(F0.entries.shape), d)
            if w is not None:
                ways.append(w)
        try:
            grid = attempt(ways)
            break
        except PathSearchFailure as err:
            last_err = err
    if grid is None:
        raise last_err
    grid[-1] = F1.entries
    path = FramePath(d=d, segments=[GridSegment(grid)], grid=grid)
    report = verify_path(path, tol=tol, step_max=step_max)
    if not report.passed:
        raise PathSearchFailure(f"search produced an invalid path: {report}")
    return path


def _generic_k2_frame(t: DiagonalTarget, seed: int = 0) -> Optional[Frame]:
    """A rank-2 frame in F^d away from the collinear angle-space singularity."""
    w = t.values
    rng = np.random.default_rng(seed + 1)
    for _ in range(24):
        phi = rng.uniform(0.0, 2.0 * math.pi, t.n)
        for _ in range(80):
            e = np.exp(2j * phi)
            g = np.array([np.real(w @ e), np.imag(w @ e)])
            if np.linalg.norm(g) <= 1e-15:
                break
            J = np.vstack([-2.0 * w * np.sin(2 * phi),
                           2.0 * w * np.cos(2 * phi)])
            JJt = J @ J.T
            if np.linalg.cond(JJt) > 1e8:
                break
            phi = phi - J.T @ np.linalg.solve(JJt, g)
        else:
            continue
        e = np.exp(2j * phi)
        if np.linalg.norm([np.real(w @ e), np.imag(w @ e)]) > 1e-15:
            continue
        sin2 = np.abs(np.sin(2 * phi))
        if w[w > 1e-13].size and np.max(sin2[w > 1e-13]) < 1e-3:
            continue
        z = np.sqrt(np.clip(w, 0.0, None)) * np.exp(1j * phi)
        return Frame(np.vstack([np.real(z), np.imag(z)]))
    return None


def _numeric_certificate(t: DiagonalTarget, seed: int = 0,
                         budget: int = 40000) -> ConnectivityCertificate:
    """Numerical certificate: search a path from F to some R·D·F with R in
    SO(k), then rotate back to D·F along the SO(k) family.

    For k = 2 the anchor frame is a generic fiber point (angle-space Newton
    solve) rather than the builder output, whose axis-aligned columns sit on
    the singular collinear locus of the angle parameterization.
    """
    k = t.k
    F = None
    if k == 2:
        F = _generic_k2_frame(t, seed)
    if F is None:
        F, _ = build_ntf(t)
    D = np.eye(k)
    D[-1, -1] = -1.0
    target = D @ F.entries
    last_err = None
    for j in range(8):
        theta = math.pi * j / 4.0
        R = np.eye(k)
        R[0, 0] = R[1, 1] = math.cos(theta)
        R[1, 0], R[0, 1] = math.sin(theta), -math.sin(theta)
        try:
            leg = numerical_path_search(F, Frame(R @ target), t,
                                        budget=budget // 4, seed=seed + j)
        except PathSearchFailure as err:
            last_err = err
            continue
        segments = list(leg.segments)
        grid = [g.copy() for g in leg.grid]
        if theta:
            back = BlockRotation(cols=tuple(range(t.n)), rotation=R.T)
            tail = compose_path(t, grid[-1], [back])
            segments.append(back)
            grid.extend(g.copy() for g in tail.grid[1:])
        path = FramePath(d=t, segments=segments, grid=grid)
        return _checked(ConnectivityCertificate(d=t, F=F, D=D, path=path))
    raise last_err


# -- the equal-norm recursion and the general dispatcher -----------------------

def certify_equal_norm(n: int, k: int) -> ConnectivityCertificate:
    """Certificate for the equal-norm target (k/n)^n, 2 ≤ k ≤ n-2."""
    if not (2 <= k <= n - 2):
        raise RankOutOfRange(f"need 2 <= k <= n-2, got ({n}, {k})")
    d = DiagonalTarget(n=n, k=k, d=(k / n,) * n)
    if 2 * k > n:
        return duality_lift(certify_equal_norm(n, n - k))
    if n % 2 == 0:
        return certify_prop_first(d)
    if n == 2 * k + 1:
        return step1_path(k)
    if k == 2:
        return _numeric_certificate(d)
    p = (n - 1) // 2
    kn = (k - 1) if n >= 4 * k - 1 else p - (k - 1)
    sub = certify_equal_norm(p, kn)
    if kn != k - 1:
        sub = duality_lift(sub)
    t_sub = DiagonalTarget(n=p, k=k - 1, d=((k - 1) / p,) * p)
    return certify_prop_second(d, t_sub, sub)


def certify_target(t: DiagonalTarget, seed: int = 0,
                   budget: int = 40000, _depth: int = 0) -> ConnectivityCertificate:
    """Produce a connectivity certificate for d by whichever rule applies.

    Tries, in order: the equal-norm recursion, the doubled-target switch
    construction, the odd bordered induction with an equal-norm
    sub-certificate, duality, and (k = 2) the numerical fallback.
    """
    n, k = t.n, t.k
    d = t.values
    if not satisfies_hypothesis(t):
        raise HypothesisViolation("target fails the subset-sum hypothesis")
    if np.allclose(d, k / n, atol=1e-12) and 2 <= k <= n - 2:
        return certify_equal_norm(n, k)
    if n % 2 == 0:
        try:
            return certify_prop_first(t)
        except PatternMismatch:
            pass
    else:
        match = _pair_permutation(d, odd_last=True)
        if match is not None and k >= 3:
            perm_order, halves = match
            p = (n - 1) // 2
            if 2 <= k - 1 <= p - 2:
                d_c = DiagonalTarget(n=n, k=k, d=tuple(d[perm_order]))
                t_sub = DiagonalTarget(n=p, k=k - 1, d=((k - 1) / p,) * p)
                if np.min(d_c.values[:p] - 0.5 * t_sub.values) >= -1e-9:
                    sub = certify_equal_norm(p, k - 1)
                    cert = certify_prop_second(d_c, t_sub, sub)
                    return _permute_certificate(cert, np.asarray(perm_order))
    if _depth == 0:
        try:
            return duality_lift(certify_target(dual_target(t), seed=seed,
                                               budget=budget, _depth=1))
        except (PatternMismatch, RankOutOfRange, PathSearchFailure,
                HypothesisViolation):
            pass
    if k == 2:
        return _numeric_certificate(t, seed=seed, budget=budget)
    raise PatternMismatch("no certificate construction applies to this target")
