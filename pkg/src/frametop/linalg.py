"""Frames, projection matrices, and the maps between the two pictures.

A frame is a k x n matrix with orthonormal rows; its Gram matrix F^t F is a
rank-k orthogonal projection, and the diagonal of that projection is the
vector of squared column norms.  Everything here is dense and desk-scale
(n <= 64).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    FrameInvariantViolation,
    ProjectionInvariantViolation,
    SpectralGapTooSmall,
)
from .hypersimplex import DiagonalTarget

TOL_FRAME = 1e-10       # residual tolerance for matrices we construct
TOL_ACCEPT = 1e-8       # looser tolerance for externally supplied data
TOL_SPEC = 1e-6         # eigenvalue separation from 1/2 required to factor


@dataclass(frozen=True)
class Frame:
    """k x n matrix with orthonormal rows; columns are the frame vectors."""

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries",
                           np.array(self.entries, dtype=float, copy=True))
        if self.entries.ndim != 2:
            raise DimensionMismatch("frame entries must be a 2-d array")

    @property
    def k(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]

    def residual(self) -> float:
        F = self.entries
        return float(np.linalg.norm(F @ F.T - np.eye(self.k)))

    def check(self, tol: float = TOL_ACCEPT) -> "Frame":
        r = self.residual()
        if r > tol:
            raise FrameInvariantViolation(f"||FF^t - I|| = {r:.3e} > {tol:.1e}")
        return self

    def to_json(self) -> dict:
        return {"k": self.k, "n": self.n, "rows": self.entries.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "Frame":
        return cls(np.asarray(obj["rows"], dtype=float))


@dataclass(frozen=True)
class ProjectionPoint:
    """n x n symmetric idempotent; a point of the rank-k Grassmannian."""

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries",
                           np.array(self.entries, dtype=float, copy=True))
        P = self.entries
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise DimensionMismatch("projection entries must be square")

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def k(self) -> int:
        return int(round(float(np.trace(self.entries))))

    def residual(self) -> float:
        P = self.entries
        return float(max(np.linalg.norm(P - P.T),
                         np.linalg.norm(P @ P - P),
                         abs(np.trace(P) - self.k)))

    def check(self, tol: float = TOL_ACCEPT) -> "ProjectionPoint":
        r = self.residual()
        if r > tol:
            raise ProjectionInvariantViolation(f"projection residual {r:.3e} > {tol:.1e}")
        return self

    def to_json(self) -> dict:
        return {"size": self.n, "rows": self.entries.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "ProjectionPoint":
        return cls(np.asarray(obj["rows"], dtype=float))


def gram(F: Frame, tol: float = TOL_ACCEPT) -> ProjectionPoint:
    """F^t F: the projection onto the row space of F."""
    F.check(tol)
    return ProjectionPoint(F.entries.T @ F.entries)


def schur_horn(P: ProjectionPoint, tol: float = TOL_ACCEPT) -> DiagonalTarget:
    """Diagonal of the projection, as a target of rank tr(P)."""
    P.check(tol)
    return DiagonalTarget(n=P.n, k=P.k, d=tuple(np.diag(P.entries)))


def column_norms_squared(F: Frame, tol: float = TOL_ACCEPT) -> DiagonalTarget:
    F.check(tol)
    d = (F.entries ** 2).sum(axis=0)
    return DiagonalTarget(n=F.n, k=F.k, d=tuple(np.clip(d, 0.0, 1.0)))


def complement(P: ProjectionPoint, tol: float = TOL_ACCEPT) -> ProjectionPoint:
    """I - P, the projection onto the orthogonal complement."""
    P.check(tol)
    return ProjectionPoint(np.eye(P.n) - P.entries)


def height(P: ProjectionPoint, a: np.ndarray) -> float:
    """tr(P D_a) = sum_i a_i P_ii."""
    a = np.asarray(a, dtype=float)
    if a.shape != (P.n,):
        raise DimensionMismatch(f"height vector has shape {a.shape}, need ({P.n},)")
    return float(np.diag(P.entries) @ a)


def factor_projection(P: ProjectionPoint, tol: float = TOL_ACCEPT) -> Frame:
    """Frame whose rows span the rank-1 eigenspace of P; gram() inverts it."""
    P.check(tol)
    sym = 0.5 * (P.entries + P.entries.T)
    vals, vecs = np.linalg.eigh(sym)
    if np.any(np.abs(vals - 0.5) < TOL_SPEC):
        raise SpectralGapTooSmall(
            "eigenvalues too close to 1/2 to identify the rank-one eigenspace")
    top = vecs[:, vals > 0.5]
    if top.shape[1] != P.k:
        raise ProjectionInvariantViolation(
            f"found {top.shape[1]} near-one eigenvalues, expected {P.k}")
    return Frame(top.T)


def retract_projection(M: np.ndarray, k: int) -> ProjectionPoint:
    """Nearest rank-k projection: symmetrize and snap eigenvalues to {0,1}."""
    sym = 0.5 * (M + M.T)
    vals, vecs = np.linalg.eigh(sym)
    top = vecs[:, np.argsort(vals)[-k:]]
    return ProjectionPoint(top @ top.T)


def random_frame(n: int, k: int, seed) -> Frame:
    """Row-orthonormalized Gaussian matrix; orthogonally invariant law."""
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((k, n))
    # QR of the transpose orthonormalizes the rows
    Q, R = np.linalg.qr(G.T)
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return Frame((Q * signs).T)


def orthonormalize_rows(M: np.ndarray) -> np.ndarray:
    """Polar-type correction: nearest matrix with orthonormal rows."""
    U, _, Vt = np.linalg.svd(M, full_matrices=False)
    return U @ Vt
