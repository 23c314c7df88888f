"""Rank-2 frames as closed planar polygons.

Squaring the frame columns as complex numbers sends a k=2 frame to a closed
n-gon with perimeter 1; disconnectedness of the polygon space transfers back
to the frame space through the Kapovich-Millson triple criterion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotNormalized, NotRankTwo
from .hypersimplex import DiagonalTarget, in_hypersimplex
from .linalg import Frame

TOL_POLY = 1e-10


@dataclass(frozen=True)
class Polygon:
    """Closed planar n-gon: edge vectors summing to zero, side lengths r."""

    edges: np.ndarray        # (n, 2)
    r: np.ndarray            # (n,), sums to 1

    def __post_init__(self):
        object.__setattr__(self, "edges", np.array(self.edges, dtype=float, copy=True))
        object.__setattr__(self, "r", np.array(self.r, dtype=float, copy=True))

    @property
    def n(self) -> int:
        return self.edges.shape[0]

    def closure_residual(self) -> float:
        return float(np.linalg.norm(self.edges.sum(axis=0)))

    def check(self, tol: float = TOL_POLY) -> "Polygon":
        if self.closure_residual() > tol:
            raise NotNormalized(f"edges sum to {self.edges.sum(axis=0)}")
        if np.max(np.abs(np.linalg.norm(self.edges, axis=1) - self.r)) > tol:
            raise NotNormalized("edge lengths disagree with r")
        if abs(self.r.sum() - 1.0) > tol:
            raise NotNormalized(f"perimeter {self.r.sum()} != 1")
        return self

    def to_json(self) -> dict:
        return {"edges": self.edges.tolist(), "r": self.r.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "Polygon":
        return cls(edges=np.asarray(obj["edges"], dtype=float),
                   r=np.asarray(obj["r"], dtype=float))


def frame_to_polygon(F: Frame, tol: float = 1e-8) -> Polygon:
    """Edges (1/2) z_j^2 for z_j the j-th column read as a complex number.

    Closure is automatic: sum z_j^2 = (||row1||^2 - ||row2||^2)
    + 2i <row1, row2>, which vanishes because the rows are orthonormal.
    Side lengths are d_j / 2.
    """
    if F.k != 2:
        raise NotRankTwo(f"k = {F.k}, need 2")
    F.check(tol)
    z = F.entries[0] + 1j * F.entries[1]
    w = 0.5 * z * z
    r = 0.5 * np.abs(z) ** 2
    return Polygon(edges=np.column_stack([w.real, w.imag]), r=r)


def km_disconnected(r, tol: float = TOL_POLY) -> bool:
    """Three pairwise-distinct sides with pairwise sums strictly above 1/2.

    Forces the polygon space to be disconnected (the long sides can never
    line up against the rest).  Sums exactly at 1/2 do not count.
    """
    r = np.asarray(r, dtype=float)
    if r.min() < -tol or abs(r.sum() - 1.0) > max(tol, tol * len(r)):
        raise NotNormalized(f"side lengths must be >= 0 and sum to 1, got {r}")
    top = np.sort(r)[::-1][:3]
    if len(top) < 3:
        return False
    return bool(top[0] + top[1] > 0.5 + tol and
                top[1] + top[2] > 0.5 + tol and
                top[0] + top[2] > 0.5 + tol)


def frame_km_criterion(d: DiagonalTarget, tol: float = TOL_POLY) -> bool:
    """km_disconnected applied to d/2; true forces a disconnected frame space.

    Only one direction holds: (1,1,0,0) fails the criterion yet has a
    disconnected frame space.
    """
    if d.k != 2:
        raise NotRankTwo(f"k = {d.k}, need 2")
    if not in_hypersimplex(d, tol=1e-9):
        raise NotNormalized(f"{d} is not a hypersimplex point")
    return km_disconnected(d.values / 2.0, tol=tol)
