"""Critical-stratum candidates from the block trace equations.

A height vector a groups coordinates into level blocks; a candidate stratum
is a block structure (sizes m, occupancies c) whose level values b solve the
per-block trace equations for a diagonal target d.  Feasible candidates need
strictly decreasing levels and per-block entries inside [0, 1].  The
codimension-one criterion (an occupied prefix of size n-k with occupancy 1)
is excluded whenever the subset-sum hypothesis holds; `verify_no_codim_one`
checks that exhaustively at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import List, Optional, Tuple

import numpy as np

from .errors import HypersimplexViolation, IndexOutOfRange, ShapeMismatch, TooLarge
from .hypersimplex import DiagonalTarget, in_hypersimplex

TOL_FEAS = 1e-9     # slack on block-entry bounds
GAP_MIN = 1e-9      # required strict descent between consecutive levels
MAX_N = 8


@dataclass(frozen=True)
class HeightSpec:
    """A height vector with its descending sort and grouped level blocks."""

    a: tuple
    sigma: tuple                 # a[sigma[0]] >= a[sigma[1]] >= ...
    blocks: tuple                # ((level, multiplicity), ...) strictly decreasing


@dataclass
class StratumCandidate:
    """Block data (σ, m, c) with solved levels b and feasibility flags."""

    sigma: tuple
    m: tuple
    c: tuple
    b: tuple
    feasible: bool
    level_codims: tuple = ()
    witness_r: Optional[int] = None

    def to_json(self) -> dict:
        return {"sigma": list(self.sigma), "m": list(self.m), "c": list(self.c),
                "b": list(self.b), "feasible": self.feasible,
                "level_codims": list(self.level_codims),
                "witness_r": self.witness_r}


def sort_spec(a) -> HeightSpec:
    """Descending sort of a height vector with equal values grouped."""
    a = tuple(float(x) for x in np.atleast_1d(np.asarray(a, dtype=float)))
    sigma = tuple(sorted(range(len(a)), key=lambda i: (-a[i], i)))
    blocks: List[Tuple[float, int]] = []
    for i in sigma:
        if blocks and abs(blocks[-1][0] - a[i]) <= 1e-12:
            blocks[-1] = (blocks[-1][0], blocks[-1][1] + 1)
        else:
            blocks.append((a[i], 1))
    return HeightSpec(a=a, sigma=sigma, blocks=tuple(blocks))


def level_codimension(m, c, i: int, n: int, k: int) -> int:
    """Prefix codimension (c_1+…+c_i)·(n-k-(m_1+…+m_i)+c_1+…+c_i)."""
    if not (1 <= i <= len(m)) or len(c) != len(m):
        raise IndexOutOfRange(f"prefix index {i} for {len(m)} blocks")
    C = sum(c[:i])
    M = sum(m[:i])
    return C * (n - k - M + C)


def solve_levels(d: DiagonalTarget, sigma, m, c,
                 tol: float = TOL_FEAS) -> Tuple[tuple, bool]:
    """Levels b_i from the trace equations; feasibility of the block data.

    b_i = (c_i - Σ_{j in block i} d^σ_j)/m_i; feasible iff b is strictly
    decreasing and every shifted entry d^σ_j + b_i lies in [0, 1] (slack tol).
    """
    sigma = list(sigma)
    if sorted(sigma) != list(range(d.n)) or sum(m) != d.n or len(c) != len(m):
        raise ShapeMismatch("sigma must permute the entries and m partition them")
    ds = d.values[sigma]
    b = []
    pos = 0
    feasible = True
    for mi, ci in zip(m, c):
        block = ds[pos:pos + mi]
        bi = (ci - float(block.sum())) / mi
        if np.min(block) + bi < -tol or np.max(block) + bi > 1.0 + tol:
            feasible = False
        b.append(bi)
        pos += mi
    for x, y in zip(b, b[1:]):
        if x - y <= GAP_MIN:
            feasible = False
    return tuple(b), feasible


def _candidate(d: DiagonalTarget, sigma, m, c) -> StratumCandidate:
    b, feasible = solve_levels(d, sigma, m, c)
    codims = tuple(level_codimension(m, c, i, d.n, d.k)
                   for i in range(1, len(m) + 1))
    witness = None
    for r, cd in enumerate(codims, start=1):
        if cd == 1:
            witness = r
            break
    return StratumCandidate(sigma=tuple(sigma), m=tuple(m), c=tuple(c), b=b,
                            feasible=feasible, level_codims=codims,
                            witness_r=witness)


def enumerate_strata(d: DiagonalTarget, max_blocks: Optional[int] = None,
                     limit: int = 400000) -> List[StratumCandidate]:
    """All candidates (σ up to within-block order, m, c) with ≤ max_blocks levels.

    Entries are assigned to blocks as a multiset partition; candidates with
    identical (block contents, b, c) are merged.  Raises TooLarge beyond the
    supported envelope (n ≤ 8 or too many combinations).
    """
    if not in_hypersimplex(d, tol=1e-9):
        raise HypersimplexViolation(f"{d} is not a hypersimplex point")
    n, k = d.n, d.k
    if n > MAX_N:
        raise TooLarge(f"n = {n} > {MAX_N}")
    if max_blocks is None:
        max_blocks = n
    dv = d.values
    out: List[StratumCandidate] = []
    seen = set()

    def key_of(sigma, m, c, b):
        pos = 0
        blocks = []
        for mi, ci, bi in zip(m, c, b):
            vals = tuple(sorted(round(dv[j], 12) for j in sigma[pos:pos + mi]))
            blocks.append((vals, ci, round(bi, 12)))
            pos += mi
        return tuple(blocks)

    def recurse(remaining: tuple, sigma: list, m: list, c: list, k_left: int):
        if len(out) + len(seen) > limit:
            raise TooLarge("stratum enumeration limit exceeded")
        if not remaining:
            if k_left == 0 and m:
                cand = _candidate(d, sigma, m, c)
                key = key_of(sigma, m, c, cand.b)
                if key not in seen:
                    seen.add(key)
                    out.append(cand)
            return
        if len(m) >= max_blocks:
            return
        rest_blocks = max_blocks - len(m) - 1
        picked_values = set()
        for size in range(1, len(remaining) + 1):
            for subset in combinations(remaining, size):
                vals = tuple(round(dv[j], 12) for j in subset)
                if vals in picked_values:
                    continue
                picked_values.add(vals)
                left = tuple(x for x in remaining if x not in subset)
                for ci in range(0, min(size, k_left) + 1):
                    if k_left - ci > len(left):
                        continue
                    if rest_blocks == 0 and left:
                        continue
                    recurse(left, sigma + list(subset), m + [size],
                            c + [ci], k_left - ci)

    recurse(tuple(range(n)), [], [], [], k)
    return out


def _chain_search(values: np.ndarray, total_c: int, maximize_last: bool,
                  tol: float = TOL_FEAS):
    """Best achievable extreme level over feasible ordered partitions.

    Partitions the given entries into blocks with strictly decreasing levels,
    entries shifted into [0, 1], and occupancies summing to total_c.  Returns
    (best_level, blocks) where best_level is the last (smallest) level when
    maximize_last, else the first (largest) level minimized; None if no
    feasible partition exists.
    """
    mval = len(values)
    best = {"level": None, "blocks": None}

    def recurse(mask: int, b_prev: float, c_left: int, first_b, blocks):
        if mask == 0:
            if c_left != 0:
                return
            level = blocks[-1][2] if maximize_last else first_b
            if best["level"] is None or \
               (maximize_last and level > best["level"]) or \
               (not maximize_last and level < best["level"]):
                best["level"] = level
                best["blocks"] = list(blocks)
            return
        idx = [i for i in range(mval) if mask & (1 << i)]
        sub = mask
        while sub:
            chosen = [i for i in idx if sub & (1 << i)]
            if chosen:
                size = len(chosen)
                s = float(values[list(chosen)].sum())
                for ci in range(0, min(size, c_left) + 1):
                    bi = (ci - s) / size
                    if bi >= b_prev - GAP_MIN:
                        continue
                    block = values[list(chosen)]
                    if block.min() + bi < -tol or block.max() + bi > 1.0 + tol:
                        continue
                    recurse(mask & ~sub, bi, c_left - ci,
                            bi if first_b is None else first_b,
                            blocks + [(tuple(chosen), ci, bi)])
            sub = (sub - 1) & mask

    recurse((1 << mval) - 1, float("inf"), total_c, None, [])
    return (best["level"], best["blocks"]) if best["level"] is not None else None


def verify_no_codim_one(d: DiagonalTarget,
                        tol: float = TOL_FEAS) -> Tuple[bool, Optional[StratumCandidate]]:
    """True iff no feasible candidate has a codimension-1 prefix.

    A codim-1 prefix forces the first blocks to hold exactly n-k entries
    with total occupancy 1; the remaining k entries carry occupancy k-1.
    The two sides are partitioned independently, so it suffices to compare
    the best achievable last level of the low side against the best first
    level of the high side over every (n-k)-subset.
    """
    if not in_hypersimplex(d, tol=1e-9):
        raise HypersimplexViolation(f"{d} is not a hypersimplex point")
    n, k = d.n, d.k
    if n > MAX_N:
        raise TooLarge(f"n = {n} > {MAX_N}")
    dv = d.values
    seen_lows = set()
    for low in combinations(range(n), n - k):
        s_low = float(dv[list(low)].sum())
        # averaging the trace equations: the low chain's smallest level is at
        # most (1-s_low)/(n-k) and the high chain's largest is at least
        # (s_low-1)/k, so the split needs s_low strictly below 1
        if (1.0 - s_low) * (1.0 / (n - k) + 1.0 / k) <= GAP_MIN:
            continue
        vals_low = tuple(sorted(round(dv[i], 12) for i in low))
        if vals_low in seen_lows:
            continue
        seen_lows.add(vals_low)
        high = tuple(i for i in range(n) if i not in low)
        res_low = _chain_search(dv[list(low)], 1, maximize_last=True, tol=tol)
        if res_low is None:
            continue
        res_high = _chain_search(dv[list(high)], k - 1, maximize_last=False, tol=tol)
        if res_high is None:
            continue
        if res_low[0] - res_high[0] > GAP_MIN:
            sigma, m, c = [], [], []
            for local, ci, _ in res_low[1]:
                sigma.extend(low[i] for i in local)
                m.append(len(local))
                c.append(ci)
            for local, ci, _ in res_high[1]:
                sigma.extend(high[i] for i in local)
                m.append(len(local))
                c.append(ci)
            witness = _candidate(d, sigma, m, c)
            assert witness.feasible and witness.witness_r is not None
            # a genuine witness always breaks the subset-sum bound
            assert sum(sorted(dv)[:n - k]) < 1.0 + 1e-9
            return False, witness
    return True, None
