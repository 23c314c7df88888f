"""Diagonal targets, hypersimplex membership, and admissibility rules.

A diagonal target is a vector d of prescribed squared column norms together
with the rank k.  Membership in the hypersimplex (entries in [0,1], sum k)
is exactly the condition for a matching tight frame to exist.  The stronger
subset-sum condition (every (n-k)-subset of d sums to at least 1) is the
sufficient criterion for the frame space quotient to be connected; the
catalogued rules below promote it to verdicts about the frame space itself.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import BetaOutOfRange, HypersimplexViolation, RankOutOfRange

TOL_SUM = 1e-12


@dataclass(frozen=True)
class DiagonalTarget:
    """Prescribed squared norms d (length n) with rank k."""

    n: int
    k: int
    d: tuple = ()

    def __post_init__(self):
        if self.n < 1 or not (1 <= self.k <= self.n):
            raise RankOutOfRange(f"need 1 <= k <= n, got n={self.n}, k={self.k}")
        if len(self.d) != self.n:
            raise HypersimplexViolation(f"d has length {len(self.d)}, expected {self.n}")
        vals = np.asarray(self.d, dtype=float)
        vals.flags.writeable = False
        object.__setattr__(self, "d", tuple(vals.tolist()))
        object.__setattr__(self, "_values", vals)

    @property
    def values(self) -> np.ndarray:
        return self._values

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "d": list(self.d)}

    @classmethod
    def from_json(cls, obj: dict) -> "DiagonalTarget":
        return cls(n=int(obj["n"]), k=int(obj["k"]), d=tuple(obj["d"]))


@dataclass
class AdmissibilityVerdict:
    """Outcome of matching a target against the catalogued criteria."""

    status: str  # ProvenAdmissible | ProvenDisconnected | Unknown
    rule: Optional[str] = None
    witness: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"status": self.status, "rule": self.rule, "witness": self.witness}


def in_hypersimplex(t: DiagonalTarget, tol: float = TOL_SUM) -> bool:
    d = t.d
    if min(d) < -tol or max(d) > 1.0 + tol:
        return False
    return abs(sum(d) - t.k) <= max(tol, tol * t.n)


def satisfies_hypothesis(t: DiagonalTarget, tol: float = TOL_SUM) -> bool:
    """True iff every (n-k)-subset of d sums to >= 1.

    The minimum over subsets is attained on the n-k smallest entries, so a
    sort suffices.
    """
    if not in_hypersimplex(t, tol):
        raise HypersimplexViolation(f"{t} is not a hypersimplex point")
    m = t.n - t.k
    if m == 0:
        return True
    return sum(sorted(t.d)[:m]) >= 1.0 - tol


def hypothesis_brute_force(t: DiagonalTarget, tol: float = TOL_SUM) -> bool:
    """Oracle: enumerate all (n-k)-subsets.  Only for small n."""
    m = t.n - t.k
    d = t.values
    return all(sum(d[i] for i in c) >= 1.0 - tol
               for c in itertools.combinations(range(t.n), m))


def two_value_target(n: int, k: int, beta: float) -> DiagonalTarget:
    """Target with k entries alpha and n-k entries beta, alpha = 1 - (n-k)beta/k.

    For beta in [1/(n-k), k/n] the result satisfies the subset-sum hypothesis.
    """
    if k < 2 or k > n - 2:
        raise RankOutOfRange(f"need 2 <= k <= n-2, got n={n}, k={k}")
    lo, hi = 1.0 / (n - k), k / n
    if not (lo - TOL_SUM <= beta <= hi + TOL_SUM):
        raise BetaOutOfRange(f"beta={beta} outside [{lo}, {hi}]")
    alpha = 1.0 - (n - k) * beta / k
    return DiagonalTarget(n=n, k=k, d=(alpha,) * k + (beta,) * (n - k))


def dual_target(t: DiagonalTarget) -> DiagonalTarget:
    """Entrywise complement 1-d, with rank n-k.  An involution."""
    if not in_hypersimplex(t):
        raise HypersimplexViolation(f"{t} is not a hypersimplex point")
    return DiagonalTarget(n=t.n, k=t.n - t.k, d=tuple(1.0 - x for x in t.d))


def random_targets(n: int, k: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Sample `count` hypersimplex points, shape (count, n).

    Uniform box samples scaled to the right sum, then projected onto
    {0 <= x <= 1, sum x = k}.
    """
    x = rng.random((count, n))
    x *= k / x.sum(axis=1, keepdims=True)
    return project_to_hypersimplex(x, k)


def random_hypothesis_targets(n: int, k: int, count: int,
                              rng: np.random.Generator) -> list:
    """Sample hypersimplex points whose (n-k)-smallest entries sum to >= 1.

    Rejection from `random_targets`, with a repair loop for shapes where the
    acceptance region is a low-dimensional face (k(n-k) close to n): the
    subset-sum deficit is shifted from the k largest entries to the n-k
    smallest, re-sorting between steps, which converges onto the face.
    """
    out = []
    while len(out) < count:
        x = random_targets(n, k, 1, rng)[0]
        t = DiagonalTarget(n=n, k=k, d=tuple(x))
        if satisfies_hypothesis(t, tol=1e-9):
            out.append(t)
            continue
        for _ in range(200):
            order = np.argsort(x)
            low, high = order[:n - k], order[n - k:]
            deficit = 1.0 - x[low].sum()
            if deficit <= 0.0:
                break
            # shift the deficit from the large entries to the small ones;
            # keeps the total at k, re-sorts between steps
            x[low] += deficit / (n - k)
            x[high] -= deficit / k
            x = np.clip(x, 0.0, 1.0)
            x *= k / x.sum()
        t = DiagonalTarget(n=n, k=k, d=tuple(x))
        if in_hypersimplex(t, tol=1e-9) and satisfies_hypothesis(t, tol=1e-9):
            out.append(t)
    return out


def project_to_hypersimplex(x: np.ndarray, k: int) -> np.ndarray:
    """Euclidean projection of each row onto {0 <= y <= 1, sum y = k}.

    The projection is clip(x - tau, 0, 1) for the water-filling shift tau
    solving sum = k; the sum is piecewise linear in tau with breakpoints at
    x_i and x_i - 1, so tau is found by interpolating on the right segment.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    B = np.sort(np.concatenate([x - 1.0, x], axis=1), axis=1)
    s = np.clip(x[:, None, :] - B[:, :, None], 0.0, 1.0).sum(axis=2)
    j = np.clip((s > k).sum(axis=1) - 1, 0, B.shape[1] - 2)
    rows = np.arange(len(x))
    b0, b1 = B[rows, j], B[rows, j + 1]
    s0, s1 = s[rows, j], s[rows, j + 1]
    flat = s1 == s0
    tau = np.where(flat, b0,
                   b0 + (k - s0) * (b1 - b0) / np.where(flat, 1.0, s1 - s0))
    return np.clip(x - tau[:, None], 0.0, 1.0)


# -- admissibility classification ---------------------------------------------

def _is_zero_one(d: np.ndarray, tol: float = 1e-9) -> bool:
    return bool(np.all((np.abs(d) <= tol) | (np.abs(d - 1.0) <= tol)))


def _km_triple(d: np.ndarray, tol: float = TOL_SUM):
    """Indices of three entries with pairwise sums strictly above 1, or None."""
    order = np.argsort(d)[::-1]
    if len(d) < 3:
        return None
    i, j, l = order[0], order[1], order[2]
    if d[i] + d[j] > 1 + tol and d[j] + d[l] > 1 + tol and d[i] + d[l] > 1 + tol:
        return [int(i), int(j), int(l)]
    return None


def _doubled_split(d_sorted: np.ndarray, tol: float = 1e-9):
    """If the multiset of entries pairs up, return the p halved values, else None."""
    n = len(d_sorted)
    if n % 2:
        return None
    pairs = d_sorted.reshape(n // 2, 2)
    if np.all(np.abs(pairs[:, 0] - pairs[:, 1]) <= tol):
        return pairs.mean(axis=1)
    return None


def _two_value_split(d_sorted: np.ndarray, tol: float = 1e-9):
    """Decompose into exactly two distinct values (alpha > beta) with counts."""
    alpha, beta = d_sorted[0], d_sorted[-1]
    if alpha - beta <= tol:
        return None
    na = int(np.sum(np.abs(d_sorted - alpha) <= tol))
    nb = int(np.sum(np.abs(d_sorted - beta) <= tol))
    if na + nb != len(d_sorted):
        return None
    return float(alpha), na, float(beta), nb


def _table_row_match(t: DiagonalTarget, tol: float = 1e-9):
    """Match against the four catalogued two-value families (rule, witness)."""
    d_sorted = np.sort(t.values)[::-1]
    split = _two_value_split(d_sorted, tol)
    if split is None:
        return None
    alpha, na, beta, nb = split
    n, k = t.n, t.k
    if n % 2 == 0:
        p = n // 2
        # alpha repeats 2q times, beta 2(p-q) times, k = 2q
        if k == na and na % 2 == 0:
            q = na // 2
            if 1 <= q < p:
                if k <= p and q / (2 * p - 2 * q) - tol <= beta <= q / p + tol:
                    return ("two-value-even", {"p": p, "q": q, "alpha": alpha,
                                              "beta": beta,
                                              "interval": [q / (2 * p - 2 * q), q / p]})
                if k > p and 0.5 - tol <= beta <= q / p + tol:
                    return ("two-value-even-dual", {"p": p, "q": q, "alpha": alpha,
                                                      "beta": beta,
                                                      "interval": [0.5, q / p]})
    else:
        p = (n - 1) // 2
        if k % 2 == 1 and na == k and k < p:
            # alpha repeats 2q+1 times, beta 2(p-q) times
            q = (k - 1) // 2
            if q >= 1 and q / p - tol <= beta <= k / n + tol:
                return ("two-value-odd-odd", {"p": p, "q": q, "alpha": alpha,
                                              "beta": beta,
                                              "interval": [q / p, k / n]})
        if k % 2 == 0 and na == k and k < p:
            # alpha repeats 2q times, beta 2(p-q)+1 times
            q = k // 2
            if q >= 1 and (2 * q - 1) / (2 * p) - tol <= beta <= k / n + tol:
                return ("two-value-odd-even", {"p": p, "q": q, "alpha": alpha,
                                               "beta": beta,
                                               "interval": [(2 * q - 1) / (2 * p), k / n]})
    return None


def classify_admissibility(t: DiagonalTarget, _depth: int = 0) -> AdmissibilityVerdict:
    """Match the target against the catalogued sufficient conditions.

    Matching is up to permutation of entries.  Returns Unknown when no rule
    fires; the catalogue is sufficient-only, so Unknown carries no claim.
    """
    if not in_hypersimplex(t):
        raise HypersimplexViolation(f"{t} is not a hypersimplex point")
    d = t.values
    perm = np.argsort(d)[::-1]

    if t.k == 2 and _is_zero_one(d):
        return AdmissibilityVerdict("ProvenDisconnected", "O(2)-degenerate",
                                    {"permutation": perm.tolist()})
    if t.k == 2:
        triple = _km_triple(d)
        if triple is not None:
            return AdmissibilityVerdict("ProvenDisconnected", "KM-criterion",
                                        {"indices": triple})

    hyp = satisfies_hypothesis(t)
    if hyp:
        if np.allclose(d, t.k / t.n, atol=1e-9) and 2 <= t.k <= t.n - 2:
            return AdmissibilityVerdict("ProvenAdmissible", "equal-norm",
                                        {"value": t.k / t.n})
        row = _table_row_match(t)
        if row is not None:
            rule, witness = row
            witness["permutation"] = perm.tolist()
            return AdmissibilityVerdict("ProvenAdmissible", rule, witness)
        halves = _doubled_split(np.sort(d)[::-1])
        if halves is not None:
            p = t.n // 2
            if p >= t.k and np.all(halves <= 0.5 + 1e-9):
                return AdmissibilityVerdict("ProvenAdmissible", "doubled",
                                            {"p": p, "halves": halves.tolist(),
                                             "permutation": perm.tolist()})
            if p < t.k and np.all(halves >= 0.5 - 1e-9):
                return AdmissibilityVerdict("ProvenAdmissible", "doubled-dual",
                                            {"p": p, "halves": halves.tolist(),
                                             "permutation": perm.tolist()})

    if _depth == 0:
        dual = classify_admissibility(dual_target(t), _depth=1)
        if dual.status != "Unknown":
            return AdmissibilityVerdict(dual.status, f"duality-of-{dual.rule}",
                                        {"dual": dual.witness})

    return AdmissibilityVerdict("Unknown")


def target_to_json_str(t: DiagonalTarget) -> str:
    return json.dumps(t.to_json())
