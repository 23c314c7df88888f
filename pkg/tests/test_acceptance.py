"""End-to-end acceptance gate.

One test per guarantee the package advertises, each at its published
tolerance and runtime budget, each ending in a single PASS line.
"""

import itertools
import time

import numpy as np

from frametop.builder import build_ntf
from frametop.fiber import (
    count_components,
    descend_to_fiber,
    exact_fiber_special,
    fiber_gradient,
    fiber_objective,
    tangent_project,
)
from frametop.hypersimplex import (
    DiagonalTarget,
    dual_target,
    random_hypothesis_targets,
    random_targets,
    satisfies_hypothesis,
    two_value_target,
)
from frametop.linalg import gram, random_frame, retract_projection
from frametop.paths import (
    certify_equal_norm,
    certify_target,
    duality_lift,
    verify_path,
)
from frametop.polygon import frame_km_criterion, frame_to_polygon
from frametop.strata import verify_no_codim_one


def T(d, k):
    return DiagonalTarget(n=len(d), k=k, d=tuple(d))


def test_hypothesis_matches_brute_force():
    """Subset-sum shortcut vs full (n-k)-subset enumeration, n <= 10, < 5 s."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(42)
    checked = disagreements = 0
    for n in range(2, 11):
        for k in range(1, n):
            X = random_targets(n, k, 10000, rng)
            sel = np.zeros((n, 0))
            cols = list(itertools.combinations(range(n), n - k))
            sel = np.zeros((n, len(cols)))
            for j, c in enumerate(cols):
                sel[list(c), j] = 1.0
            brute = (X @ sel).min(axis=1) >= 1.0 - 1e-12
            fast = np.fromiter(
                (satisfies_hypothesis(DiagonalTarget(n, k, row), tol=1e-12)
                 for row in X), dtype=bool, count=len(X))
            disagreements += int(np.sum(fast != brute))
            checked += len(X)
    elapsed = time.perf_counter() - t0
    assert disagreements == 0
    assert elapsed < 5.0, f"{elapsed:.2f} s"
    print(f"PASS hypothesis-vs-brute-force: {checked} targets, "
          f"0 disagreements, {elapsed:.2f} s")


def test_no_codimension_one_strata_under_hypothesis():
    """200 hypothesis-satisfying targets per shape are all clean; the spiked
    target yields the known feasible witness.  < 60 s total."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    checked = 0
    for n, k in [(4, 2), (5, 2), (6, 2), (6, 3), (7, 3), (8, 4)]:
        for t in random_hypothesis_targets(n, k, 200, rng):
            ok, witness = verify_no_codim_one(t)
            assert ok and witness is None, (n, k, t.d)
            checked += 1
    ok, witness = verify_no_codim_one(T((1.0, 1 / 3, 1 / 3, 1 / 3), 2))
    assert not ok
    assert witness.feasible and witness.witness_r is not None
    assert sorted(np.round(witness.b, 12)) == sorted(
        np.round((1 / 6, -1 / 6), 12))
    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0, f"{elapsed:.2f} s"
    print(f"PASS no-codim-one: {checked} clean targets + spiked witness "
          f"b=(1/6,-1/6), {elapsed:.2f} s")


def test_catalogued_fibers_match_sampling():
    """Exact fibers (1 and 4 points) reproduced by sampled component counts
    with at least 50 converged descents each; residuals <= 1e-8."""
    cases = [(T((1.0, 1.0, 0.0, 0.0), 2), 1),
             (T((1.0, 1 / 3, 1 / 3, 1 / 3), 2), 4)]
    for d, expected in cases:
        exact = exact_fiber_special(d)
        assert exact is not None and len(exact) == expected
        for P in exact:
            P.check(1e-8)
            assert np.max(np.abs(np.diag(P.entries) - d.values)) <= 1e-8
        converged = 0
        for i in range(100):
            P = descend_to_fiber(gram(random_frame(d.n, d.k, (0, i))), d)
            if P is not None:
                converged += 1
                assert P.residual() <= 1e-8
                assert np.max(np.abs(np.diag(P.entries) - d.values)) <= 1e-8
        assert converged >= 50, f"{converged}/100 converged for {d.d}"
        count, reps = count_components(d, num_samples=100, seed=0)
        assert count == expected, (d.d, count)
        for P in reps:
            assert P.residual() <= 1e-8
        print(f"PASS fiber {tuple(round(x, 4) for x in d.d)}: exact {expected}, "
              f"sampled {count}, {converged}/100 converged")


def _two_value_rows():
    """Catalogued two-value families (n, k, beta interval), n <= 12."""
    rows = []
    for n in range(4, 13):
        if n % 2 == 0:
            p = n // 2
            for q in range(1, p):
                k = 2 * q
                if k <= p:
                    rows.append((n, k, q / (2 * p - 2 * q), q / p))
                else:
                    rows.append((n, k, 0.5, q / p))
        else:
            p = (n - 1) // 2
            for k in range(3, p, 2):
                rows.append((n, k, ((k - 1) // 2) / p, k / n))
            for k in range(2, p, 2):
                q = k // 2
                # at q = 1 the nominal bound (2q-1)/2p dips below the
                # subset-sum constraint; start at the feasible endpoint
                lo = 1 / (n - 2) if q == 1 else (2 * q - 1) / (2 * p)
                rows.append((n, k, lo, k / n))
    return rows


def _check_certificate(cert, limit, label):
    t_verify = verify_path(cert.path, tol=1e-8, step_max=0.1,
                           start=cert.F.entries,
                           end=cert.D @ cert.F.entries)
    assert t_verify.passed, label
    assert abs(np.linalg.det(cert.D) + 1.0) <= 1e-10, label
    assert limit[0] < limit[1], f"{label}: {limit[0]:.2f} s > {limit[1]} s"


def test_certificates_for_catalogued_families():
    """Every catalogued two-value row (3 beta values), every equal-norm
    (n,k) with n <= 9, and the mixed 6-point example all certify."""
    cases = 0
    for n, k, lo, hi in _two_value_rows():
        for beta in (lo, 0.5 * (lo + hi), hi):
            t0 = time.perf_counter()
            cert = certify_target(two_value_target(n, k, beta))
            dt = time.perf_counter() - t0
            # odd-n rank-2 routes fall back to the numerical search
            budget = 60.0 if n % 2 and 2 in (k, n - k) else 5.0
            _check_certificate(cert, (dt, budget), (n, k, beta))
            cases += 1
    for n in range(4, 10):
        for k in range(2, n - 1):
            t0 = time.perf_counter()
            cert = certify_equal_norm(n, k)
            dt = time.perf_counter() - t0
            budget = 60.0 if n % 2 and 2 in (k, n - k) else 5.0
            _check_certificate(cert, (dt, budget), ("equal", n, k))
            cases += 1
    t0 = time.perf_counter()
    cert = certify_target(T((0.4, 0.3, 0.3, 0.4, 0.3, 0.3), 2))
    _check_certificate(cert, (time.perf_counter() - t0, 5.0), "mixed example")
    cases += 1
    print(f"PASS certificates: {cases} cases, det D = -1, "
          f"verified at tol 1e-8 / step 0.1")


def test_duality_lift_round_trip():
    """(1/3)^6 rank 2 lifts to a verifying (2/3)^6 rank 4 certificate and
    lifts back."""
    base = certify_target(T((1 / 3,) * 6, 2))
    lifted = duality_lift(base)
    assert lifted.d.k == 4
    assert np.allclose(lifted.d.values, 2 / 3, atol=1e-12)
    assert lifted.report.passed
    back = duality_lift(lifted)
    assert back.d.k == 2
    assert np.allclose(back.d.values, 1 / 3, atol=1e-12)
    assert back.report.passed
    for cert in (lifted, back):
        assert abs(np.linalg.det(cert.D) + 1.0) <= 1e-10
    print("PASS duality round trip: (1/3)^6 k=2 <-> (2/3)^6 k=4, "
          "both certificates verify")


def test_builder_residuals_and_rotation_budget():
    """1000 random targets per (n,k), n <= 12: residuals <= 1e-10 and at
    most n-1 rotations per build."""
    rng = np.random.default_rng(3)
    built = 0
    worst = 0.0
    for n in range(3, 13):
        for k in range(1, n):
            for row in random_targets(n, k, 1000, rng):
                F, rotations = build_ntf(DiagonalTarget(n, k, row))
                assert rotations <= n - 1, (n, k, rotations)
                rf = np.linalg.norm(F.entries @ F.entries.T - np.eye(k))
                rn = np.max(np.abs((F.entries ** 2).sum(axis=0) - row))
                worst = max(worst, rf, rn)
                built += 1
    assert worst <= 1e-10, worst
    print(f"PASS builder: {built} builds, worst residual {worst:.2e}, "
          f"rotations <= n-1")


def test_fiber_gradient_matches_finite_differences():
    """Projected gradient vs central differences, h = 1e-5, 100 pairs."""
    rng = np.random.default_rng(11)
    h = 1e-5
    for trial in range(100):
        n = 4 + trial % 3
        k = 2 + trial % 2
        P = gram(random_frame(n, k, (5, trial)))
        d = T(tuple(np.clip(np.diag(P.entries)
                            + 0.1 * rng.standard_normal(n), 0, 1)), k)
        G = fiber_gradient(P, d)
        X = tangent_project(P, rng.standard_normal((n, n)))
        fp = fiber_objective(retract_projection(P.entries + h * X, k), d)
        fm = fiber_objective(retract_projection(P.entries - h * X, k), d)
        fd = (fp - fm) / (2 * h)
        an = float(np.sum(G * X))
        assert abs(fd - an) <= 1e-5 * max(1.0, abs(an)), trial
    print("PASS gradient check: 100 pairs, central differences h=1e-5, "
          "rel err <= 1e-5")


def _rank_two_grid(n, step=20):
    """Non-increasing lattice points of the rank-2 hypersimplex, step 1/20."""
    out = []

    def rec(prefix, remaining, cap):
        if len(prefix) == n:
            if remaining == 0:
                out.append(tuple(v / step for v in prefix))
            return
        slots = n - len(prefix)
        for v in range(min(cap, remaining), -1, -1):
            if remaining - v > (slots - 1) * v:
                break
            rec(prefix + [v], remaining - v, v)

    rec([], 2 * step, step)
    return out


def test_polygon_closure_and_km_consistency():
    """Closure residual <= 1e-12 on 1000 random rank-2 frames; on the full
    1/20 grid no target satisfies both the subset-sum hypothesis and the
    three-long-sides disconnectedness criterion."""
    for i in range(1000):
        F = random_frame(4 + i % 6, 2, (9, i))
        assert frame_to_polygon(F).closure_residual() <= 1e-12
    scanned = 0
    for n in range(4, 9):
        for d in _rank_two_grid(n):
            t = DiagonalTarget(n, 2, d)
            scanned += 1
            if satisfies_hypothesis(t, tol=1e-12):
                assert not frame_km_criterion(t), d
    print(f"PASS polygon: 1000 closures <= 1e-12, {scanned} grid targets, "
          f"no hypothesis/KM conflict")
