import math

import numpy as np
import pytest

from frametop.errors import (
    DimensionMismatch,
    FrameInvariantViolation,
    ProjectionInvariantViolation,
)
from frametop.hypersimplex import DiagonalTarget, dual_target, in_hypersimplex
from frametop.linalg import (
    Frame,
    ProjectionPoint,
    column_norms_squared,
    complement,
    factor_projection,
    gram,
    height,
    orthonormalize_rows,
    random_frame,
    schur_horn,
)

COORD = Frame(np.hstack([np.eye(2), np.zeros((2, 2))]))
HALF = Frame(np.hstack([np.eye(2), np.eye(2)]) / math.sqrt(2))


class TestGram:
    def test_coordinate_plane(self):
        P = gram(COORD)
        assert np.allclose(P.entries, np.diag([1, 1, 0, 0]))

    def test_half_frame(self):
        P = gram(HALF)
        assert np.allclose(np.diag(P.entries), 0.5)

    def test_rejects_bad_frame(self):
        bad = Frame(np.hstack([np.eye(2) * 1.01, np.zeros((2, 2))]))
        with pytest.raises(FrameInvariantViolation):
            gram(bad)


class TestSchurHorn:
    def test_diagonal(self):
        t = schur_horn(ProjectionPoint(np.diag([1.0, 1, 0, 0])))
        assert t.d == (1.0, 1.0, 0.0, 0.0) and t.k == 2

    def test_special_plane(self):
        v = np.array([0.0, 1, 1, 1]) / math.sqrt(3)
        P = np.outer(v, v)
        P[0, 0] = 1.0
        t = schur_horn(ProjectionPoint(P))
        assert np.allclose(t.values, (1, 1 / 3, 1 / 3, 1 / 3))

    def test_image_in_polytope(self):
        for i in range(50):
            n = 4 + i % 5
            t = schur_horn(gram(random_frame(n, 2, i)))
            assert in_hypersimplex(t, tol=1e-9)

    def test_consistency_with_column_norms(self):
        for n, k in [(4, 2), (5, 2), (6, 3), (7, 3)]:
            for i in range(100):
                F = random_frame(n, k, (n, k, i))
                a = schur_horn(gram(F)).values
                b = column_norms_squared(F).values
                assert np.max(np.abs(a - b)) <= 1e-12


class TestComplement:
    def test_diagonal(self):
        C = complement(ProjectionPoint(np.diag([1.0, 1, 0, 0])))
        assert np.allclose(C.entries, np.diag([0, 0, 1.0, 1.0]))

    def test_involution_and_duality(self):
        for i in range(10):
            P = gram(random_frame(5, 2, i))
            C = complement(P)
            assert np.allclose(complement(C).entries, P.entries)
            assert np.allclose(schur_horn(C).values,
                               dual_target(schur_horn(P)).values)


class TestHeight:
    def test_arithmetic(self):
        P = ProjectionPoint(np.diag([1.0, 1, 0, 0]))
        assert height(P, np.array([4.0, 3, 2, 1])) == pytest.approx(7.0)

    def test_shift_law(self):
        P = gram(random_frame(5, 2, 0))
        a = np.arange(5.0)
        for c in (0.5, -2.0):
            assert height(P, a + c) == pytest.approx(height(P, a) + 2 * c)

    def test_zero_vector(self):
        P = gram(random_frame(4, 2, 1))
        assert height(P, np.zeros(4)) == 0.0

    def test_permutation_transport(self):
        rng = np.random.default_rng(2)
        P = gram(random_frame(5, 2, 3))
        a = rng.standard_normal(5)
        perm = rng.permutation(5)
        g = np.eye(5)[:, perm]
        assert height(ProjectionPoint(g @ P.entries @ g.T), a) == \
            pytest.approx(height(P, a[perm]))

    def test_shape_check(self):
        with pytest.raises(DimensionMismatch):
            height(gram(random_frame(4, 2, 0)), np.zeros(3))


class TestFactorProjection:
    def test_coordinate(self):
        F = factor_projection(ProjectionPoint(np.diag([1.0, 1, 0, 0])))
        assert np.allclose(F.entries @ F.entries.T, np.eye(2))
        assert np.allclose(F.entries[:, 2:], 0.0)

    def test_round_trip(self):
        for i in range(20):
            P = gram(random_frame(6, 3, i))
            F = factor_projection(P)
            assert np.linalg.norm(gram(F).entries - P.entries) <= 1e-9

    def test_rejects_non_projection(self):
        with pytest.raises(ProjectionInvariantViolation):
            factor_projection(ProjectionPoint(np.diag([0.9, 1.0, 0.0, 0.0])))


class TestRandomFrame:
    def test_deterministic(self):
        a = random_frame(4, 2, 7).entries
        b = random_frame(4, 2, 7).entries
        assert np.array_equal(a, b)

    def test_full_rank_square(self):
        F = random_frame(4, 4, 0)
        assert np.allclose(F.entries @ F.entries.T, np.eye(4), atol=1e-12)
        assert np.allclose(F.entries.T @ F.entries, np.eye(4), atol=1e-12)

    def test_orthonormalize_rows(self):
        rng = np.random.default_rng(0)
        M = orthonormalize_rows(rng.standard_normal((3, 7)))
        assert np.allclose(M @ M.T, np.eye(3), atol=1e-12)
