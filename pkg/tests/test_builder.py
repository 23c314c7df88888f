import math

import numpy as np
import pytest

from frametop.builder import (
    build_ntf,
    doubled_frame,
    identity_augmented,
    odd_frame,
    simplex_frame,
)
from frametop.errors import HypersimplexViolation, NormDeficit, ShapeMismatch
from frametop.hypersimplex import DiagonalTarget, random_targets, satisfies_hypothesis
from frametop.linalg import Frame, column_norms_squared, gram


def T(d, k):
    return DiagonalTarget(n=len(d), k=k, d=tuple(d))


def norms2(F):
    return (F.entries ** 2).sum(axis=0)


class TestBuildNtf:
    def test_vertex(self):
        F, _ = build_ntf(T((1, 1, 0, 0), 2))
        assert np.allclose(gram(F).entries, np.diag([1.0, 1, 0, 0]), atol=1e-10)

    def test_center(self):
        F, rot = build_ntf(T((0.5,) * 4, 2))
        assert F.residual() <= 1e-10
        assert np.allclose(norms2(F), 0.5, atol=1e-10)
        assert rot <= 3

    def test_mercedes_norms(self):
        F, _ = build_ntf(T((2 / 3,) * 3, 2))
        assert F.residual() <= 1e-10
        assert np.allclose(norms2(F), 2 / 3, atol=1e-10)

    def test_rejects_outside(self):
        with pytest.raises(HypersimplexViolation):
            build_ntf(T((0.9, 0.9, 0.9), 2))

    def test_deterministic(self):
        t = T((0.7, 0.6, 0.4, 0.3), 2)
        a, _ = build_ntf(t)
        b, _ = build_ntf(t)
        assert np.array_equal(a.entries, b.entries)

    def test_random_sweep(self):
        rng = np.random.default_rng(11)
        for n, k in [(4, 2), (6, 3), (9, 4), (12, 5)]:
            for row in random_targets(n, k, 50, rng):
                F, rot = build_ntf(T(row, k))
                assert F.residual() <= 1e-10
                assert np.max(np.abs(norms2(F) - row)) <= 1e-10
                assert rot <= n - 1


class TestSimplexFrame:
    @pytest.mark.parametrize("k", range(2, 13))
    def test_structure(self, k):
        G = simplex_frame(k).entries
        assert G.shape == (k, k + 1)
        # unit columns, orthogonal rows of squared norm (k+1)/k
        assert np.allclose((G ** 2).sum(axis=0), 1.0, atol=1e-12)
        assert np.allclose(G @ G.T, (k + 1) / k * np.eye(k), atol=1e-12)
        # zero pattern, last column, first-row sign flip
        assert np.allclose(G[0, 2:], 0.0, atol=1e-12)
        assert np.allclose(G[:k - 1, k], 0.0, atol=1e-12)
        assert G[k - 1, k] == pytest.approx(-1.0)
        assert np.allclose(G[1:, 0], G[1:, 1], atol=1e-12)
        assert G[0, 0] == pytest.approx(-G[0, 1])

    def test_k2_values(self):
        G = simplex_frame(2).entries
        assert np.allclose(np.abs(G[0, :2]), math.sqrt(3) / 2)
        assert np.allclose(G[1], [0.5, 0.5, -1.0])

    def test_column_sum_cancellation(self):
        for k in range(2, 8):
            G = simplex_frame(k).entries
            assert abs(G[0] @ np.ones(k + 1)) <= 1e-12


class TestIdentityAugmented:
    @pytest.mark.parametrize("k", range(2, 7))
    def test_equal_norm_frame(self, k):
        F = identity_augmented(k)
        n = 2 * k + 1
        assert F.residual() <= 1e-12
        assert np.allclose(norms2(F), k / n, atol=1e-12)
        assert satisfies_hypothesis(column_norms_squared(F), tol=1e-9)


class TestDoubledFrame:
    def test_identity(self):
        F = doubled_frame(Frame(np.eye(2)))
        assert F.residual() <= 1e-12
        assert np.allclose(norms2(F), 0.5, atol=1e-12)

    def test_from_builder(self):
        G, _ = build_ntf(T((2 / 3,) * 3, 2))
        F = doubled_frame(G)
        assert F.residual() <= 1e-12
        assert np.allclose(norms2(F), 1 / 3, atol=1e-12)


class TestOddFrame:
    def test_five_columns(self):
        G = Frame(np.array([[1.0, -1.0]]) / math.sqrt(2))
        t = T((0.45, 0.45, 0.45, 0.45, 0.2), 2)
        F = odd_frame(G, t)
        assert F.residual() <= 1e-12
        assert np.allclose(norms2(F), t.values, atol=1e-12)

    def test_deficit(self):
        G = Frame(np.array([[1.0, -1.0]]) / math.sqrt(2))
        with pytest.raises(NormDeficit):
            odd_frame(G, T((0.2, 0.45, 0.2, 0.45, 0.7), 2))

    def test_shape_check(self):
        G = Frame(np.array([[1.0, -1.0]]) / math.sqrt(2))
        with pytest.raises(ShapeMismatch):
            odd_frame(G, T((0.4, 0.3, 0.3, 0.4, 0.6), 2))
