"""Symmetric linear algebra: eigensolver, classification, resultant."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sdpexact import linalg
from conftest import random_sym


class TestSym:
    def test_symmetrizes_tiny_skew(self):
        A = np.array([[1.0, 2.0], [2.0 + 1e-14, 3.0]])
        S = linalg.sym(A)
        assert np.array_equal(S, S.T)

    def test_rejects_nonsquare(self):
        with pytest.raises(ValueError):
            linalg.sym(np.ones((2, 3)))

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            linalg.sym(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_scalar_becomes_1x1(self):
        assert linalg.sym(3.0).shape == (1, 1)


class TestEig:
    def test_diagonal_matrix_sorted(self):
        spec = linalg.eig_sym(np.diag([3.0, 1.0, 2.0]))
        assert np.allclose(spec.eigenvalues, [1.0, 2.0, 3.0], atol=1e-12)

    def test_known_2x2(self):
        # [[2,1],[1,2]] has eigenvalues 1 and 3
        spec = linalg.eig_sym(np.array([[2.0, 1.0], [1.0, 2.0]]))
        assert np.allclose(spec.eigenvalues, [1.0, 3.0], atol=1e-12)

    def test_reconstruction_and_orthogonality_battery(self):
        rng = np.random.default_rng(11)
        for trial in range(300):
            d = int(rng.integers(2, 9))
            S = random_sym(rng, d) * float(rng.choice([1e-3, 1.0, 1e3]))
            spec = linalg.eig_sym(S)
            V, w = spec.eigenvectors, spec.eigenvalues
            scale = max(1.0, float(np.max(np.abs(w))))
            assert np.linalg.norm((V * w) @ V.T - S) <= 1e-10 * scale
            assert np.linalg.norm(V.T @ V - np.eye(d)) <= 1e-10
            assert np.all(np.diff(w) >= -1e-12 * scale)

    def test_matches_lapack_eigenvalues(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            S = random_sym(rng, int(rng.integers(2, 7)))
            w = linalg.eig_sym(S).eigenvalues
            ref = np.linalg.eigvalsh(S)
            assert np.allclose(w, ref, atol=1e-10 * max(1.0, np.abs(ref).max()))


class TestPsdStatus:
    @pytest.mark.parametrize("mat,expected", [
        (np.diag([1.0, 2.0]), linalg.PsdStatus.POSITIVE_DEFINITE),
        (np.diag([1.0, 0.0]), linalg.PsdStatus.PSD_SINGULAR),
        (np.diag([1.0, -1.0]), linalg.PsdStatus.INDEFINITE),
        (np.diag([-1.0, 0.0]), linalg.PsdStatus.NSD_SINGULAR),
        (np.diag([-1.0, -2.0]), linalg.PsdStatus.NEGATIVE_DEFINITE),
        (np.zeros((3, 3)), linalg.PsdStatus.ZERO),
    ])
    def test_classification(self, mat, expected):
        assert linalg.psd_status(mat) == expected

    def test_relative_threshold(self):
        # a 1e-9 perturbation on a unit-scale PD matrix stays PD
        assert linalg.psd_status(np.diag([1.0, 1e-9])) == linalg.PsdStatus.PSD_SINGULAR
        assert linalg.psd_status(np.diag([1.0, 1e-3])) == linalg.PsdStatus.POSITIVE_DEFINITE

    def test_rejects_bad_tol(self):
        with pytest.raises(ValueError):
            linalg.psd_status(np.eye(2), tol=0.0)


class TestRankKernel:
    def test_rank_plus_kernel_equals_dim(self):
        rng = np.random.default_rng(23)
        for _ in range(100):
            d = int(rng.integers(2, 7))
            r = int(rng.integers(0, d + 1))
            B = rng.standard_normal((d, r))
            S = B @ B.T
            assert linalg.rank_eps(S) == r
            K = linalg.kernel_basis(S)
            assert K.shape == (d, d - r)
            if K.size:
                assert np.linalg.norm(S @ K) <= 1e-6 * max(1.0, np.linalg.norm(S))
                assert np.linalg.norm(K.T @ K - np.eye(d - r)) <= 1e-10

    def test_project_onto(self):
        basis = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
        v = np.array([1.0, 2.0, 3.0])
        assert np.allclose(linalg.project_onto(v, basis), [1.0, 2.0, 0.0])
        assert np.allclose(linalg.project_onto(v, np.zeros((3, 0))), 0.0)


class TestResultant:
    @given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5))
    def test_shared_root_gives_zero(self, r, a, b):
        # q1 = (s - r)(s - a), q2 = (s - r)(s - b) share the root s = r
        q1 = (1.0, -(r + a), r * a)
        q2 = (1.0, -(r + b), r * b)
        scale = max(1.0, abs(r), abs(a), abs(b)) ** 4
        assert abs(linalg.binary_quadratic_resultant(q1, q2)) <= 1e-9 * scale

    def test_distinct_roots_nonzero(self):
        # roots {1, 2} vs {3, 4}: resultant = prod of differences = (1-3)(1-4)(2-3)(2-4)
        q1 = (1.0, -3.0, 2.0)
        q2 = (1.0, -7.0, 12.0)
        val = linalg.binary_quadratic_resultant(q1, q2)
        assert abs(val - (-2.0) * (-3.0) * (-1.0) * (-2.0)) <= 1e-12

    def test_symmetry_up_to_sign_convention(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            q1 = tuple(rng.standard_normal(3))
            q2 = tuple(rng.standard_normal(3))
            v12 = linalg.binary_quadratic_resultant(q1, q2)
            v21 = linalg.binary_quadratic_resultant(q2, q1)
            assert abs(v12 - v21) <= 1e-10 * max(1.0, abs(v12))
