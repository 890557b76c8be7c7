"""Brute-force oracles: grid scan, sphere sampling, hull membership."""

import numpy as np
import pytest

from sdpexact import model, oracles
from conftest import q, make_explicit_instance


class TestGrid:
    def test_trust_region_minimum(self):
        inst = model.QcqpInstance(
            1, q([[-1.0]], [0], 0), (q([[1.0]], [0], -1.0),))
        val, arg = oracles.grid_opt(inst, [(-2.0, 2.0)])
        assert abs(val - (-1.0)) <= 1e-2
        assert abs(abs(arg[0]) - 1.0) <= 2e-2

    def test_explicit_instance(self):
        val, arg = oracles.grid_opt(make_explicit_instance(), [(-2.0, 2.0)] * 2)
        assert abs(val - 2.0) <= 1e-2

    def test_deterministic(self):
        inst = make_explicit_instance()
        a = oracles.grid_opt(inst, [(-2.0, 2.0)] * 2)
        b = oracles.grid_opt(inst, [(-2.0, 2.0)] * 2)
        assert a[0] == b[0]
        assert np.array_equal(a[1], b[1])

    def test_infeasible_returns_inf(self):
        inst = model.QcqpInstance(1, q([[1.0]], [0], 0), (q([[1.0]], [0], 1.0),))
        val, arg = oracles.grid_opt(inst, [(-2.0, 2.0)])
        assert np.isinf(val) and arg is None

    def test_equality_band_keeps_representatives(self):
        # x^2 = 1 is measure zero; the slack band must still find it
        inst = model.QcqpInstance(
            1, q([[1.0]], [1.0], 0), equalities=(q([[1.0]], [0], -1.0),))
        val, arg = oracles.grid_opt(inst, [(-2.0, 2.0)])
        assert abs(val - (-1.0)) <= 5e-2  # minimum at x = -1: 1 - 2 = -1
        assert arg[0] < 0

    def test_dimension_cap(self):
        inst = model.QcqpInstance(4, q(np.eye(4), np.zeros(4), 0))
        with pytest.raises(ValueError):
            oracles.grid_opt(inst, [(-1, 1)] * 4)


class TestSphere:
    def test_unconstrained_min_eigenvalue(self):
        C = np.diag([1.0, 2.0, 3.0])
        val, z = oracles.sphere_min_rank_one([], C)
        assert abs(val - 1.0) <= 1e-6
        assert abs(abs(z[0]) - 1.0) <= 1e-3

    def test_constraint_respected(self):
        # forbid the best eigendirection: z1^2 <= z2^2 forces a higher value
        C = np.diag([1.0, 2.0, 3.0])
        M = np.diag([1.0, -1.0, 0.0])
        val, z = oracles.sphere_min_rank_one([M], C)
        assert val >= 1.0 - 1e-9
        assert abs(val - 1.5) <= 1e-5  # optimum at z1 = z2 = 1/sqrt(2)
        assert float(z @ M @ z) <= 1e-6

    def test_thin_feasible_set_recovered(self):
        # M1 + M2 = diag(0,1,0) is PSD, so feasible directions live in its
        # kernel; individually feasible ones reduce to z = +-e3 only
        M1 = np.diag([1.0, -1.0, 0.0])
        M2 = np.diag([-1.0, 2.0, 0.0])
        C = np.diag([5.0, 2.0, 1.0])
        val, z = oracles.sphere_min_rank_one([M1, M2], C)
        assert abs(val - 1.0) <= 1e-6
        assert abs(abs(z[2]) - 1.0) <= 1e-4

    def test_empty_feasible_set(self):
        val, z = oracles.sphere_min_rank_one([np.eye(2)], np.eye(2))
        assert np.isinf(val) and z is None

    def test_jointly_empty_feasible_set(self):
        # the kernel of the PSD combination is individually infeasible
        M1 = np.diag([1.0, 1.0, -1.0])
        M2 = np.diag([0.0, 0.0, 1.0])
        val, z = oracles.sphere_min_rank_one([M1, M2], np.diag([5.0, 2.0, 1.0]))
        assert np.isinf(val) and z is None

    def test_seed_determinism(self):
        C = np.diag([1.0, -1.0])
        a = oracles.sphere_min_rank_one([], C, samples=4096, seed=5)
        b = oracles.sphere_min_rank_one([], C, samples=4096, seed=5)
        assert a[0] == b[0]


class TestMembership:
    def test_boundary_point_in_hull(self):
        inst = make_explicit_instance()
        assert oracles.conv_membership_sample(inst, [0.0, 0.0], 2.0) == "LIKELY_IN"

    def test_point_below_hull_rejected(self):
        inst = make_explicit_instance()
        assert oracles.conv_membership_sample(inst, [0.0, 0.0], 1.5) == "NOT_SHOWN"

    def test_vertical_ray_included(self):
        inst = make_explicit_instance()
        assert oracles.conv_membership_sample(inst, [0.0, 0.0], 50.0) == "LIKELY_IN"


class TestCompare:
    def test_explicit_instance_flagged_exact(self):
        rep = oracles.compare_opt(make_explicit_instance())
        assert rep.exactness_flag
        assert abs(rep.opt_grid - 2.0) <= 1e-2
        assert abs(rep.opt_sdp - 2.0) <= 1e-4

    def test_relaxation_below_grid(self):
        # indefinite objective over the ball: relaxation is exact here too,
        # and the grid value can never undercut it by more than the tolerance
        inst = model.QcqpInstance(
            2, q(np.diag([1.0, -1.0]), [0.0, 0.5], 0),
            (q(np.eye(2), [0, 0], -1.0),))
        rep = oracles.compare_opt(inst)
        assert rep.opt_grid >= rep.opt_sdp - 1e-2 * max(1.0, abs(rep.opt_grid))
