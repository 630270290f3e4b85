"""Tests for the LMMSE bound and the private-message broadcast design."""

import math

import numpy as np
import pytest

from eeikit import (
    BroadcastInstance,
    DimensionMismatch,
    NotPositiveDefinite,
    SingularCovariance,
    ThresholdUnreachable,
    design_private_message,
    gaussian_conditional_cov,
    lmmse_matrix,
    mi_lower_bound,
    psd_leq,
    symmetrize,
)


def _rand_pd(rng, n, lo=0.05):
    f = rng.normal(size=(n, n))
    return symmetrize(f @ f.T) + lo * np.eye(n)


class TestLmmseMatrix:
    def test_scalar_half(self):
        out = lmmse_matrix(np.array([[1.0]]), np.array([[1.0]]))
        assert out[0, 0] == pytest.approx(0.5, abs=1e-14)

    def test_matches_conditional_covariance(self):
        rng = np.random.default_rng(31)
        for _ in range(30):
            n = int(rng.integers(1, 5))
            sx = _rand_pd(rng, n)
            sz = _rand_pd(rng, n)
            np.testing.assert_allclose(
                lmmse_matrix(sx, sz), gaussian_conditional_cov(sx, sz), atol=1e-10
            )

    def test_psd_and_below_signal(self):
        rng = np.random.default_rng(37)
        for _ in range(30):
            n = int(rng.integers(1, 5))
            sx = _rand_pd(rng, n)
            sz = _rand_pd(rng, n)
            e = lmmse_matrix(sx, sz)
            assert np.linalg.eigvalsh(e).min() >= -1e-10
            assert psd_leq(e, sx, tol=1e-8)

    def test_blockwise_scalar_values(self):
        out = lmmse_matrix(np.diag([1.0, 4.0]), np.eye(2))
        np.testing.assert_allclose(out, np.diag([0.5, 0.8]), atol=1e-12)

    def test_zero_source_estimates_itself(self):
        out = lmmse_matrix(np.zeros((2, 2)), np.eye(2))
        np.testing.assert_allclose(out, np.zeros((2, 2)), atol=1e-14)

    def test_errors(self):
        with pytest.raises(DimensionMismatch):
            lmmse_matrix(np.eye(2), np.eye(3))
        with pytest.raises(SingularCovariance):
            lmmse_matrix(np.zeros((2, 2)), np.zeros((2, 2)))


class TestMiLowerBound:
    def test_scalar_half_ln_two(self):
        assert mi_lower_bound(np.array([[1.0]]), np.array([[1.0]])) == pytest.approx(
            0.5 * math.log(2.0), abs=1e-12
        )

    def test_equals_gaussian_mi(self):
        rng = np.random.default_rng(41)
        for _ in range(100):
            n = int(rng.integers(1, 5))
            sx = _rand_pd(rng, n)
            r = _rand_pd(rng, n)
            mi_gauss = 0.5 * (np.linalg.slogdet(sx + r)[1] - np.linalg.slogdet(r)[1])
            assert abs(mi_lower_bound(sx, r) - mi_gauss) <= 1e-10

    def test_singular_budget_rejected(self):
        with pytest.raises(SingularCovariance):
            mi_lower_bound(np.array([[1.0]]), np.array([[0.0]]))


class TestBroadcastInstance:
    def test_validation(self):
        with pytest.raises(NotPositiveDefinite):
            BroadcastInstance(np.array([[0.0]]), np.array([[2.0]]), np.array([[0.5]]))
        with pytest.raises(NotPositiveDefinite):
            BroadcastInstance(np.array([[0.5]]), np.array([[-2.0]]), np.array([[0.5]]))

    def test_default_direction_is_budget(self):
        inst = BroadcastInstance(np.array([[0.5]]), np.array([[2.0]]), np.array([[0.5]]))
        np.testing.assert_allclose(inst.direction, inst.r)
        assert inst.dim == 1


class TestDesign:
    def test_scalar_reference_instance(self):
        # direction fixed to the identity so t itself is the signal variance
        inst = BroadcastInstance(
            np.array([[0.5]]), np.array([[2.0]]), np.array([[0.5]]), direction=np.array([[1.0]])
        )
        design = design_private_message(inst)
        assert design.t_star == pytest.approx(2.0 / 3.0, abs=1e-8)
        assert design.trace_mse_rx1 == pytest.approx(2.0 / 7.0, abs=1e-8)
        # receiver 2 is held exactly at the power budget
        assert design.trace_mse_rx2 == pytest.approx(0.5, abs=1e-8)
        assert design.trace_mse_rx1 < design.trace_mse_rx2
        assert design.chain_residual <= 1e-8
        assert design.alpha == design.t_star

    def test_identical_channels_sit_on_the_boundary(self):
        inst = BroadcastInstance(np.array([[1.0]]), np.array([[1.0]]), np.array([[0.5]]))
        design = design_private_message(inst)
        assert design.trace_mse_rx1 == pytest.approx(0.5, abs=1e-8)
        assert design.trace_mse_rx2 == pytest.approx(0.5, abs=1e-8)

    def test_threshold_unreachable(self):
        inst = BroadcastInstance(np.array([[0.5]]), np.array([[2.0]]), np.array([[3.0]]))
        with pytest.raises(ThresholdUnreachable):
            design_private_message(inst)

    def test_matrix_instance(self):
        inst = BroadcastInstance(
            0.4 * np.eye(2),
            np.array([[2.0, 0.3], [0.3, 1.5]]),
            np.array([[0.6, 0.1], [0.1, 0.5]]),
        )
        design = design_private_message(inst)
        tr_r = float(np.trace(inst.r))
        assert design.trace_mse_rx2 == pytest.approx(tr_r, abs=1e-8)
        assert design.trace_mse_rx1 < tr_r
        assert np.linalg.eigvalsh(design.s_x_star).min() >= -1e-10
        assert design.chain_residual <= 1e-8

    def test_posterior_trace_monotone_in_t(self):
        # the bisection is well-posed because the receiver-2 error grows with t
        z2 = np.array([[2.0, 0.3], [0.3, 1.5]])
        direction = np.array([[0.6, 0.1], [0.1, 0.5]])
        traces = [
            float(np.trace(gaussian_conditional_cov(t * direction, z2)))
            for t in (0.25, 0.5, 1.0, 2.0, 4.0)
        ]
        assert all(a < b for a, b in zip(traces, traces[1:]))
        assert traces[-1] < float(np.trace(z2))

    def test_as_dict_round_trip(self):
        inst = BroadcastInstance(
            np.array([[0.5]]), np.array([[2.0]]), np.array([[0.5]]), direction=np.array([[1.0]])
        )
        blob = design_private_message(inst).as_dict()
        assert blob["t_star"] == pytest.approx(2.0 / 3.0, abs=1e-8)
        assert set(blob) >= {"s_x_star", "t_star", "trace_mse_rx1", "trace_mse_rx2"}
