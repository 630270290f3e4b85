"""Tests for the quadrature densities, entropy checks, and variational probes."""

import json
import math

import numpy as np
import pytest

from eeikit import (
    EEIInstance,
    GridDensity,
    GridTooCoarse,
    InconsistentDensity,
    InvalidParameter,
    UnnormalizedDensity,
    check_eei,
    check_epi,
    check_worst_noise,
    convolve_density,
    entropy_quadrature,
    gaussian_search,
    variational_first_residual,
    variational_second_form,
)
from eeikit.oracle import _convolve_pair

# Entropy references computed with adaptive quadrature (scipy.integrate.quad)
# on the closed-form densities, frozen here so the grid code is tested against
# an independent integration route.
H_STD_NORMAL = 1.4189385332046727
H_NORMAL_VAR2 = 1.7655121234846454
H_MIXTURE = 2.0516587269415547  # 0.5 N(-2,1) + 0.5 N(2,1)
H_UNIFORM_PLUS_N025 = 0.8695024788553822  # U[0,1] noise var 0.25
H_MIXTURE_PLUS_N1 = 2.2655842595514906


class TestGridDensity:
    def test_gaussian_moments_and_mass(self):
        d = GridDensity.gaussian(2.0, mean=-1.0)
        assert np.trapezoid(d.values, dx=d.step) == pytest.approx(1.0, abs=1e-9)
        assert d.mean() == pytest.approx(-1.0, abs=1e-9)
        assert d.variance() == pytest.approx(2.0, rel=1e-6)

    def test_uniform_grid_hits_endpoints(self):
        d = GridDensity.uniform(0.25, 1.75)
        assert d.grid[0] == pytest.approx(0.25)
        assert d.grid[-1] == pytest.approx(1.75)
        assert d.values.max() == pytest.approx(1.0 / 1.5, rel=1e-12)
        assert d.variance() == pytest.approx(1.5**2 / 12.0, rel=1e-6)

    def test_mixture_moments(self):
        d = GridDensity.mixture(0.5, -2.0, 1.0, 2.0, 1.0)
        assert d.mean() == pytest.approx(0.0, abs=1e-9)
        assert d.variance() == pytest.approx(5.0, rel=1e-6)

    def test_from_callable_normalizes(self):
        d = GridDensity.from_callable(lambda x: np.exp(-x), 0.0, 3.0, points=1001)
        assert np.trapezoid(d.values, dx=d.step) == pytest.approx(1.0, abs=1e-12)

    def test_unnormalized_rejected(self):
        with pytest.raises(UnnormalizedDensity):
            GridDensity(0.0, 1.0, np.full(11, 3.0))
        with pytest.raises(UnnormalizedDensity):
            GridDensity.from_callable(lambda x: np.exp(-x), 0.0, 3.0, normalize=False)

    def test_bad_support_and_values(self):
        with pytest.raises(InvalidParameter):
            GridDensity.uniform(1.0, 1.0)
        with pytest.raises(InvalidParameter):
            GridDensity(0.0, 1.0, np.array([1.0, 1.0]))  # too few nodes
        bad = np.full(11, 1.0)
        bad[3] = -0.5
        with pytest.raises(InvalidParameter):
            GridDensity(0.0, 1.0, bad)


class TestEntropyQuadrature:
    def test_frozen_references(self):
        assert entropy_quadrature(GridDensity.gaussian(1.0)).value == pytest.approx(
            H_STD_NORMAL, abs=1e-9
        )
        assert entropy_quadrature(GridDensity.gaussian(2.0)).value == pytest.approx(
            H_NORMAL_VAR2, abs=1e-9
        )
        mix = GridDensity.mixture(0.5, -2.0, 1.0, 2.0, 1.0)
        assert entropy_quadrature(mix).value == pytest.approx(H_MIXTURE, abs=1e-9)

    def test_uniform_is_exact_zero(self):
        assert entropy_quadrature(GridDensity.uniform(0.0, 1.0)).value == 0.0

    def test_error_estimate_nonnegative(self):
        est = entropy_quadrature(GridDensity.mixture(0.3, -1.0, 0.5, 1.5, 2.0))
        assert est.error >= 0.0
        assert est.error < 1e-4

    def test_second_order_convergence_on_truncated_density(self):
        # the support edges introduce jumps, so successive dyadic refinements
        # shrink the error by about 4x per halving of the step
        vals = []
        for pts in (501, 1001, 2001):
            d = GridDensity.from_callable(lambda x: np.exp(-x), 0.0, 3.0, points=pts)
            vals.append(entropy_quadrature(d).value)
        ratio = abs(vals[0] - vals[1]) / abs(vals[1] - vals[2])
        assert 3.5 <= ratio <= 4.5


class TestConvolution:
    def test_uniform_plus_gaussian_reference(self):
        out = convolve_density(GridDensity.uniform(0.0, 1.0), 0.25)
        assert entropy_quadrature(out).value == pytest.approx(H_UNIFORM_PLUS_N025, abs=1e-7)

    def test_mixture_plus_gaussian_reference(self):
        mix = GridDensity.mixture(0.5, -2.0, 1.0, 2.0, 1.0)
        out = convolve_density(mix, 1.0)
        assert entropy_quadrature(out).value == pytest.approx(H_MIXTURE_PLUS_N1, abs=1e-7)

    def test_mass_mean_variance_propagate(self):
        d = GridDensity.mixture(0.4, -1.0, 0.8, 2.0, 1.5)
        out = convolve_density(d, 0.6)
        assert np.trapezoid(out.values, dx=out.step) == pytest.approx(1.0, abs=1e-9)
        assert out.mean() == pytest.approx(d.mean(), abs=1e-6)
        assert out.variance() == pytest.approx(d.variance() + 0.6, rel=1e-5)

    def test_grid_too_coarse(self):
        with pytest.raises(GridTooCoarse):
            convolve_density(GridDensity.uniform(0.0, 1.0, points=5), 0.01)


class TestEpiCheck:
    def test_gaussian_equality(self):
        rep = check_epi(GridDensity.gaussian(1.0), GridDensity.gaussian(3.0))
        assert abs(rep.margin) <= 1e-5
        assert rep.passed

    def test_two_uniforms_strictly_above(self):
        rep = check_epi(GridDensity.uniform(0.0, 1.0), GridDensity.uniform(-1.0, 1.0))
        assert rep.margin > 1e-3
        assert rep.check == "epi"

    def test_margin_matches_sides(self):
        rep = check_epi(GridDensity.mixture(0.5, -2.0, 1.0, 2.0, 1.0), GridDensity.gaussian(1.0))
        assert rep.margin == pytest.approx(rep.lhs - rep.rhs, abs=1e-15)
        assert rep.margin > 0.0


class TestWorstNoiseCheck:
    def test_gaussian_equality(self):
        rep = check_worst_noise(GridDensity.gaussian(1.0), 0.5, 0.5)
        assert abs(rep.margin) <= 1e-5

    def test_uniform_above(self):
        rep = check_worst_noise(GridDensity.uniform(0.0, 2.0), 0.7, 0.4)
        assert rep.margin >= -1e-4
        assert rep.passed


class TestEeiCheck:
    def test_single_noise_gaussian_equality(self):
        # with r = 1, w = 1, mu = 2 the constructed optimum keeps variance 1
        rep = check_eei(GridDensity.gaussian(1.0), 2.0, 1.0, 1.0)
        assert abs(rep.margin) <= 1e-4

    def test_two_noise_gaussian_equality(self):
        rep = check_eei(GridDensity.gaussian(2.0), 2.0, 1.0, 10.0, s2_v=4.0)
        assert abs(rep.margin) <= 1e-4

    def test_uniform_below_optimum(self):
        rep = check_eei(GridDensity.uniform(0.0, 1.0), 2.0, 1.0, 1.0)
        assert rep.margin > 0.0
        assert rep.passed

    def test_mixture_below_optimum_two_noise(self):
        mix = GridDensity.mixture(0.5, -2.0, 1.0, 2.0, 1.0)
        rep = check_eei(mix, 2.0, 1.0, 10.0, s2_v=4.0)
        assert rep.margin > 0.0
        assert rep.rhs == pytest.approx(-2.661391858098673, abs=1e-9)

    def test_variance_budget_enforced(self):
        with pytest.raises(InvalidParameter):
            check_eei(GridDensity.uniform(0.0, 4.0), 2.0, 1.0, 0.5)


class TestGaussianSearch:
    def test_deterministic_given_seed(self):
        inst = EEIInstance.from_scalars(2.0, 1.0, 10.0, 4.0)
        a = gaussian_search(inst, 500, 7).as_dict()
        b = gaussian_search(inst, 500, 7).as_dict()
        a.pop("elapsed")
        b.pop("elapsed")
        assert a == b

    def test_never_beats_optimum_scalar(self):
        inst = EEIInstance.from_scalars(2.0, 1.0, 10.0, 4.0)
        rep = gaussian_search(inst, 2000, 11)
        assert rep.margin >= -1e-6
        assert rep.margin <= 1e-3  # the sampler does get close
        assert 0 <= rep.params["best_trial"] < 2000

    def test_never_beats_optimum_matrix(self):
        inst = EEIInstance(
            2.5,
            np.array([[1.0, 0.3], [0.3, 2.0]]),
            np.array([[4.0, 0.5], [0.5, 3.0]]),
            np.array([[2.0, 0.0], [0.0, 2.5]]),
        )
        rep = gaussian_search(inst, 1500, 13)
        assert rep.margin >= -1e-6
        assert rep.params["n"] == 2

    def test_single_noise_route(self):
        rep = gaussian_search(EEIInstance.from_scalars(2.0, 1.0, 2.0), 500, 5)
        assert rep.margin >= -1e-6

    def test_degenerate_constraint(self):
        rep = gaussian_search(EEIInstance.from_scalars(2.0, 1.0, 1e-8, 4.0), 200, 5)
        assert abs(rep.margin) <= 1e-6


class TestVariationalFirstResidual:
    def test_gaussian_triple_is_stationary(self):
        fx = GridDensity.gaussian(1.0)
        fv = GridDensity.gaussian(0.5)
        fy = _convolve_pair(fx, fv)
        assert variational_first_residual(fx, fy, fv, 2.0) <= 1e-3

    def test_non_gaussian_candidate_is_not(self):
        fv = GridDensity.gaussian(0.5)
        fx_good = GridDensity.gaussian(1.0)
        fx_bad = GridDensity.uniform(-math.sqrt(3.0), math.sqrt(3.0))
        good = variational_first_residual(fx_good, _convolve_pair(fx_good, fv), fv, 2.0)
        bad = variational_first_residual(fx_bad, _convolve_pair(fx_bad, fv), fv, 2.0)
        assert bad >= 100.0 * good

    def test_inconsistent_output_density_rejected(self):
        fx = GridDensity.gaussian(1.0)
        fv = GridDensity.gaussian(0.5)
        with pytest.raises(InconsistentDensity):
            variational_first_residual(fx, GridDensity.gaussian(9.0), fv, 2.0)


class TestVariationalSecondForm:
    @staticmethod
    def _smooth(rng, grid):
        return np.sin(rng.uniform(0.3, 2.0) * grid + rng.normal()) * np.exp(
            -(grid**2) / rng.uniform(2.0, 9.0)
        )

    def test_negative_semidefinite_at_critical_weight(self):
        mu = 2.0
        fx = GridDensity.gaussian(1.5)
        fv = GridDensity.gaussian(0.7)
        fy = _convolve_pair(fx, fv)
        rng = np.random.default_rng(17)
        for _ in range(10):
            hx = self._smooth(rng, fx.grid)
            hy = self._smooth(rng, fy.grid)
            assert variational_second_form(fx, fy, fv, mu, hx, hy, 1.0 - mu) <= 1e-10

    def test_null_ray_vanishes(self):
        mu = 3.0
        fx = GridDensity.gaussian(1.0)
        fv = GridDensity.gaussian(1.0)
        fy = _convolve_pair(fx, fv)
        val = variational_second_form(fx, fy, fv, mu, 0.37 * fx.values, 0.37 * fy.values, 1.0 - mu)
        assert abs(val) <= 1e-10

    def test_weight_precondition(self):
        fx = GridDensity.gaussian(1.0)
        fv = GridDensity.gaussian(1.0)
        fy = _convolve_pair(fx, fv)
        with pytest.raises(InvalidParameter):
            variational_second_form(fx, fy, fv, 2.0, fx.values, fy.values, -1.5)

    def test_grid_shape_enforced(self):
        fx = GridDensity.gaussian(1.0)
        fv = GridDensity.gaussian(1.0)
        fy = _convolve_pair(fx, fv)
        with pytest.raises(InvalidParameter):
            variational_second_form(fx, fy, fv, 2.0, np.zeros(7), np.zeros(fy.points), -1.0)


def test_report_json_line_is_sorted_and_parseable():
    rep = check_epi(GridDensity.gaussian(1.0), GridDensity.gaussian(1.0))
    obj = json.loads(rep.to_json_line())
    assert list(obj) == sorted(obj)
    assert obj["check"] == "epi"
    assert obj["passed"] is True
