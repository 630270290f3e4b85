"""Grid-based numerical verification of the entropy inequalities.

Everything here is deliberately independent of the closed-form machinery
in :mod:`eeikit.construct`: densities live on uniform grids, entropies
come from trapezoidal quadrature, and Gaussian optima are challenged by
random search.  Agreement between the two routes is the evidence the
package offers, so none of these checks may call back into the formulas
they are meant to validate.

Reports are emitted as :class:`VerificationReport` records which
serialize to JSON lines.  Random-search trials draw from per-trial
generator streams keyed by ``(seed, trial_index)``, so a batch can be
partitioned across workers in any way without changing the result.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np
from numpy.typing import NDArray

from .construct import (
    EEIInstance,
    construct_l,
    eei_optimum,
    objective_single_noise,
    objective_two_noise,
)
from .errors import (
    GridTooCoarse,
    InconsistentDensity,
    InvalidParameter,
    UnnormalizedDensity,
)

__all__ = [
    "GridDensity",
    "EntropyEstimate",
    "VerificationReport",
    "entropy_quadrature",
    "convolve_density",
    "check_epi",
    "check_worst_noise",
    "check_eei",
    "gaussian_search",
    "variational_first_residual",
    "variational_second_form",
]

# Densities are clipped here before taking logs; keeps ln f finite
# without perturbing any integral at double precision.
_LOG_FLOOR = 1e-300
# Separate floor for expressions with squared densities in denominators,
# chosen so the square still stays inside the double range.
_SQUARE_FLOOR = 1e-154
_MASS_TOL = 1e-6


def _trapezoid_weights(n: int) -> NDArray:
    w = np.ones(n)
    w[0] = 0.5
    w[-1] = 0.5
    return w


@dataclass(frozen=True, eq=False)
class GridDensity:
    """One-dimensional probability density sampled on a uniform grid.

    ``values[i]`` is the density at ``support_lo + i * step``.  The
    trapezoidal integral must equal one within ``1e-6`` and all samples
    must be nonnegative; violations raise at construction time.
    """

    support_lo: float
    support_hi: float
    values: NDArray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 3:
            raise InvalidParameter("density needs a 1-D grid with at least 3 nodes")
        if not (np.isfinite(self.support_lo) and np.isfinite(self.support_hi)):
            raise InvalidParameter("support bounds must be finite")
        if not self.support_hi > self.support_lo:
            raise InvalidParameter("support_hi must exceed support_lo")
        if not np.all(np.isfinite(vals)):
            raise InvalidParameter("density samples must be finite")
        if np.min(vals) < 0.0:
            raise InvalidParameter("density samples must be nonnegative")
        object.__setattr__(self, "values", vals)
        mass = float(np.trapezoid(vals, dx=self.step))
        if abs(mass - 1.0) > _MASS_TOL:
            raise UnnormalizedDensity(
                f"trapezoidal mass {mass:.8f} deviates from 1 beyond {_MASS_TOL}"
            )

    @property
    def points(self) -> int:
        return int(self.values.size)

    @property
    def step(self) -> float:
        return (self.support_hi - self.support_lo) / (self.values.size - 1)

    @property
    def grid(self) -> NDArray:
        return np.linspace(self.support_lo, self.support_hi, self.points)

    def mean(self) -> float:
        x = self.grid
        return float(np.trapezoid(x * self.values, dx=self.step))

    def variance(self) -> float:
        x = self.grid
        m = self.mean()
        return float(np.trapezoid((x - m) ** 2 * self.values, dx=self.step))

    @classmethod
    def gaussian(
        cls,
        variance: float,
        mean: float = 0.0,
        points: int = 4001,
        half_width: float = 8.0,
    ) -> "GridDensity":
        """Normal density on ``mean +- half_width * sigma``."""
        if variance <= 0.0:
            raise InvalidParameter("variance must be positive")
        sigma = math.sqrt(variance)
        lo = mean - half_width * sigma
        hi = mean + half_width * sigma
        x = np.linspace(lo, hi, points)
        vals = np.exp(-0.5 * (x - mean) ** 2 / variance) / math.sqrt(
            2.0 * math.pi * variance
        )
        return cls(lo, hi, vals)

    @classmethod
    def uniform(cls, lo: float, hi: float, points: int = 4001) -> "GridDensity":
        """Uniform density with the support endpoints placed on grid nodes."""
        if not hi > lo:
            raise InvalidParameter("uniform support needs hi > lo")
        vals = np.full(points, 1.0 / (hi - lo))
        return cls(lo, hi, vals)

    @classmethod
    def mixture(
        cls,
        weight: float,
        mean_a: float,
        var_a: float,
        mean_b: float,
        var_b: float,
        points: int = 4001,
        half_width: float = 8.0,
    ) -> "GridDensity":
        """Two-component normal mixture; ``weight`` goes to component a."""
        if not 0.0 <= weight <= 1.0:
            raise InvalidParameter("mixture weight must lie in [0, 1]")
        if var_a <= 0.0 or var_b <= 0.0:
            raise InvalidParameter("component variances must be positive")
        sa, sb = math.sqrt(var_a), math.sqrt(var_b)
        lo = min(mean_a - half_width * sa, mean_b - half_width * sb)
        hi = max(mean_a + half_width * sa, mean_b + half_width * sb)
        x = np.linspace(lo, hi, points)
        va = np.exp(-0.5 * (x - mean_a) ** 2 / var_a) / math.sqrt(
            2.0 * math.pi * var_a
        )
        vb = np.exp(-0.5 * (x - mean_b) ** 2 / var_b) / math.sqrt(
            2.0 * math.pi * var_b
        )
        return cls(lo, hi, weight * va + (1.0 - weight) * vb)

    @classmethod
    def from_callable(
        cls,
        fn: Callable[[NDArray], NDArray],
        lo: float,
        hi: float,
        points: int = 4001,
        normalize: bool = True,
    ) -> "GridDensity":
        """Sample ``fn`` on the grid, optionally renormalizing its mass."""
        x = np.linspace(lo, hi, points)
        vals = np.asarray(fn(x), dtype=float)
        if vals.shape != x.shape:
            raise InvalidParameter("callable must return one value per grid node")
        vals = np.clip(vals, 0.0, None)
        if normalize:
            mass = float(np.trapezoid(vals, x))
            if not (np.isfinite(mass) and mass > 0.0):
                raise InvalidParameter("callable has nonpositive or divergent mass")
            vals = vals / mass
        return cls(lo, hi, vals)


class EntropyEstimate(NamedTuple):
    value: float
    error: float


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one numeric check, serializable as a JSON line.

    ``margin`` is oriented so that nonnegative means the claim holds:
    ``lhs - rhs`` for lower-bound claims and ``rhs - lhs`` for
    upper-bound claims.  ``passed`` is derived solely from
    ``margin >= -tol``.
    """

    check: str
    lhs: float
    rhs: float
    margin: float
    tol: float
    passed: bool
    trials: int
    seed: int
    elapsed: float
    params: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {
            "check": self.check,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "tol": self.tol,
            "passed": self.passed,
            "trials": self.trials,
            "seed": self.seed,
            "elapsed": self.elapsed,
        }
        out.update(self.params)
        return out

    def to_json_line(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


def _report(check, lhs, rhs, margin, tol, trials, seed, t0, params) -> VerificationReport:
    return VerificationReport(
        check=check,
        lhs=float(lhs),
        rhs=float(rhs),
        margin=float(margin),
        tol=float(tol),
        passed=bool(margin >= -tol),
        trials=int(trials),
        seed=int(seed),
        elapsed=time.perf_counter() - t0,
        params=params,
    )


def entropy_quadrature(d: GridDensity) -> EntropyEstimate:
    """Differential entropy in nats by trapezoidal quadrature.

    The integrand uses the convention ``0 * ln 0 = 0``.  The reported
    error is a Richardson estimate from comparing against the
    half-resolution grid, so it reflects the quadrature truncation, not
    any bias in the density samples themselves.
    """
    vals = d.values
    mass = float(np.trapezoid(vals, dx=d.step))
    if abs(mass - 1.0) > _MASS_TOL:
        raise UnnormalizedDensity(f"density mass {mass:.8f} is not 1 within {_MASS_TOL}")
    integrand = np.where(
        vals > 0.0, -vals * np.log(np.clip(vals, _LOG_FLOOR, None)), 0.0
    )
    value = float(np.trapezoid(integrand, dx=d.step))
    coarse = float(np.trapezoid(integrand[::2], dx=2.0 * d.step))
    return EntropyEstimate(value=value, error=abs(value - coarse) / 3.0)


def _halved_ends(vals: NDArray) -> NDArray:
    out = vals.copy()
    out[0] *= 0.5
    out[-1] *= 0.5
    return out


def convolve_density(d: GridDensity, sigma2: float) -> GridDensity:
    """Density of X + N(0, sigma2) on a grid enlarged by 8 sigma per side.

    Discrete convolution against a trapezoid-normalized Gaussian kernel;
    mass is preserved within 1e-8.  Grids coarser than a quarter of the
    noise deviation are rejected because the kernel would be undersampled.
    """
    if not sigma2 > 0.0:
        raise InvalidParameter("noise variance must be positive")
    sigma = math.sqrt(sigma2)
    step = d.step
    if step > sigma / 4.0:
        raise GridTooCoarse(
            f"grid step {step:.3e} exceeds sigma/4 = {sigma / 4.0:.3e}"
        )
    m = int(math.ceil(8.0 * sigma / step))
    t = np.arange(-m, m + 1) * step
    kernel = np.exp(-0.5 * t**2 / sigma2)
    kernel /= np.trapezoid(kernel, dx=step)
    out = np.convolve(_halved_ends(d.values), _halved_ends(kernel)) * step
    # The convolution of halved-end samples reproduces the trapezoid rule
    # applied to the defining integral, so the product of the two unit
    # masses carries over to the output.
    return GridDensity(d.support_lo - m * step, d.support_hi + m * step, out)


def _resample(d: GridDensity, step: float) -> GridDensity:
    """Linear resampling onto a grid with the requested step."""
    points = max(int(math.floor((d.support_hi - d.support_lo) / step)) + 1, 3)
    hi = d.support_lo + (points - 1) * step
    x = np.linspace(d.support_lo, hi, points)
    vals = np.interp(x, d.grid, d.values, left=0.0, right=0.0)
    mass = float(np.trapezoid(vals, dx=step))
    return GridDensity(d.support_lo, hi, vals / mass)


def _convolve_pair(d1: GridDensity, d2: GridDensity) -> GridDensity:
    """Density of the sum of two independent variables on a shared step."""
    if abs(d2.step - d1.step) > 1e-12 * d1.step:
        d2 = _resample(d2, d1.step)
    step = d1.step
    out = np.convolve(_halved_ends(d1.values), _halved_ends(d2.values)) * step
    mass = float(np.trapezoid(out, dx=step))
    return GridDensity(
        d1.support_lo + d2.support_lo, d1.support_hi + d2.support_hi, out / mass
    )


def check_epi(d1: GridDensity, d2: GridDensity, tol: float = 1e-4) -> VerificationReport:
    """Entropy of a sum of independent variables vs matched Gaussians.

    The comparison Gaussians carry the same individual entropies, so the
    right-hand side is the entropy of a normal whose variance is the sum
    of the two entropy powers.  The margin ``lhs - rhs`` must be
    nonnegative up to quadrature tolerance.
    """
    t0 = time.perf_counter()
    h1 = entropy_quadrature(d1).value
    h2 = entropy_quadrature(d2).value
    lhs = entropy_quadrature(_convolve_pair(d1, d2)).value
    pow1 = math.exp(2.0 * h1) / (2.0 * math.pi * math.e)
    pow2 = math.exp(2.0 * h2) / (2.0 * math.pi * math.e)
    rhs = 0.5 * math.log(2.0 * math.pi * math.e * (pow1 + pow2))
    return _report(
        "epi", lhs, rhs, lhs - rhs, tol, 1, 0, t0,
        {"h1": h1, "h2": h2, "n": 1},
    )


def _matched_gaussian(d: GridDensity) -> GridDensity:
    """Normal density with d's mean and variance on its own full-width grid.

    The comparison density gets the standard eight-deviation support
    rather than d's grid: a compactly supported candidate would truncate
    the Gaussian tails and silently change its variance.
    """
    return GridDensity.gaussian(d.variance(), mean=d.mean(), points=d.points)


def check_worst_noise(
    d_x: GridDensity, s2_wt: float, s2_wp: float, tol: float = 1e-4
) -> VerificationReport:
    """Information leaked by extra Gaussian noise, non-Gaussian vs Gaussian source.

    Both mutual informations are evaluated as entropy differences,
    ``h(X + all noise) - h(X + first noise)``, once for ``d_x`` and once
    for a Gaussian source with matching variance on the same grid.  The
    non-Gaussian source must leak at least as much.
    """
    if s2_wt <= 0.0 or s2_wp <= 0.0:
        raise InvalidParameter("noise variances must be positive")
    t0 = time.perf_counter()
    lhs = (
        entropy_quadrature(convolve_density(d_x, s2_wt + s2_wp)).value
        - entropy_quadrature(convolve_density(d_x, s2_wt)).value
    )
    g = _matched_gaussian(d_x)
    rhs = (
        entropy_quadrature(convolve_density(g, s2_wt + s2_wp)).value
        - entropy_quadrature(convolve_density(g, s2_wt)).value
    )
    return _report(
        "worst_noise", lhs, rhs, lhs - rhs, tol, 1, 0, t0,
        {"s2_wt": s2_wt, "s2_wp": s2_wp, "variance": d_x.variance(), "n": 1},
    )


def check_eei(
    d_x: GridDensity,
    mu: float,
    s2_w: float,
    r: float,
    s2_v: Optional[float] = None,
    tol: float = 1e-3,
) -> VerificationReport:
    """Quadrature objective of a candidate source vs the Gaussian optimum.

    Without ``s2_v`` the single-noise objective ``h(X) - mu h(X + W)`` is
    compared against the dominating construction at the candidate's own
    variance.  With ``s2_v`` the two-noise objective is compared against
    the certified band optimum.  The margin ``rhs - lhs`` absorbs the
    quadrature budget ``tol``.
    """
    t0 = time.perf_counter()
    var = d_x.variance()
    if var > r + 1e-9:
        raise InvalidParameter(
            f"candidate variance {var:.6f} exceeds the budget {r:.6f}"
        )
    if s2_v is None:
        lhs = (
            entropy_quadrature(d_x).value
            - mu * entropy_quadrature(convolve_density(d_x, s2_w)).value
        )
        cert = construct_l(np.array([[var]]), np.array([[s2_w]]), mu)
        rhs = objective_single_noise(cert.s_x_star, np.array([[s2_w]]), mu)
    else:
        lhs = (
            entropy_quadrature(convolve_density(d_x, s2_w)).value
            - mu * entropy_quadrature(convolve_density(d_x, s2_v)).value
        )
        instance = EEIInstance.from_scalars(mu, w=s2_w, r=r, v=s2_v)
        _, rhs, _ = eei_optimum(instance)
    return _report(
        "eei", lhs, rhs, rhs - lhs, tol, 1, 0, t0,
        {"mu": mu, "s2_w": s2_w, "s2_v": s2_v, "r": r, "variance": var, "n": 1},
    )


def _trial_direction(seed: int, index: int, n: int):
    """Raw PSD direction and scale fraction for one search trial.

    Each trial owns the generator stream ``(seed, index)``, so any
    partition of trials across workers reproduces the same samples.
    """
    rng = np.random.default_rng([seed, index])
    g = rng.standard_normal((n, n))
    return g @ g.T, float(rng.uniform())


def gaussian_search(
    instance: EEIInstance, trials: int, seed: int, tol: float = 1e-6
) -> VerificationReport:
    """Random search over feasible covariances against the constructed optimum.

    Samples random PSD directions, scales each by a uniform fraction of
    the budget trace, and moves infeasible draws back inside the
    constraint by bisecting the scale.  The best sampled objective must
    not beat the certified optimum by more than ``tol``.
    """
    if trials < 1:
        raise InvalidParameter("at least one trial is required")
    t0 = time.perf_counter()
    w, v, r, mu = instance.s_w, instance.s_v, instance.r, instance.mu
    n = instance.dim
    mats = np.empty((trials, n, n))
    scales = np.empty(trials)
    tr_r = float(np.trace(r))
    for i in range(trials):
        a, frac = _trial_direction(seed, i, n)
        mats[i] = a
        scales[i] = frac * tr_r / max(float(np.trace(a)), 1e-30)

    def feasible(s):
        gap = r[None, :, :] - s[:, None, None] * mats
        return np.linalg.eigvalsh(gap)[:, 0] >= 0.0

    ok = feasible(scales)
    if not np.all(ok):
        lo = np.where(ok, scales, 0.0)
        hi = scales.copy()
        for _ in range(30):
            mid = 0.5 * (lo + hi)
            good = feasible(mid)
            lo = np.where(good, mid, lo)
            hi = np.where(good, hi, mid)
        scales = lo
    sigma = scales[:, None, None] * mats

    def stacked_entropy(mats_stack):
        sign, logdet = np.linalg.slogdet(mats_stack)
        logdet = np.where(sign > 0, logdet, -np.inf)
        return 0.5 * (n * (math.log(2.0 * math.pi) + 1.0) + logdet)

    if v is None:
        values = stacked_entropy(sigma) - mu * stacked_entropy(sigma + w[None])
        star = construct_l(r, w, mu).s_x_star
        rhs = objective_single_noise(star, w, mu)
    else:
        values = stacked_entropy(sigma + w[None]) - mu * stacked_entropy(
            sigma + v[None]
        )
        _, rhs, _ = eei_optimum(instance)
    best = int(np.argmax(values))
    lhs = float(values[best])
    return _report(
        "search", lhs, rhs, rhs - lhs, tol, trials, seed, t0,
        {"mu": mu, "n": n, "best_trial": best},
    )


def _subsample(idx_count: int, max_nodes: int) -> slice:
    stride = max(1, int(math.ceil(idx_count / max_nodes)))
    return slice(0, idx_count, stride)


def _interp_density(d: GridDensity, points: NDArray) -> NDArray:
    return np.interp(points, d.grid, d.values, left=0.0, right=0.0)


def variational_first_residual(
    fx: GridDensity,
    fy: GridDensity,
    fv: GridDensity,
    mu: float,
    max_nodes: int = 512,
) -> float:
    """Weighted RMS residual of the first-variation stationarity equation.

    The output-density multiplier is pinned by the output variation to
    ``-mu * (fx conv fv)(y) / fy(y)``; the remaining multipliers (the
    constant, the entropy-constraint coefficient, and the quadratic
    moment coefficients) are fitted by least squares weighted by
    ``fx(x) * fv(y - x)``.  Gaussian triples satisfy the equation up to
    grid error; non-stationary triples leave an order-one residual.
    """
    conv = _convolve_pair(fx, fv)
    conv_on_fy = _interp_density(conv, fy.grid)
    dev = float(np.max(np.abs(fy.values - conv_on_fy)))
    if dev > 1e-4:
        raise InconsistentDensity(
            f"fy deviates from fx conv fv by {dev:.3e} in sup norm"
        )
    sl_x = _subsample(fx.points, max_nodes)
    sl_y = _subsample(fy.points, max_nodes)
    x = fx.grid[sl_x]
    y = fy.grid[sl_y]
    fxv = fx.values[sl_x]
    fyv = fy.values[sl_y]
    lam = -mu * conv_on_fy[sl_y] / np.clip(fyv, _LOG_FLOOR, None)
    fvxy = _interp_density(fv, y[None, :] - x[:, None])
    weight = fxv[:, None] * fvxy
    ln_fx = np.log(np.clip(fxv, _LOG_FLOOR, None))
    ln_fy = np.log(np.clip(fyv, _LOG_FLOOR, None))
    ln_fv = np.log(np.clip(fvxy, _LOG_FLOOR, None))
    raw = (
        mu * ln_fy[None, :]
        - ln_fx[:, None]
        - mu * (mu - 1.0) * ln_fv
        - lam[None, :]
    )
    ones = np.ones_like(weight)
    basis = np.stack(
        [
            ones,
            -ln_fx[:, None] * ones,
            x[:, None] * y[None, :] - (x**2)[:, None] * ones,
            (x**2)[:, None] * ones,
            ones * (y**2)[None, :],
        ],
        axis=-1,
    )
    sqw = np.sqrt(weight).ravel()
    design = basis.reshape(-1, 5) * sqw[:, None]
    target = -(raw.ravel() * sqw)
    coef, *_ = np.linalg.lstsq(design, target, rcond=None)
    resid = design @ coef - target
    total = float(np.sum(weight))
    return float(math.sqrt(float(np.sum(resid**2)) / total))


def variational_second_form(
    fx: GridDensity,
    fy: GridDensity,
    fv: GridDensity,
    mu: float,
    hx: NDArray,
    hy: NDArray,
    alpha1: float,
    max_nodes: int = 512,
) -> float:
    """Second-variation quadratic form for a perturbation pair.

    Evaluates the double integral of
    ``-(1 - alpha1) fv hx^2 / fx + 2 mu fv hx hy / fy
    - mu fx fv hy^2 / fy^2``
    over the tensor grid.  At ``alpha1 = 1 - mu`` the integrand is a
    completed square and the value cannot be positive beyond rounding;
    the direction ``hx = fx * hy / fy`` annihilates it.
    """
    if alpha1 < 1.0 - mu - 1e-12:
        raise InvalidParameter("alpha1 must be at least 1 - mu")
    hx = np.asarray(hx, dtype=float)
    hy = np.asarray(hy, dtype=float)
    if hx.shape != (fx.points,) or hy.shape != (fy.points,):
        raise InvalidParameter("perturbations must match the density grids")
    sl_x = _subsample(fx.points, max_nodes)
    sl_y = _subsample(fy.points, max_nodes)
    x = fx.grid[sl_x]
    y = fy.grid[sl_y]
    fxv = np.clip(fx.values[sl_x], _SQUARE_FLOOR, None)
    fyv = np.clip(fy.values[sl_y], _SQUARE_FLOOR, None)
    hxv = hx[sl_x]
    hyv = hy[sl_y]
    fvxy = _interp_density(fv, y[None, :] - x[:, None])
    term_xx = -(1.0 - alpha1) * (hxv**2 / fxv)[:, None] * fvxy
    term_xy = 2.0 * mu * hxv[:, None] * hyv[None, :] * fvxy / fyv[None, :]
    term_yy = -mu * fxv[:, None] * fvxy * (hyv**2 / fyv**2)[None, :]
    integrand = term_xx + term_xy + term_yy
    dx = x[1] - x[0]
    dy = y[1] - y[0]
    wx = _trapezoid_weights(x.size) * dx
    wy = _trapezoid_weights(y.size) * dy
    return float(wx @ integrand @ wy)
