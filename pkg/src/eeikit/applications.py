"""Application solvers built on the Gaussian entropy machinery.

Two consumers of the extremal results live here: a covariance design for
broadcasting a private message past an eavesdropping second receiver,
and the link between linear minimum mean-square error and mutual
information used for worst-case noise bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from .errors import (
    DimensionMismatch,
    InvalidParameter,
    NotPositiveDefinite,
    SeparationFailed,
    SingularCovariance,
    ThresholdUnreachable,
)
from .gaussmat import MarkovTriple, markov_residual, symmetrize

__all__ = [
    "BroadcastInstance",
    "BroadcastDesign",
    "design_private_message",
    "lmmse_matrix",
    "mi_lower_bound",
]


def _as_square(a, name: str) -> NDArray:
    m = np.asarray(a, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidParameter(f"{name} must be a square matrix")
    if not np.all(np.isfinite(m)):
        raise InvalidParameter(f"{name} must be finite")
    return symmetrize(m)


def lmmse_matrix(s_x, s_z) -> NDArray:
    """Error covariance of the best linear estimate of X from X + Z.

    Returns ``s_x - s_x (s_x + s_z)^{-1} s_x``.  The observation
    covariance ``s_x + s_z`` must be invertible.
    """
    x = _as_square(s_x, "s_x")
    z = _as_square(s_z, "s_z")
    if x.shape != z.shape:
        raise DimensionMismatch(f"shape mismatch: {x.shape} vs {z.shape}")
    s_y = x + z
    sign, _ = np.linalg.slogdet(s_y)
    if sign <= 0:
        raise SingularCovariance("observation covariance is singular")
    return symmetrize(x - x @ np.linalg.solve(s_y, x))


def mi_lower_bound(s_x, r) -> float:
    """Worst-case mutual information floor from the LMMSE error, in nats.

    Returns ``-0.5 ln det(lmmse) + 0.5 ln det(s_x)``, which coincides
    with the Gaussian channel information ``0.5 ln det(s_x + r) / det r``
    when the noise covariance equals ``r``, and lower-bounds the true
    information for any noise of covariance at most ``r``.
    """
    x = _as_square(s_x, "s_x")
    err = lmmse_matrix(x, r)
    sign_e, logdet_e = np.linalg.slogdet(err)
    sign_x, logdet_x = np.linalg.slogdet(x)
    if sign_e <= 0 or sign_x <= 0:
        raise SingularCovariance("LMMSE error matrix is singular")
    return float(0.5 * (logdet_x - logdet_e))


def _min_eig(a: NDArray) -> float:
    return float(np.linalg.eigvalsh(a)[0])


@dataclass(frozen=True)
class BroadcastInstance:
    """Two-receiver Gaussian channel with a trace threshold on the eavesdropper.

    Receiver 1 is the intended one (noise ``s_z1``), receiver 2 the one
    that must be kept above the estimation threshold ``Tr r``.  The
    transmit covariance is searched along the ray ``t * direction``;
    the direction defaults to ``r``.
    """

    s_z1: NDArray
    s_z2: NDArray
    r: NDArray
    direction: Optional[NDArray] = None

    def __post_init__(self):
        z1 = _as_square(self.s_z1, "s_z1")
        z2 = _as_square(self.s_z2, "s_z2")
        r = _as_square(self.r, "r")
        if not (z1.shape == z2.shape == r.shape):
            raise DimensionMismatch("all broadcast matrices must share one dimension")
        if _min_eig(z1) <= 0.0 or _min_eig(z2) <= 0.0:
            raise NotPositiveDefinite("receiver noise covariances must be PD")
        if float(np.trace(r)) <= 0.0:
            raise InvalidParameter("threshold matrix needs a positive trace")
        d = self.direction
        d = r.copy() if d is None else _as_square(d, "direction")
        if d.shape != r.shape:
            raise DimensionMismatch("direction must match the instance dimension")
        if _min_eig(d) < -1e-12 * max(1.0, float(np.max(np.abs(d)))):
            raise NotPositiveDefinite("search direction must be PSD")
        if float(np.trace(d)) <= 0.0:
            raise InvalidParameter("search direction must be nonzero")
        object.__setattr__(self, "s_z1", z1)
        object.__setattr__(self, "s_z2", z2)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "direction", d)

    @property
    def dim(self) -> int:
        return self.s_z1.shape[0]


@dataclass(frozen=True)
class BroadcastDesign:
    """Transmit covariance pinning receiver 2 to the threshold.

    ``alpha`` is the realized scaling constant along the search ray,
    identical to ``t_star``.  ``chain_residual`` certifies that the
    intended receiver's posterior is unchanged by the (here trivial)
    noise reduction, via the conditional-independence kernel.
    """

    s_x_star: NDArray
    t_star: float
    trace_mse_rx1: float
    trace_mse_rx2: float
    alpha: float
    chain_residual: float

    def as_dict(self) -> dict:
        return {
            "s_x_star": self.s_x_star.tolist(),
            "t_star": self.t_star,
            "trace_mse_rx1": self.trace_mse_rx1,
            "trace_mse_rx2": self.trace_mse_rx2,
            "alpha": self.alpha,
            "chain_residual": self.chain_residual,
        }


def design_private_message(inst: BroadcastInstance) -> BroadcastDesign:
    """Scale the transmit covariance until receiver 2 sits on the threshold.

    The eavesdropper's posterior trace is continuous and strictly
    increasing along the ray and saturates at ``Tr s_z2``, so thresholds
    at or above that trace are rejected up front.  The scale solving
    ``Tr mse_2(t) = Tr r`` is bracketed by doubling and then bisected to
    eight digits of relative accuracy; the intended receiver must end up
    at or below the threshold.
    """
    tr_r = float(np.trace(inst.r))
    tr_z2 = float(np.trace(inst.s_z2))
    if tr_r >= tr_z2:
        raise ThresholdUnreachable(
            f"threshold trace {tr_r:.6g} is not below the receiver-2 "
            f"noise trace {tr_z2:.6g}"
        )

    def rx2_trace(t: float) -> float:
        return float(np.trace(lmmse_matrix(t * inst.direction, inst.s_z2)))

    hi = 1.0
    for _ in range(400):
        if rx2_trace(hi) >= tr_r:
            break
        hi *= 2.0
    else:
        # A singular direction can saturate below Tr s_z2.
        raise ThresholdUnreachable(
            "posterior trace saturates below the threshold along this direction"
        )
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if rx2_trace(mid) >= tr_r:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-12 * max(1.0, hi):
            break
    t_star = 0.5 * (lo + hi)
    s_star = symmetrize(t_star * inst.direction)
    rx2 = float(np.trace(lmmse_matrix(s_star, inst.s_z2)))
    rx1 = float(np.trace(lmmse_matrix(s_star, inst.s_z1)))
    if rx1 > tr_r + 1e-9:
        raise SeparationFailed(
            f"receiver-1 trace {rx1:.9g} exceeds the threshold {tr_r:.9g}"
        )
    # With a positive-definite transmit covariance the noise-reduction
    # multiplier vanishes, so the reduced noise equals the true noise and
    # the chain kernel is checked on the trivial split.
    chain = markov_residual(
        MarkovTriple(s_star, s_star + inst.s_z1, s_star + inst.s_z1)
    )
    return BroadcastDesign(
        s_x_star=s_star,
        t_star=float(t_star),
        trace_mse_rx1=rx1,
        trace_mse_rx2=rx2,
        alpha=float(t_star),
        chain_residual=chain,
    )
