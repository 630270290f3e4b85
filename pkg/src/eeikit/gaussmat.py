"""Dense symmetric-matrix primitives and Gaussian information quantities.

All covariances are real symmetric positive-semidefinite numpy arrays.
Functions accept either a plain ``ndarray`` or a :class:`CovMatrix`;
results are plain arrays unless stated otherwise.  Entropies are in nats.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from numpy.typing import NDArray

from .errors import (
    DimensionMismatch,
    NotPositiveDefinite,
    SingularCovariance,
)

__all__ = [
    "CovMatrix",
    "SimDiagResult",
    "MarkovTriple",
    "symmetrize",
    "spectral_scale",
    "psd_leq",
    "psd_project",
    "simdiag",
    "gaussian_entropy",
    "gaussian_conditional_cov",
    "markov_residual",
    "cov_from_json",
    "cov_to_json",
    "load_cov",
]

LOG_2PI_E = math.log(2.0 * math.pi) + 1.0

DEFAULT_PSD_TOL = 1e-10
_SYM_RTOL = 1e-12


def symmetrize(a: NDArray) -> NDArray:
    """Return the symmetric part (a + a.T) / 2 as a new array."""
    a = np.asarray(a, dtype=float)
    return 0.5 * (a + a.T)


def _entries(m) -> NDArray:
    """Coerce a CovMatrix or array-like to a float ndarray (no copy if possible)."""
    if isinstance(m, CovMatrix):
        return m.entries
    return np.asarray(m, dtype=float)


def _check_square(a: NDArray, name: str = "matrix") -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")


def spectral_scale(*matrices) -> float:
    """max(1, largest absolute eigenvalue over all arguments).

    Used to turn absolute residual tolerances into relative ones.
    """
    s = 1.0
    for m in matrices:
        a = _entries(m)
        if a.size:
            s = max(s, float(np.max(np.abs(np.linalg.eigvalsh(symmetrize(a))))))
    return s


@dataclass(frozen=True)
class CovMatrix:
    """A validated covariance matrix: symmetric and PSD within tolerance.

    Construction symmetrizes the input and rejects matrices that are
    asymmetric beyond 1e-12 (relative) or whose smallest eigenvalue falls
    below ``-psd_tol * max(1, largest |eigenvalue|)``.  Instances are
    immutable; ``entries`` is a read-only array.
    """

    entries: NDArray
    psd_tol: float = DEFAULT_PSD_TOL
    dim: int = field(init=False)

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=float)
        _check_square(a, "covariance")
        scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
        if float(np.max(np.abs(a - a.T))) > _SYM_RTOL * scale:
            raise NotPositiveDefinite("matrix is not symmetric within tolerance")
        a = symmetrize(a)
        evals = np.linalg.eigvalsh(a)
        eig_scale = max(1.0, float(np.max(np.abs(evals))))
        if evals[0] < -self.psd_tol * eig_scale:
            raise NotPositiveDefinite(
                f"matrix is not positive semidefinite: min eigenvalue {evals[0]:.3e}"
            )
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)
        object.__setattr__(self, "dim", a.shape[0])

    @classmethod
    def from_array(cls, a, psd_tol: float = DEFAULT_PSD_TOL) -> "CovMatrix":
        return cls(np.array(a, dtype=float), psd_tol)

    def __array__(self, dtype=None, copy=None):
        if dtype is not None:
            return np.asarray(self.entries, dtype=dtype)
        return self.entries


class SimDiagResult(NamedTuple):
    """Congruence transform Q with Q.T @ a @ Q = I and Q.T @ b @ Q = diag(d)."""

    q: NDArray
    d: NDArray


class MarkovTriple(NamedTuple):
    """Covariances of three jointly Gaussian vectors (Y1, Y2, Y3).

    Built by independent summation, the candidate chain claims Y1 and Y2
    are conditionally independent given Y3; see :func:`markov_residual`.
    """

    s_y1: NDArray
    s_y2: NDArray
    s_y3: NDArray


def psd_leq(a, b, tol: float = DEFAULT_PSD_TOL) -> bool:
    """True iff a <= b in the PSD order, within a relative eigenvalue tolerance.

    The test is ``min_eig(b - a) >= -tol * scale`` with
    ``scale = max(1, max |eig(b - a)|)``.
    """
    a, b = _entries(a), _entries(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shape mismatch {a.shape} vs {b.shape}")
    evals = np.linalg.eigvalsh(symmetrize(b - a))
    scale = max(1.0, float(np.max(np.abs(evals)))) if evals.size else 1.0
    return bool(evals[0] >= -tol * scale)


def psd_project(a) -> NDArray:
    """Nearest PSD matrix in Frobenius norm: clip negative eigenvalues to 0."""
    a = symmetrize(_entries(a))
    w, q = np.linalg.eigh(a)
    if w.size == 0 or w[0] >= 0.0:
        return a
    return symmetrize(q @ (np.maximum(w, 0.0)[:, None] * q.T))


def _inv_sqrt_pd(a: NDArray, psd_tol: float, name: str) -> NDArray:
    """Symmetric inverse square root of a strictly PD matrix."""
    w, q = np.linalg.eigh(symmetrize(a))
    scale = max(1.0, float(np.max(np.abs(w))))
    if w[0] <= psd_tol * scale:
        raise NotPositiveDefinite(
            f"{name} must be strictly positive definite: min eigenvalue {w[0]:.3e}"
        )
    return symmetrize(q @ ((w ** -0.5)[:, None] * q.T))


def simdiag(a, b, psd_tol: float = DEFAULT_PSD_TOL) -> SimDiagResult:
    """Simultaneously diagonalize a strictly PD ``a`` and PSD ``b``.

    Whitens by the symmetric inverse square root of ``a`` and orthogonally
    diagonalizes the whitened ``b``.  The eigenvalues ``d`` are returned in
    descending order; each eigenvector column has its first component of
    magnitude above 1e-12 made positive, so the result is reproducible.

    Returns
    -------
    SimDiagResult
        ``q`` invertible with ``q.T @ a @ q = I`` and ``q.T @ b @ q = diag(d)``.
    """
    a, b = _entries(a), _entries(b)
    _check_square(a, "a")
    if a.shape != b.shape:
        raise DimensionMismatch(f"shape mismatch {a.shape} vs {b.shape}")
    a_isqrt = _inv_sqrt_pd(a, psd_tol, "a")
    m = symmetrize(a_isqrt @ symmetrize(b) @ a_isqrt)
    d, u = np.linalg.eigh(m)
    order = np.argsort(-d, kind="stable")
    d = d[order]
    u = u[:, order]
    for j in range(u.shape[1]):
        col = u[:, j]
        nz = np.nonzero(np.abs(col) > 1e-12)[0]
        if nz.size and col[nz[0]] < 0.0:
            u[:, j] = -col
    return SimDiagResult(q=a_isqrt @ u, d=d)


def gaussian_entropy(s) -> float:
    """Differential entropy of a zero-mean Gaussian with covariance ``s``, in nats.

    Computes ``0.5 * ln((2*pi*e)^n * det(s))`` from the eigenvalues.
    Raises :class:`SingularCovariance` if the determinant is not strictly
    positive within tolerance.
    """
    a = symmetrize(_entries(s))
    _check_square(a, "covariance")
    evals = np.linalg.eigvalsh(a)
    scale = max(1.0, float(np.max(np.abs(evals)))) if evals.size else 1.0
    if evals.size == 0 or evals[0] <= 1e-12 * scale:
        raise SingularCovariance(
            f"covariance is singular within tolerance: min eigenvalue "
            f"{evals[0] if evals.size else float('nan'):.3e}"
        )
    n = a.shape[0]
    return 0.5 * (n * LOG_2PI_E + float(np.sum(np.log(evals))))


def gaussian_conditional_cov(s_x, s_z) -> NDArray:
    """Error covariance of estimating X from X + Z for independent Gaussians.

    Returns ``s_x - s_x @ inv(s_x + s_z) @ s_x``, which is PSD and below
    ``s_x`` in the PSD order.
    """
    x, z = _entries(s_x), _entries(s_z)
    if x.shape != z.shape:
        raise DimensionMismatch(f"shape mismatch {x.shape} vs {z.shape}")
    try:
        gain = np.linalg.solve(symmetrize(x + z), x)
    except np.linalg.LinAlgError as exc:
        raise SingularCovariance("sum covariance is singular") from exc
    return symmetrize(x - x @ gain)


def markov_residual(t: MarkovTriple | Sequence) -> float:
    """Frobenius norm of the kernel certifying Y1 -- Y3 -- Y2 factorization.

    For jointly Gaussian (Y1, Y2, Y3) built by independent summation, the
    moment-generating-function factorization that makes Y1 and Y2
    conditionally independent given Y3 holds iff the symmetrized matrix

        M = 2*S1 - S2 @ inv(S3) @ S1 - S1 @ inv(S3) @ S2

    vanishes.  The returned value is ``||sym(M)||_F``; 0 within tolerance
    certifies the chain.
    """
    y1, y2, y3 = (_entries(m) for m in t)
    if not (y1.shape == y2.shape == y3.shape):
        raise DimensionMismatch("triple members must share one shape")
    try:
        c = y2 @ np.linalg.solve(symmetrize(y3), y1)
    except np.linalg.LinAlgError as exc:
        raise SingularCovariance("third covariance in the triple is singular") from exc
    m = 2.0 * y1 - c - c.T
    return float(np.linalg.norm(symmetrize(m)))


def cov_from_json(source) -> CovMatrix:
    """Parse the shared matrix JSON format ``{"dim": n, "rows": [[...], ...]}``.

    Accepts a JSON string or an already-decoded mapping.  The matrix is
    symmetrized and PSD-validated like any :class:`CovMatrix`.
    """
    obj = json.loads(source) if isinstance(source, (str, bytes)) else source
    if not isinstance(obj, dict) or "rows" not in obj:
        raise NotPositiveDefinite("matrix JSON must be an object with a 'rows' field")
    rows = obj["rows"]
    try:
        a = np.array(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise NotPositiveDefinite(f"matrix rows are not numeric: {exc}") from exc
    _check_square(a, "matrix JSON")
    dim = obj.get("dim", a.shape[0])
    if int(dim) != a.shape[0]:
        raise DimensionMismatch(
            f"declared dim {dim} does not match rows shape {a.shape}"
        )
    return CovMatrix.from_array(a)


def cov_to_json(m) -> dict:
    """Serialize a matrix to the shared JSON format."""
    a = _entries(m)
    return {"dim": int(a.shape[0]), "rows": [[float(v) for v in row] for row in a]}


def load_cov(path) -> CovMatrix:
    """Read a matrix JSON file from disk."""
    with open(path, "r", encoding="utf-8") as fh:
        return cov_from_json(fh.read())
