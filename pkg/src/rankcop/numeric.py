"""Scalar normal functions, SPD linear algebra and random draws.

The scalar kernels (``_ndtr``, ``_ndtri``, ``_rtruncnorm``) are compiled with
numba so the latent-variable sweep in :mod:`rankcop.sampler` can call them
from inside its own compiled loop. Random numbers always come from a
caller-owned :class:`numpy.random.Generator`; numba advances the same
bit-generator state, so seeded runs are reproducible.
"""

import math

import numba
import numpy as np
from scipy.linalg import solve_triangular

from .errors import DegenerateIntervalError, NotPositiveDefiniteError

__all__ = [
    "make_rng",
    "spawn_rngs",
    "normal_cdf",
    "normal_quantile",
    "cholesky",
    "spd_inverse",
    "sample_wishart",
    "sample_inverse_wishart",
    "sample_truncated_normal",
    "cov_to_corr",
]

_SQRT1_2 = 1.0 / math.sqrt(2.0)

# Bounds whose normal-CDF images are closer than this are treated as degenerate
# and handed to the rejection sampler.
_PHI_EPS = 1e-14
_MAX_REJECTION_TRIES = 100_000


def make_rng(seed=None):
    """Return a PCG64 generator for ``seed`` (an int, SeedSequence or Generator)."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def spawn_rngs(seed, count):
    """Independent generators for ``count`` parallel chains or replicates."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.default_rng(s) for s in children]


# ---------------------------------------------------------------------------
# normal CDF and quantile

@numba.njit(cache=True)
def _ndtr(x):
    # erfc keeps full relative precision in the lower tail
    return 0.5 * math.erfc(-x * _SQRT1_2)


# Wichura (1988) algorithm AS241, PPND16: relative accuracy about 1e-16.
_A = (3.3871328727963666080e0, 1.3314166789178437745e2, 1.9715909503065514427e3,
      1.3731693765509461125e4, 4.5921953931549871457e4, 6.7265770927008700853e4,
      3.3430575583588128105e4, 2.5090809287301226727e3)
_B = (1.0, 4.2313330701600911252e1, 6.8718700749205790830e2,
      5.3941960214247511077e3, 2.1213794301586595867e4, 3.9307895800092710610e4,
      2.8729085735721942674e4, 5.2264952788528545610e3)
_C = (1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
      3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
      2.27238449892691845833e-2, 7.74545014278341407640e-4)
_D = (1.0, 2.05319162663775882187e0, 1.67638483018380384940e0,
      6.89767334985100004550e-1, 1.48103976427480074590e-1, 1.51986665636164571966e-2,
      5.47593808499534494600e-4, 1.05075007164441684324e-9)
_E = (6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
      2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
      2.71155556874348757815e-5, 2.01033439929228813265e-7)
_F = (1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1,
      1.48753612908506148525e-2, 7.86869131145613259100e-4, 1.84631831751005468180e-5,
      1.42151175831644588870e-7, 2.04426310338993978564e-15)


@numba.njit(cache=True)
def _horner(coef, x):
    acc = coef[7]
    for k in range(6, -1, -1):
        acc = acc * x + coef[k]
    return acc


@numba.njit(cache=True)
def _ndtri(p):
    if p <= 0.0:
        return -np.inf
    if p >= 1.0:
        return np.inf
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        return q * _horner(_A, r) / _horner(_B, r)
    r = p if q < 0.0 else 1.0 - p
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        r -= 1.6
        val = _horner(_C, r) / _horner(_D, r)
    else:
        r -= 5.0
        val = _horner(_E, r) / _horner(_F, r)
    return -val if q < 0.0 else val


@numba.vectorize(["float64(float64)"], cache=True)
def _ndtr_ufunc(x):
    return _ndtr(x)


@numba.vectorize(["float64(float64)"], cache=True)
def _ndtri_ufunc(p):
    return _ndtri(p)


def normal_cdf(x):
    """Standard normal CDF, elementwise; absolute error below 1e-15."""
    out = _ndtr_ufunc(np.asarray(x, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def normal_quantile(p):
    """Inverse standard normal CDF.

    Raises
    ------
    ValueError
        If any ``p`` lies outside the open interval (0, 1).
    """
    arr = np.asarray(p, dtype=float)
    if not np.all((arr > 0.0) & (arr < 1.0)):
        raise ValueError("normal_quantile requires probabilities strictly inside (0, 1)")
    out = _ndtri_ufunc(arr)
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# dense SPD linear algebra

def cholesky(m, tol=1e-12):
    """Lower Cholesky factor ``L`` with ``L @ L.T == m``.

    Raises :class:`NotPositiveDefiniteError` when a squared pivot falls below
    ``tol`` times the largest diagonal entry of ``m``.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = np.max(np.abs(m)) if m.size else 0.0
    if m.size and np.max(np.abs(m - m.T)) > 1e-12 * max(scale, 1.0):
        raise ValueError("matrix is not symmetric")
    try:
        factor = np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(f"matrix is not positive definite: {exc}") from None
    diag_max = np.max(np.diag(m)) if m.size else 0.0
    pivots = np.diag(factor) ** 2
    if m.size and (diag_max <= 0.0 or np.min(pivots) <= tol * diag_max):
        raise NotPositiveDefiniteError(
            f"Cholesky pivot {np.min(pivots):.3g} below tolerance {tol * diag_max:.3g}"
        )
    return factor


def spd_inverse(m):
    """Inverse of a symmetric positive definite matrix via its Cholesky factor."""
    factor = cholesky(m)
    linv = solve_triangular(factor, np.eye(factor.shape[0]), lower=True, check_finite=False)
    inv = linv.T @ linv
    return 0.5 * (inv + inv.T)


def cov_to_corr(v):
    """Rescale a covariance matrix to unit diagonal.

    ``C[i, j] = V[i, j] / sqrt(V[i, i] * V[j, j])``; the diagonal is set to
    exactly one and rounding excursions beyond [-1, 1] are clipped.
    """
    v = np.asarray(v, dtype=float)
    d = np.sqrt(np.diag(v))
    if np.any(d <= 0.0):
        raise NotPositiveDefiniteError("covariance has a non-positive diagonal entry")
    c = v / np.outer(d, d)
    c = np.clip(0.5 * (c + c.T), -1.0, 1.0)
    np.fill_diagonal(c, 1.0)
    return c


# ---------------------------------------------------------------------------
# random draws

def sample_wishart(rng, dof, scale):
    """Wishart(dof, scale) draw as a sum of ``dof`` outer products.

    Each of the ``dof`` rows is a normal(0, scale) vector ``x`` and the draw
    is ``sum x x^T``; the mean is ``dof * scale``. Only integer degrees of
    freedom with ``dof >= dim`` are supported.
    """
    scale = np.asarray(scale, dtype=float)
    dim = scale.shape[0]
    if int(dof) != dof or dof < dim:
        raise ValueError(f"Wishart needs integer dof >= dim ({dim}), got {dof}")
    factor = cholesky(scale)
    x = rng.standard_normal((int(dof), dim)) @ factor.T
    w = x.T @ x
    return 0.5 * (w + w.T)


def sample_inverse_wishart(rng, dof, scale):
    """Draw ``V`` with ``V^{-1} ~ Wishart(dof, scale^{-1})``.

    With ``(dof, scale) = (nu0, nu0 * V0)`` this gives ``E[V^{-1}] = V0^{-1}``.
    """
    return spd_inverse(sample_wishart(rng, dof, spd_inverse(scale)))


@numba.njit(cache=True)
def _reject_upper(rng, a, b):
    # Standardized draw from N(0,1) restricted to (a, b), a >= 0.
    width = b - a
    if width * (a + b) <= 2.0:
        # uniform proposal, envelope exp(-a^2/2)
        for _ in range(_MAX_REJECTION_TRIES):
            x = a + rng.random() * width
            if math.log(rng.random()) <= -0.5 * (x * x - a * a) and a < x < b:
                return x
        return np.nan
    # exponential proposal with the optimal rate for the one-sided tail
    lam = 0.5 * (a + math.sqrt(a * a + 4.0))
    mass = -math.expm1(-lam * width) if width < np.inf else 1.0
    for _ in range(_MAX_REJECTION_TRIES):
        x = a - math.log1p(-rng.random() * mass) / lam
        d = x - lam
        if math.log(rng.random()) <= -0.5 * d * d and a < x < b:
            return x
    return np.nan


@numba.njit(cache=True)
def _reject_standard(rng, a, b):
    # Rejection fallback on the standardized scale; a < b.
    if b <= 0.0:
        x = _reject_upper(rng, -b, -a)
        return -x
    if a >= 0.0:
        return _reject_upper(rng, a, b)
    # interval straddles zero but was flagged degenerate, so it is tiny
    for _ in range(_MAX_REJECTION_TRIES):
        x = a + rng.random() * (b - a)
        if math.log(rng.random()) <= -0.5 * x * x and a < x < b:
            return x
    return np.nan


@numba.njit(cache=True)
def _rtruncnorm(rng, mu, sigma, lo, hi):
    """One draw from normal(mu, sigma^2) restricted to (lo, hi); NaN on failure."""
    if not lo < hi:
        return np.nan
    if lo == -np.inf and hi == np.inf:
        return mu + sigma * rng.standard_normal()
    a = (lo - mu) / sigma
    b = (hi - mu) / sigma
    # work in the lower tail, where the CDF keeps relative precision
    sign = 1.0
    if a > 0.0:
        a, b = -b, -a
        sign = -1.0
    pa = _ndtr(a)
    pb = _ndtr(b)
    if pb - pa > _PHI_EPS and pb > _PHI_EPS:
        x = _ndtri(pa + rng.random() * (pb - pa))
        z = mu + sigma * sign * x
        if lo < z < hi:
            return z
    if sign < 0.0:
        a, b = -b, -a
    for _ in range(16):
        x = _reject_standard(rng, a, b)
        if x != x:
            return np.nan
        z = mu + sigma * x
        if lo < z < hi:
            return z
    return np.nan


def sample_truncated_normal(rng, mu, sigma, lo=-np.inf, hi=np.inf):
    """Draw from normal(mu, sigma^2) conditioned on lying strictly in (lo, hi).

    Inverse-CDF sampling on whichever side of ``mu`` keeps the normal CDF
    well conditioned. When the two CDF bounds are numerically
    indistinguishable (deep tails or ultra-narrow intervals) an
    exponential-proposal rejection sampler takes over.

    Raises
    ------
    DegenerateIntervalError
        If ``lo >= hi`` or no representable value strictly inside the
        interval can be produced.
    """
    if not sigma > 0.0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if not lo < hi:
        raise DegenerateIntervalError(f"empty interval ({lo}, {hi})")
    z = _rtruncnorm(rng, float(mu), float(sigma), float(lo), float(hi))
    if np.isnan(z):
        raise DegenerateIntervalError(f"no mass can be sampled in ({lo!r}, {hi!r})")
    return z
