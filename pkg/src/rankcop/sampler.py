"""Gibbs sampler for the Gaussian copula correlation under the extended rank likelihood.

The chain lives on ``(Z, V)``: an ``n x p`` latent normal matrix constrained
to respect the observed orderings within each column, and a covariance ``V``
with a semi-conjugate inverse-Wishart prior. Each scan redraws every latent
column (columns visited in random order, levels in increasing order, each
level's bounds read off the current neighbouring levels), then draws ``V``
from its inverse-Wishart full conditional and reports ``C = corr(V)``.

By default each scan ends with a scale move per column (see
:func:`update_scales`). The data say nothing about the scale of a latent
column, and with many distinct levels the single-site updates can barely
change it, so without the move the chain remembers its starting scale.
"""

import logging
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numba
import numpy as np

from .errors import DegenerateIntervalError, NotPositiveDefiniteError, NumericalError, SamplerError
from .numeric import (
    _rtruncnorm,
    cholesky,
    cov_to_corr,
    make_rng,
    normal_quantile,
    sample_inverse_wishart,
    spd_inverse,
    spawn_rngs,
)
from .posterior import PosteriorSamples

__all__ = [
    "PriorSpec",
    "McmcConfig",
    "LatentState",
    "initialize_latent",
    "conditional_normal_params",
    "update_latent_column",
    "update_covariance",
    "update_scales",
    "gibbs_scan",
    "run_chain",
    "run_chains",
    "rank_constraint_violations",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PriorSpec:
    """Inverse-Wishart(nu0, nu0 * v0) prior on the latent covariance."""

    nu0: int
    v0: np.ndarray

    def __post_init__(self):
        v0 = np.array(self.v0, dtype=float, ndmin=2)
        object.__setattr__(self, "v0", v0)
        p = v0.shape[0]
        if int(self.nu0) != self.nu0 or self.nu0 < p + 1:
            raise ValueError(f"nu0 must be an integer >= p + 1 = {p + 1}, got {self.nu0}")
        object.__setattr__(self, "nu0", int(self.nu0))
        cholesky(v0)

    @classmethod
    def default(cls, p):
        """``nu0 = p + 2`` and ``v0 = I``."""
        return cls(p + 2, np.eye(p))

    @property
    def p(self):
        return self.v0.shape[0]

    def to_dict(self):
        return {"nu0": self.nu0, "v0": self.v0.tolist()}


@dataclass(frozen=True)
class McmcConfig:
    """Run length and thinning; ``burnin`` defaults to 20% of ``nscan``."""

    nscan: int = 25_000
    burnin: int | None = None
    thin: int = 10
    seed: int | None = 1
    save_latent: bool = False
    scale_moves: bool = True

    def __post_init__(self):
        if self.burnin is None:
            object.__setattr__(self, "burnin", self.nscan // 5)
        if not (self.nscan > self.burnin >= 0):
            raise ValueError(f"need nscan > burnin >= 0, got nscan={self.nscan}, burnin={self.burnin}")
        if self.thin < 1:
            raise ValueError(f"thin must be >= 1, got {self.thin}")

    @property
    def n_saved(self):
        return (self.nscan - self.burnin) // self.thin

    def saves_at(self, scan):
        """Whether 1-based ``scan`` is kept."""
        return scan > self.burnin and (scan - self.burnin) % self.thin == 0


@dataclass(eq=False)
class LatentState:
    """Mutable sampler state. Updates modify ``z`` and ``v`` in place."""

    z: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        self.z = np.ascontiguousarray(self.z, dtype=np.float64)
        self.v = np.asarray(self.v, dtype=float)

    def copy(self):
        return LatentState(self.z.copy(), self.v.copy())


def rank_constraint_violations(z, data):
    """Count adjacent-level pairs whose latent values are out of order.

    Zero means ``z`` lies in the constraint set: for every column, the
    largest latent value of each level is below the smallest of the next
    level (which by transitivity orders all levels).
    """
    bad = 0
    for j, col in enumerate(data.columns):
        order, starts, _ = col.level_groups
        zj = z[order, j]
        for r in range(len(starts) - 2):
            if zj[starts[r]:starts[r + 1]].max() >= zj[starts[r + 1]:starts[r + 2]].min():
                bad += 1
    return bad


def initialize_latent(data, rng):
    """Starting state from normal scores of randomly tie-broken ranks.

    Observed cells get ``Phi^{-1}(rank / (m + 1))`` with ties ordered at
    random (``m`` the column's observed count); missing cells get standard
    normal draws. Columns are then standardized and ``V`` is their sample
    covariance, nudged by ``1e-8 I`` when it is not safely positive definite.
    """
    n, p = data.n, data.p
    z = np.empty((n, p))
    for j, col in enumerate(data.columns):
        obs = ~col.missing
        m = int(obs.sum())
        if m:
            order = np.lexsort((rng.random(m), col.values[obs]))
            ranks = np.empty(m)
            ranks[order] = np.arange(1, m + 1)
            z[obs, j] = normal_quantile(ranks / (m + 1.0))
        z[~obs, j] = rng.standard_normal(n - m)
    if n >= 2:
        z -= z.mean(axis=0)
        sd = z.std(axis=0, ddof=1)
        z /= np.where(sd > 0, sd, 1.0)
        v = np.atleast_2d(np.cov(z, rowvar=False))
        if n <= p:
            v = v + 1e-8 * np.eye(p)
        try:
            cholesky(v)
        except NotPositiveDefiniteError:
            v = v + 1e-8 * np.eye(p)
    else:
        v = np.eye(p)
    return LatentState(z, v)


def _column_conditional(z, precision, j):
    # mean vector and sd of z[:, j] given the other columns under N(0, V),
    # read off the precision matrix P = V^{-1}:
    # coefficients -P[j, -j] / P[j, j], variance 1 / P[j, j]
    p = precision.shape[0]
    pjj = precision[j, j]
    if not pjj > 0.0:
        raise NotPositiveDefiniteError(f"non-positive conditional precision {pjj:.3g} for column {j}")
    if p == 1:
        return np.zeros(z.shape[0]), math.sqrt(1.0 / pjj)
    others = np.arange(p) != j
    coef = -precision[j, others] / pjj
    return z[:, others] @ coef, math.sqrt(1.0 / pjj)


def conditional_normal_params(state, row, col):
    """Mean and sd of ``z[row, col]`` given the rest of its row under ``N(0, V)``."""
    mu, sigma = _column_conditional(state.z[row:row + 1], spd_inverse(state.v), col)
    return float(mu[0]), sigma


@numba.njit(cache=True)
def _sweep_column(z, j, mu, sigma, order, starts, missing_rows, rng):
    # Levels in increasing order; bounds come from the current neighbouring
    # levels, so later levels see this sweep's earlier draws.
    nlev = starts.shape[0] - 1
    for r in range(nlev):
        lo = -np.inf
        if r > 0:
            for idx in range(starts[r - 1], starts[r]):
                lo = max(lo, z[order[idx], j])
        hi = np.inf
        if r < nlev - 1:
            for idx in range(starts[r + 1], starts[r + 2]):
                hi = min(hi, z[order[idx], j])
        for idx in range(starts[r], starts[r + 1]):
            i = order[idx]
            value = _rtruncnorm(rng, mu[i], sigma, lo, hi)
            if value != value:
                return i
            z[i, j] = value
    for i in missing_rows:
        z[i, j] = mu[i] + sigma * rng.standard_normal()
    return -1


def update_latent_column(state, col, data, rng, precision=None):
    """Redraw latent column ``col`` from its constrained full conditionals.

    ``precision`` (``V^{-1}``) may be passed to avoid recomputing it for
    every column of a scan.
    """
    if precision is None:
        precision = spd_inverse(state.v)
    mu, sigma = _column_conditional(state.z, precision, col)
    order, starts, missing_rows = data.columns[col].level_groups
    failed = _sweep_column(state.z, col, mu, sigma, order, starts, missing_rows, rng)
    if failed >= 0:
        raise DegenerateIntervalError(
            "truncated-normal interval has no usable mass", row=int(failed), column=data.names[col]
        )
    return state


def update_covariance(state, prior, rng):
    """Draw ``V ~ inverse-Wishart(nu0 + n, nu0 * V0 + Z^T Z)``."""
    n = state.z.shape[0]
    scale = prior.nu0 * prior.v0 + state.z.T @ state.z
    state.v = sample_inverse_wishart(rng, prior.nu0 + n, scale)
    return state


def update_scales(state, prior, rng):
    """Rescale each latent column together with ``V``; ``C`` is unchanged.

    For column ``j`` the move is ``z[:, j] -> g z[:, j]`` with row and column
    ``j`` of ``V`` multiplied by ``g``. Under the joint posterior, ``t = 1/g``
    has density proportional to ``t^(nu0 - 1) exp(-a t^2 / 2 - b t)`` with
    ``a = S[j, j] P[j, j]``, ``b = sum_{k != j} S[j, k] P[j, k]``,
    ``S = nu0 V0`` and ``P = V^{-1}``. ``t^2`` is drawn from the Gamma
    distribution obtained at ``b = 0`` and, when ``b != 0``, accepted with
    probability ``min(1, exp(-b (t - 1)))``. Rank constraints are preserved
    because ``g > 0``.
    """
    s = prior.nu0 * prior.v0
    v = state.v
    z = state.z
    precision = spd_inverse(v)
    for j in range(v.shape[0]):
        a = s[j, j] * precision[j, j]
        b = float(s[j] @ precision[j]) - a
        t = math.sqrt(rng.gamma(0.5 * prior.nu0, 2.0 / a))
        if b != 0.0 and math.log(rng.random()) > -b * (t - 1.0):
            continue
        g = 1.0 / t
        z[:, j] *= g
        v[j, :] *= g
        v[:, j] *= g
        precision[j, :] *= t
        precision[:, j] *= t
    return state


def gibbs_scan(state, data, prior, rng, scale_moves=True):
    """One full scan; returns ``(state, C)``."""
    precision = spd_inverse(state.v)
    for j in rng.permutation(data.p):
        update_latent_column(state, int(j), data, rng, precision)
    update_covariance(state, prior, rng)
    if scale_moves:
        update_scales(state, prior, rng)
    return state, cov_to_corr(state.v)


def run_chain(data, prior=None, config=None, rng=None, chain=None):
    """Run the Gibbs sampler and collect thinned correlation draws.

    Parameters
    ----------
    data : Dataset
    prior : PriorSpec, optional
        Defaults to ``PriorSpec.default(data.p)``.
    config : McmcConfig, optional
    rng : numpy.random.Generator, optional
        Overrides ``config.seed``; used for per-chain substreams.
    chain : int, optional
        Chain index, recorded in the metadata.

    Returns
    -------
    PosteriorSamples
        ``config.n_saved`` matrices in scan order.
    """
    prior = prior or PriorSpec.default(data.p)
    config = config or McmcConfig()
    if prior.p != data.p:
        raise ValueError(f"prior dimension {prior.p} does not match data ({data.p} columns)")
    if data.n <= data.p:
        warnings.warn(
            f"n={data.n} <= p={data.p}: the posterior is driven mostly by the prior",
            RuntimeWarning,
            stacklevel=2,
        )
    rng = make_rng(config.seed) if rng is None else rng
    logger.info("running %d scans on %d x %d data", config.nscan, data.n, data.p)

    state = initialize_latent(data, rng)
    saved, latent = [], []
    for scan in range(1, config.nscan + 1):
        try:
            _, c = gibbs_scan(state, data, prior, rng, config.scale_moves)
        except NumericalError as exc:
            raise SamplerError(str(exc), scan=scan) from exc
        if config.saves_at(scan):
            saved.append(c)
            if config.save_latent:
                latent.append(state.z.copy())

    p = data.p
    metadata = {
        "seed": config.seed,
        "config": asdict(config),
        "prior": prior.to_dict(),
        "data_sha256": data.content_hash(),
        "n": data.n,
    }
    if chain is not None:
        metadata["chain"] = chain
    return PosteriorSamples(
        np.array(saved).reshape(-1, p, p),
        data.names,
        metadata,
        np.array(latent) if config.save_latent else None,
    )


def _run_one(args):
    data, prior, config, rng, chain = args
    return run_chain(data, prior, config, rng=rng, chain=chain)


def run_chains(data, prior=None, config=None, chains=2, max_workers=None):
    """Run independent chains on spawned substreams of ``config.seed``.

    Chains run in separate processes; the result does not depend on
    ``max_workers``.
    """
    config = config or McmcConfig()
    jobs = [(data, prior, config, rng, k) for k, rng in enumerate(spawn_rngs(config.seed, chains))]
    if chains == 1 or max_workers == 1:
        return [_run_one(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(_run_one, jobs))
