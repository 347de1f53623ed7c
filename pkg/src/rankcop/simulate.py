"""Synthetic data from a Gaussian copula with chosen marginals.

Marginal specs are short strings:

``"continuous"``   the latent normal itself
``"exponential"``  unit exponential, a skewed continuous margin
``"binary"``       1 if the latent value is positive, else 0
``"ordinal:K"``    K equiprobable ordered levels 1..K
``"count:L"``      Poisson(L) counts
"""

import numpy as np
from scipy import stats

from .data import Dataset
from .numeric import cholesky, normal_cdf

__all__ = ["gaussian_copula_latent", "apply_marginal", "simulate_copula_data", "parse_marginal"]


def parse_marginal(spec):
    """Split ``"kind:arg"`` into ``(kind, arg)``; raises ValueError on unknown kinds."""
    kind, _, arg = spec.partition(":")
    if kind in ("continuous", "exponential", "binary"):
        if arg:
            raise ValueError(f"marginal {kind!r} takes no argument")
        return kind, None
    if kind == "ordinal":
        k = int(arg)
        if k < 2:
            raise ValueError("ordinal marginals need at least two levels")
        return kind, k
    if kind == "count":
        lam = float(arg)
        if not lam > 0:
            raise ValueError("count marginals need a positive rate")
        return kind, lam
    raise ValueError(f"unknown marginal {spec!r}")


def gaussian_copula_latent(rng, corr, n):
    """``n`` draws from N(0, corr)."""
    corr = np.asarray(corr, dtype=float)
    return rng.standard_normal((n, corr.shape[0])) @ cholesky(corr).T


def apply_marginal(z, spec):
    """Map latent standard normals to the marginal described by ``spec``."""
    kind, arg = parse_marginal(spec)
    z = np.asarray(z, dtype=float)
    if kind == "continuous":
        return z.copy()
    if kind == "exponential":
        return -np.log(normal_cdf(-z))
    if kind == "binary":
        return (z > 0).astype(float)
    if kind == "ordinal":
        cuts = stats.norm.ppf(np.arange(1, arg) / arg)
        return np.searchsorted(cuts, z).astype(float) + 1.0
    return stats.poisson.ppf(normal_cdf(z), arg)


def simulate_copula_data(rng, corr, n, marginals, names=None, missing_rate=0.0):
    """Dataset of ``n`` rows from a Gaussian copula; cells go missing completely at random."""
    z = gaussian_copula_latent(rng, corr, n)
    if len(marginals) != z.shape[1]:
        raise ValueError("need one marginal spec per column")
    y = np.column_stack([apply_marginal(z[:, j], m) for j, m in enumerate(marginals)])
    if missing_rate > 0.0:
        y[rng.random(y.shape) < missing_rate] = np.nan
    return Dataset.from_array(y, names)
