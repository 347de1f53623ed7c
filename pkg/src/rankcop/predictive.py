"""Posterior-predictive simulation on the original data scale.

Each synthetic row draws a correlation matrix uniformly from the saved
posterior, a latent vector ``z ~ N(0, C)``, and maps ``z_j`` through
``Phi`` and the column's empirical quantile function. Uncertainty in the
marginals is ignored; every synthetic value is an observed level.
"""

from dataclasses import dataclass

import numpy as np

from .data import Dataset, EmpiricalMarginal
from .errors import DataError, EmptyCellError
from .numeric import normal_cdf

__all__ = ["sample_predictive", "conditional_table", "ConditionalSummary", "DEFAULT_QUANTILES"]

DEFAULT_QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)


def _batched_cholesky(corr):
    try:
        return np.linalg.cholesky(corr)
    except np.linalg.LinAlgError:
        # PSD but numerically singular draws: factor via eigendecomposition
        w, q = np.linalg.eigh(corr)
        return q * np.sqrt(np.clip(w, 0.0, None))[:, None, :]


def sample_predictive(samples, data, rng, count):
    """Draw ``count`` synthetic rows from the plug-in posterior predictive.

    Returns a :class:`~rankcop.data.Dataset` with the same column names and
    labels as ``data``.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    if len(samples) == 0:
        raise ValueError("no posterior samples")
    if tuple(samples.names) != tuple(data.names):
        raise DataError("posterior columns do not match the data columns")
    factors = _batched_cholesky(samples.corr)
    pick = rng.integers(len(samples), size=count)
    eps = rng.standard_normal((count, data.p))
    z = np.einsum("nij,nj->ni", factors[pick], eps)
    u = normal_cdf(z)
    out = np.empty((count, data.p))
    for j, col in enumerate(data.columns):
        out[:, j] = EmpiricalMarginal.from_column(col)._quantile(u[:, j])
    return Dataset.from_array(out, data.names, data.labels)


@dataclass(frozen=True)
class ConditionalSummary:
    """Empirical conditional distribution of one synthetic column."""

    target: str
    given: tuple
    count: int
    levels: tuple
    probabilities: tuple
    quantiles: dict
    mean: float

    def to_dict(self, labels=None):
        show = (lambda v: labels[int(v) - 1]) if labels else (lambda v: v)
        return {
            "target": self.target,
            "given": [[c, lvl] for c, lvl in self.given],
            "count": self.count,
            "levels": [show(v) for v in self.levels],
            "probabilities": list(self.probabilities),
            "quantiles": {f"{q:g}": show(v) for q, v in self.quantiles.items()},
            "mean": self.mean,
        }


def _level_value(column, level):
    if column.labels is not None and isinstance(level, str):
        try:
            return float(column.labels.index(level) + 1)
        except ValueError:
            raise DataError(f"{level!r} is not a level of column {column.name!r}") from None
    try:
        return float(level)
    except (TypeError, ValueError):
        raise DataError(f"{level!r} is not a level of column {column.name!r}") from None


def conditional_table(synthetic, target, given=(), bins=None, quantiles=DEFAULT_QUANTILES):
    """Distribution of ``target`` among synthetic rows matching ``given``.

    Parameters
    ----------
    synthetic : Dataset
    target : str
    given : sequence of (column, level)
        Levels may be numeric or, for labelled columns, label strings.
    bins : mapping, optional
        ``level -> (low, high)`` bin endpoints; the mean then uses the
        endpoint average as each level's representative value.
    quantiles : sequence of float
        Reported with the inverted-CDF rule, so they are always levels.

    Raises
    ------
    EmptyCellError
        If no rows match.
    """
    tcol = synthetic.column(target)
    mask = np.ones(synthetic.n, dtype=bool)
    resolved = []
    for name, level in given:
        col = synthetic.column(name)
        value = _level_value(col, level)
        mask &= col.values == value
        resolved.append((name, level))
    count = int(mask.sum())
    if count == 0:
        raise EmptyCellError(f"no synthetic rows match {resolved}", count=0)
    y = tcol.values[mask]
    y = y[~np.isnan(y)]
    if y.size == 0:
        raise EmptyCellError(f"target {target!r} is missing in all matching rows", count=0)
    levels, counts = np.unique(y, return_counts=True)
    probs = counts / counts.sum()
    qs = np.quantile(y, quantiles, method="inverted_cdf")
    if bins is not None:
        rep = {_level_value(tcol, k): 0.5 * (float(lo) + float(hi)) for k, (lo, hi) in bins.items()}
        try:
            mean = float(np.dot(probs, [rep[float(v)] for v in levels]))
        except KeyError as exc:
            raise DataError(f"no bin endpoints given for level {exc.args[0]}") from None
    else:
        mean = float(y.mean())
    return ConditionalSummary(
        target,
        tuple(resolved),
        count,
        tuple(float(v) for v in levels),
        tuple(float(v) for v in probs),
        {float(q): float(v) for q, v in zip(quantiles, qs)},
        mean,
    )
