"""Posterior summaries: quantiles, latent regression coefficients, dependence graphs, mixing diagnostics."""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .errors import NotPositiveDefiniteError, SingularMatrixError
from .numeric import cholesky
from .posterior import PosteriorSamples

__all__ = [
    "QuantileTable",
    "Edge",
    "DependenceGraph",
    "correlation_quantiles",
    "regression_coefficients",
    "coefficient_draws",
    "coefficient_quantiles",
    "dependence_graph",
    "autocorrelation",
    "effective_sample_size",
    "summarize",
]

DEFAULT_PROBS = (0.025, 0.5, 0.975)


def _as_draws(samples):
    if isinstance(samples, PosteriorSamples):
        return samples.corr, samples.names
    corr = np.asarray(samples, dtype=float)
    return corr, tuple(f"V{j + 1}" for j in range(corr.shape[-1]))


@dataclass(frozen=True, eq=False)
class QuantileTable:
    """``values[q, j, k]`` is the ``probs[q]`` posterior quantile of ``C[j, k]``."""

    names: tuple
    probs: tuple
    values: np.ndarray

    def pair(self, j, k):
        return dict(zip(self.probs, self.values[:, j, k]))

    def to_rows(self):
        """Flatten the strict upper triangle into one record per pair."""
        p = len(self.names)
        rows = []
        for j, k in zip(*np.triu_indices(p, k=1)):
            row = {"row": self.names[j], "col": self.names[k]}
            row.update({f"q{q:g}": float(self.values[i, j, k]) for i, q in enumerate(self.probs)})
            rows.append(row)
        return rows


def correlation_quantiles(samples, probs=DEFAULT_PROBS):
    """Entrywise posterior quantiles of the correlation matrix.

    Uses linear interpolation between order statistics (``numpy``'s default
    ``"linear"`` method, the "type 7" rule).
    """
    corr, names = _as_draws(samples)
    if corr.shape[0] == 0:
        raise ValueError("no posterior samples")
    probs = tuple(float(q) for q in probs)
    if any(not 0.0 < q < 1.0 for q in probs) or list(probs) != sorted(probs):
        raise ValueError("probs must be sorted and inside (0, 1)")
    values = np.quantile(corr, probs, axis=0, method="linear")
    return QuantileTable(names, probs, values)


def regression_coefficients(c, target):
    """Coefficients ``C[j, -j] C[-j, -j]^{-1}`` of ``E[z_j | z_-j]``.

    Returned in the order of the remaining coordinates.
    """
    c = np.asarray(c, dtype=float)
    p = c.shape[0]
    others = np.arange(p) != target
    try:
        factor = cholesky(c[np.ix_(others, others)])
    except NotPositiveDefiniteError as exc:
        raise SingularMatrixError(f"conditioning block is singular: {exc}") from None
    return solve_triangular(factor.T, solve_triangular(factor, c[others, target], lower=True), lower=False)


def coefficient_draws(samples):
    """``B[s, j, k]``: coefficient of ``z_k`` in ``E[z_j | z_-j]`` for draw ``s``.

    Computed from the precision matrix, ``B[j, k] = -P[j, k] / P[j, j]``; the
    diagonal is zero.
    """
    corr, _ = _as_draws(samples)
    precision = np.linalg.inv(corr)
    diag = np.diagonal(precision, axis1=1, axis2=2)
    b = -precision / diag[:, :, None]
    idx = np.arange(corr.shape[1])
    b[:, idx, idx] = 0.0
    return b


def coefficient_quantiles(samples, probs=DEFAULT_PROBS):
    """Posterior quantiles of :func:`coefficient_draws`, shape ``(len(probs), p, p)``."""
    return np.quantile(coefficient_draws(samples), probs, axis=0, method="linear")


@dataclass(frozen=True)
class Edge:
    """Undirected edge ``a``-``b``.

    ``excludes_zero`` records, for the regression of ``a`` on ``b`` and of
    ``b`` on ``a`` respectively, whether the credible interval misses zero;
    ``intervals`` holds the two ``(lower, median, upper)`` triples.
    """

    a: str
    b: str
    sign: int
    excludes_zero: tuple
    intervals: tuple


@dataclass(frozen=True, eq=False)
class DependenceGraph:
    names: tuple
    level: float
    edges: list = field(default_factory=list)

    def edge_set(self):
        return {frozenset((e.a, e.b)) for e in self.edges}

    def to_dict(self):
        return {
            "nodes": list(self.names),
            "level": self.level,
            "edges": [
                {
                    "a": e.a,
                    "b": e.b,
                    "sign": "+" if e.sign > 0 else "-",
                    "a_on_b_excludes_zero": e.excludes_zero[0],
                    "b_on_a_excludes_zero": e.excludes_zero[1],
                    "a_on_b_interval": list(e.intervals[0]),
                    "b_on_a_interval": list(e.intervals[1]),
                }
                for e in self.edges
            ],
        }


def dependence_graph(samples, level=0.95):
    """Conditional-dependence graph from regression-coefficient credible intervals.

    An edge ``j``-``k`` is drawn when the central ``level`` interval of either
    directed coefficient (``j`` on ``k`` or ``k`` on ``j``) excludes zero. Its
    sign is that of the posterior median of a coefficient whose interval
    excludes zero (both directed coefficients share the sign of the partial
    correlation). No multiplicity adjustment is made.
    """
    if not 0.0 < level < 1.0:
        raise ValueError("level must be inside (0, 1)")
    corr, names = _as_draws(samples)
    if corr.shape[0] < 2:
        raise ValueError("dependence graph needs at least two posterior samples")
    tail = 0.5 * (1.0 - level)
    lo, med, hi = coefficient_quantiles(corr, (tail, 0.5, 1.0 - tail))
    excl = (lo > 0.0) | (hi < 0.0)
    edges = []
    p = corr.shape[1]
    for j in range(p):
        for k in range(j + 1, p):
            if not (excl[j, k] or excl[k, j]):
                continue
            m = med[j, k] if excl[j, k] else med[k, j]
            edges.append(Edge(
                names[j], names[k], 1 if m > 0 else -1,
                (bool(excl[j, k]), bool(excl[k, j])),
                (
                    (float(lo[j, k]), float(med[j, k]), float(hi[j, k])),
                    (float(lo[k, j]), float(med[k, j]), float(hi[k, j])),
                ),
            ))
    return DependenceGraph(tuple(names), level, edges)


def autocorrelation(series, lag):
    """Lag-``lag`` sample autocorrelation.

    The Pearson correlation between ``x[:-lag]`` and ``x[lag:]``, so the
    result lies in [-1, 1]. Defined as 0 when either segment is constant.
    """
    x = np.asarray(series, dtype=float)
    if lag < 1 or x.shape[0] <= lag:
        raise ValueError(f"need len(series) > lag >= 1, got len={x.shape[0]}, lag={lag}")
    a = x[:-lag] - x[:-lag].mean()
    b = x[lag:] - x[lag:].mean()
    denom = np.sqrt(np.dot(a, a) * np.dot(b, b))
    if denom == 0.0:
        return 0.0
    return float(np.clip(np.dot(a, b) / denom, -1.0, 1.0))


def effective_sample_size(series):
    """Effective sample size ``N / (1 + 2 sum_k rho_k)``.

    The sum stops before the first non-positive autocorrelation, so the
    estimate never exceeds ``N``. A constant series has ESS ``N``.
    """
    x = np.asarray(series, dtype=float)
    n = x.shape[0]
    if n < 10:
        raise ValueError(f"effective sample size needs at least 10 values, got {n}")
    total = 0.0
    for lag in range(1, n - 2):
        rho = autocorrelation(x, lag)
        if rho <= 0.0:
            break
        total += rho
    return n / (1.0 + 2.0 * total)


def summarize(samples, probs=DEFAULT_PROBS, level=0.95, lag=10):
    """JSON-ready summary: quantiles, coefficient quantiles, graph and diagnostics."""
    corr, names = _as_draws(samples)
    table = correlation_quantiles(corr, probs)
    coef_q = coefficient_quantiles(corr, probs)
    p = corr.shape[1]
    pairs = []
    for j, k in zip(*np.triu_indices(p, k=1)):
        series = corr[:, j, k]
        pairs.append({
            "a": names[j],
            "b": names[k],
            "quantiles": [float(v) for v in table.values[:, j, k]],
            "acf": autocorrelation(series, lag) if series.shape[0] > lag else None,
            "ess": effective_sample_size(series) if series.shape[0] >= 10 else None,
        })
    coefficients = {
        names[j]: {
            names[k]: [float(v) for v in coef_q[:, j, k]]
            for k in range(p) if k != j
        }
        for j in range(p)
    }
    graph = dependence_graph(samples, level).to_dict() if corr.shape[0] >= 2 else None
    return {
        "columns": list(names),
        "n_samples": int(corr.shape[0]),
        "probs": list(table.probs),
        "lag": lag,
        "correlations": pairs,
        "coefficients": coefficients,
        "graph": graph,
    }
