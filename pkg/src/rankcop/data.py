"""Mixed-type tabular data with ordinal encodings and empirical marginals.

Every column is handled as ordinal: its sorted distinct observed values form
the level table and each row carries a 1-based level code (``MISSING_CODE``
for a missing cell). Continuous columns are just the no-ties case.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import DataError, ParseError
from .numeric import normal_quantile

__all__ = [
    "MISSING_CODE",
    "ObservedColumn",
    "Dataset",
    "EmpiricalMarginal",
    "load_csv",
    "write_csv",
    "read_level_orders",
    "empirical_quantile",
    "normal_scores",
]

MISSING_CODE = 0


@dataclass(frozen=True, eq=False)
class ObservedColumn:
    """One variable: raw values (NaN = missing), level table and level codes.

    ``labels`` is set for text columns read with an explicit level order; the
    numeric value ``k`` then stands for ``labels[k - 1]``.
    """

    name: str
    values: np.ndarray
    levels: np.ndarray
    codes: np.ndarray
    labels: tuple[str, ...] | None = None

    @classmethod
    def from_values(cls, name, values, labels=None):
        values = np.array(values, dtype=float)
        if values.ndim != 1:
            raise DataError(f"column {name!r}: values must be one-dimensional")
        if np.any(np.isinf(values)):
            raise DataError(f"column {name!r}: infinite values are not allowed")
        observed = ~np.isnan(values)
        levels = np.unique(values[observed])
        codes = np.full(values.shape, MISSING_CODE, dtype=np.int64)
        codes[observed] = np.searchsorted(levels, values[observed]) + 1
        values.setflags(write=False)
        levels.setflags(write=False)
        codes.setflags(write=False)
        return cls(name, values, levels, codes, None if labels is None else tuple(labels))

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def missing(self):
        return self.codes == MISSING_CODE

    @cached_property
    def level_groups(self):
        """Row indices grouped by level, for the latent sweep.

        Returns ``(order, starts, missing_rows)``: rows of level ``r`` (0-based)
        are ``order[starts[r]:starts[r + 1]]``.
        """
        observed = np.flatnonzero(self.codes != MISSING_CODE)
        order = observed[np.argsort(self.codes[observed], kind="stable")]
        counts = np.bincount(self.codes[observed] - 1, minlength=len(self.levels))
        starts = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        missing_rows = np.flatnonzero(self.codes == MISSING_CODE)
        return order.astype(np.int64), starts, missing_rows.astype(np.int64)

    def marginal(self):
        return EmpiricalMarginal.from_column(self)

    def format_value(self, value):
        if np.isnan(value):
            return None
        if self.labels is not None:
            return self.labels[int(value) - 1]
        return _format_number(value)


@dataclass(frozen=True, eq=False)
class Dataset:
    """An n-by-p table of :class:`ObservedColumn` objects.

    Every column must have at least one observed value, except in the
    zero-row dataset (used to run the sampler on the prior alone).
    """

    columns: tuple[ObservedColumn, ...]

    def __post_init__(self):
        if not self.columns:
            raise DataError("dataset has no columns")
        lengths = {c.n for c in self.columns}
        if len(lengths) != 1:
            raise DataError(f"columns have unequal lengths {sorted(lengths)}")
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise DataError("duplicate column names")
        if self.n > 0:
            for c in self.columns:
                if len(c.levels) == 0:
                    raise DataError(f"column {c.name!r} has no observed values")

    @classmethod
    def from_array(cls, values, names=None, labels=None):
        """Build a dataset from an ``(n, p)`` float array with NaN for missing."""
        values = np.asarray(values, dtype=float)
        if values.ndim != 2:
            raise DataError("expected a two-dimensional array")
        if names is None:
            names = [f"V{j + 1}" for j in range(values.shape[1])]
        if len(names) != values.shape[1]:
            raise DataError("number of names does not match number of columns")
        labels = labels or {}
        return cls(tuple(
            ObservedColumn.from_values(name, values[:, j], labels.get(name))
            for j, name in enumerate(names)
        ))

    @property
    def n(self):
        return self.columns[0].n

    @property
    def p(self):
        return len(self.columns)

    @property
    def names(self):
        return tuple(c.name for c in self.columns)

    @property
    def values(self):
        return np.column_stack([c.values for c in self.columns]) if self.n else np.empty((0, self.p))

    @property
    def codes(self):
        return np.column_stack([c.codes for c in self.columns]) if self.n else np.empty((0, self.p), int)

    @property
    def labels(self):
        return {c.name: c.labels for c in self.columns if c.labels is not None}

    def column(self, key):
        if isinstance(key, (int, np.integer)):
            return self.columns[key]
        for c in self.columns:
            if c.name == key:
                return c
        raise DataError(f"unknown column {key!r}")

    def index(self, name):
        try:
            return self.names.index(name)
        except ValueError:
            raise DataError(f"unknown column {name!r}") from None

    def content_hash(self):
        """SHA-256 over column names, labels and the raw value bytes."""
        h = hashlib.sha256()
        for c in self.columns:
            h.update(c.name.encode())
            h.update(b"\0")
            h.update(json.dumps(c.labels).encode())
            h.update(np.ascontiguousarray(c.values, dtype="<f8").tobytes())
        return h.hexdigest()


@dataclass(frozen=True, eq=False)
class EmpiricalMarginal:
    """Empirical CDF of one column's observed values."""

    levels: np.ndarray
    counts: np.ndarray
    cumprob: np.ndarray = field(repr=False)

    @classmethod
    def from_values(cls, values):
        values = np.asarray(values, dtype=float)
        values = values[~np.isnan(values)]
        if values.size == 0:
            raise DataError("empirical marginal needs at least one observed value")
        levels, counts = np.unique(values, return_counts=True)
        return cls(levels, counts, np.cumsum(counts) / counts.sum())

    @classmethod
    def from_column(cls, column):
        return cls.from_values(column.values)

    @property
    def total(self):
        return int(self.counts.sum())

    def cdf(self, y):
        """``F(y) = #{values <= y} / N`` elementwise."""
        idx = np.searchsorted(self.levels, np.asarray(y, dtype=float), side="right")
        return np.concatenate([[0.0], self.cumprob])[idx]

    def _quantile(self, u):
        # smallest level with F >= u; u outside (0, 1) clips to the extremes
        idx = np.searchsorted(self.cumprob, np.asarray(u, dtype=float), side="left")
        return self.levels[np.minimum(idx, len(self.levels) - 1)]

    def quantile(self, u):
        """Pseudo-inverse ``inf {y : F(y) >= u}`` for ``u`` in (0, 1)."""
        arr = np.asarray(u, dtype=float)
        if not np.all((arr > 0.0) & (arr < 1.0)):
            raise ValueError("empirical quantile requires u strictly inside (0, 1)")
        out = self._quantile(arr)
        return float(out) if np.ndim(out) == 0 else out


def empirical_quantile(marginal, u):
    """Smallest observed value ``y`` with ``F(y) >= u``."""
    return marginal.quantile(u)


def normal_scores(column):
    """Normal-scores pseudo-data ``Phi^{-1}[n/(n+1) * F(y)]``.

    ``column`` may be an :class:`ObservedColumn` or any 1-d array without
    missing values. Tied values receive identical scores.
    """
    values = column.values if isinstance(column, ObservedColumn) else np.asarray(column, dtype=float)
    if np.any(np.isnan(values)):
        raise DataError("normal scores are undefined for missing values")
    n = values.shape[0]
    if n == 0:
        return np.empty(0)
    below = np.searchsorted(np.sort(values), values, side="right")
    return normal_quantile(below / (n + 1.0))


# ---------------------------------------------------------------------------
# CSV input/output

def _format_number(v):
    v = float(v)
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def read_level_orders(path):
    """Read a JSON sidecar mapping column name to its ordered list of labels."""
    try:
        with open(path, encoding="utf-8") as fh:
            orders = json.load(fh)
    except FileNotFoundError:
        raise DataError(f"level-order file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"level-order file {path} is not valid JSON: {exc}") from None
    if not isinstance(orders, dict) or not all(isinstance(v, list) for v in orders.values()):
        raise DataError(f"level-order file {path} must map column names to lists")
    return {k: [str(x) for x in v] for k, v in orders.items()}


def load_csv(path, missing: str = "NA", level_orders: Mapping[str, Sequence[str]] | str | Path | None = None):
    """Read a comma-separated file with a header row into a :class:`Dataset`.

    Cells must be numeric or the ``missing`` token. A non-numeric column is
    accepted only when ``level_orders`` lists its labels in increasing order;
    its cells are then coded by 1-based position in that list.
    """
    if isinstance(level_orders, (str, Path)):
        level_orders = read_level_orders(level_orders)
    level_orders = dict(level_orders or {})
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except FileNotFoundError:
        raise DataError(f"input file not found: {path}") from None
    except UnicodeDecodeError as exc:
        raise DataError(f"{path} is not UTF-8: {exc}") from None
    if not rows:
        raise DataError(f"{path} is empty; a header row is required")
    header = [h.strip() for h in rows[0]]
    unknown = set(level_orders) - set(header)
    if unknown:
        raise DataError(f"level order given for unknown columns {sorted(unknown)}")
    body = rows[1:]
    values = np.full((len(body), len(header)), np.nan)
    for i, row in enumerate(body):
        line = i + 2
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, found {len(row)}", row=line)
        for j, cell in enumerate(row):
            cell = cell.strip()
            name = header[j]
            if cell == missing:
                continue
            if name in level_orders:
                try:
                    values[i, j] = level_orders[name].index(cell) + 1
                except ValueError:
                    raise ParseError(f"label {cell!r} not in the given level order", line, name) from None
                continue
            try:
                values[i, j] = float(cell)
            except ValueError:
                raise ParseError(
                    f"non-numeric value {cell!r}; supply a level order for text columns", line, name
                ) from None
            if not np.isfinite(values[i, j]):
                raise ParseError(f"non-finite value {cell!r}", line, name)
    if body:
        empty = [header[j] for j in range(len(header)) if np.all(np.isnan(values[:, j]))]
        if empty:
            raise DataError(f"columns with no observed values: {empty}")
    return Dataset.from_array(values, header, {k: tuple(v) for k, v in level_orders.items()})


def write_csv(dataset, path, missing="NA"):
    """Write ``dataset`` in the same dialect :func:`load_csv` reads."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(dataset.names)
        for i in range(dataset.n):
            writer.writerow([
                missing if (s := c.format_value(c.values[i])) is None else s
                for c in dataset.columns
            ])
