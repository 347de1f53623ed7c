"""Saved posterior draws of the correlation matrix and their on-disk format.

A posterior is stored as two files: a CSV with one row per saved scan whose
columns are the strict upper triangle of ``C`` (headers ``A:B``), and a JSON
metadata file next to it carrying the run configuration and content hashes.
"""

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import DataError

__all__ = ["PosteriorSamples", "write_posterior", "read_posterior", "metadata_path"]

FORMAT_NAME = "rankcop-posterior"


@dataclass(eq=False)
class PosteriorSamples:
    """Ordered correlation-matrix draws from one chain.

    Attributes
    ----------
    corr : ndarray, shape (S, p, p)
        Saved correlation matrices in scan order.
    names : tuple of str
        Column names, in matrix order.
    metadata : dict
        Run configuration echo (prior, config, seed, data hash, ...).
    latent : ndarray, shape (S, n, p), optional
        Latent matrix snapshots when requested.
    """

    corr: np.ndarray
    names: tuple
    metadata: dict = field(default_factory=dict)
    latent: np.ndarray | None = None

    def __post_init__(self):
        self.corr = np.asarray(self.corr, dtype=float)
        if self.corr.ndim != 3 or self.corr.shape[1] != self.corr.shape[2]:
            raise ValueError(f"expected an (S, p, p) array, got shape {self.corr.shape}")
        self.names = tuple(self.names)
        if len(self.names) != self.corr.shape[1]:
            raise ValueError("number of names does not match matrix dimension")

    def __len__(self):
        return self.corr.shape[0]

    @property
    def p(self):
        return self.corr.shape[1]

    def pairs(self):
        """Index pairs ``(j, k)``, ``j < k``, in the flattened-file order."""
        return list(zip(*np.triu_indices(self.p, k=1)))

    def entry(self, j, k):
        return self.corr[:, j, k]

    def flat(self):
        """``(S, p(p-1)/2)`` array of upper-triangle entries."""
        iu = np.triu_indices(self.p, k=1)
        return self.corr[:, iu[0], iu[1]]

    def pair_labels(self):
        return [f"{self.names[j]}:{self.names[k]}" for j, k in self.pairs()]


def metadata_path(path):
    return Path(path).with_suffix(".json")


def _samples_csv_bytes(samples):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(samples.pair_labels())
    for row in samples.flat():
        writer.writerow([repr(float(x)) for x in row])
    return buf.getvalue().encode("utf-8")


def write_posterior(samples, path):
    """Write the sample CSV to ``path`` and metadata JSON beside it.

    Returns the pair of paths written. Output is byte-identical for identical
    inputs.
    """
    path = Path(path)
    payload = _samples_csv_bytes(samples)
    meta = dict(samples.metadata)
    meta.update(
        format=FORMAT_NAME,
        version=__version__,
        columns=list(samples.names),
        n_saved=len(samples),
        samples_sha256=hashlib.sha256(payload).hexdigest(),
    )
    path.write_bytes(payload)
    meta_file = metadata_path(path)
    meta_file.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path, meta_file


def read_posterior(path, meta_path=None, verify=True):
    """Load a posterior written by :func:`write_posterior`.

    With ``verify`` the CSV's SHA-256 must match the metadata record;
    a mismatch raises :class:`~rankcop.errors.DataError`.
    """
    path = Path(path)
    meta_path = Path(meta_path) if meta_path else metadata_path(path)
    try:
        payload = path.read_bytes()
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise DataError(f"posterior file not found: {exc.filename}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"metadata {meta_path} is not valid JSON: {exc}") from None
    if meta.get("format") != FORMAT_NAME:
        raise DataError(f"{meta_path} is not posterior metadata")
    if verify and hashlib.sha256(payload).hexdigest() != meta.get("samples_sha256"):
        raise DataError(f"{path} does not match the content hash recorded in {meta_path}")
    names = meta["columns"]
    p = len(names)
    rows = list(csv.reader(io.StringIO(payload.decode("utf-8"))))
    iu = np.triu_indices(p, k=1)
    expected = [f"{names[j]}:{names[k]}" for j, k in zip(*iu)]
    if rows and rows[0] != expected:
        raise DataError(f"{path} header does not match metadata columns")
    flat = np.array([[float(x) for x in r] for r in rows[1:]], dtype=float).reshape(-1, len(expected))
    corr = np.repeat(np.eye(p)[None], flat.shape[0], axis=0)
    corr[:, iu[0], iu[1]] = flat
    corr[:, iu[1], iu[0]] = flat
    return PosteriorSamples(corr, names, meta)
