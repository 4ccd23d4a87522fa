"""Datasets and the LIBSVM sparse text format.

Grammar, one example per line::

    <label> <index>:<value> <index>:<value> ...

Indices are 1-based and strictly increasing; tokens are whitespace
separated.  Blank lines are skipped (but still counted for line numbers).
"""
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError


@dataclass
class Dataset:
    """Dense feature matrix with targets.

    ``task`` is ``"regression"`` or ``"classification"``; classification
    targets must be +1 / -1.  ``meta`` carries provenance (seed, source,
    standardization statistics, ...).
    """

    X: np.ndarray
    y: np.ndarray
    task: str = "regression"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.y = np.asarray(self.y, dtype=float).reshape(-1)
        if self.X.ndim == 1:
            self.X = self.X.reshape(-1, 1)
        if self.X.ndim != 2:
            raise ValueError(f"X must be 2-d, got shape {self.X.shape}")
        if self.X.shape[0] != self.y.shape[0]:
            raise ValueError(f"X has {self.X.shape[0]} rows but y has {self.y.shape[0]}")
        if self.X.shape[0] < 1:
            raise ValueError("dataset must contain at least one example")
        if not (np.all(np.isfinite(self.X)) and np.all(np.isfinite(self.y))):
            raise ValueError("dataset contains non-finite entries")
        if self.task not in ("regression", "classification"):
            raise ValueError(f"unknown task {self.task!r}")
        if self.task == "classification" and not np.all(np.abs(self.y) == 1):
            raise ValueError("classification targets must be +1 or -1")

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def d(self):
        return self.X.shape[1]

    def subset(self, index):
        index = np.asarray(index)
        return Dataset(self.X[index], self.y[index], self.task, dict(self.meta))


def _parse_float(tok, line, what):
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(f"{what} {tok!r} is not a number", line) from None
    if not math.isfinite(v):
        raise ParseError(f"{what} {tok!r} is not finite", line)
    return v


def parse_libsvm(stream, task="auto", n_features=None):
    """Read LIBSVM text into a dense :class:`Dataset`.

    Parameters
    ----------
    stream : text file object or str
        Open text stream, or the file contents as a string.
    task : {"auto", "classification", "regression"}
        ``"auto"`` treats exactly two distinct labels as a binary task.
        Binary labels are mapped to +1/-1, the smaller label going to -1.
    n_features : int, optional
        Force the matrix width (must be at least the largest index seen).

    Raises
    ------
    ParseError
        On any malformed line, with its 1-based line number; also on input
        containing no examples.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    labels = []
    rows = []
    width = 0
    last_line = 0
    for lineno, raw in enumerate(stream, start=1):
        last_line = lineno
        toks = raw.split()
        if not toks:
            continue
        label = _parse_float(toks[0], lineno, "label")
        prev = 0
        idx, vals = [], []
        for tok in toks[1:]:
            head, sep, tail = tok.partition(":")
            if not sep or not head or not tail:
                raise ParseError(f"malformed pair {tok!r}", lineno)
            if not head.isdigit():
                raise ParseError(f"index {head!r} is not a positive integer", lineno)
            i = int(head)
            if i < 1:
                raise ParseError(f"index {i} is not 1-based", lineno)
            if i <= prev:
                raise ParseError(f"index {i} does not increase (previous {prev})", lineno)
            prev = i
            idx.append(i - 1)
            vals.append(_parse_float(tail, lineno, "value"))
        width = max(width, prev)
        labels.append(label)
        rows.append((idx, vals))
    if not rows:
        raise ParseError("no examples found", max(last_line, 1))
    if n_features is not None:
        if n_features < width:
            raise ValueError(f"n_features={n_features} is smaller than max index {width}")
        width = n_features

    X = np.zeros((len(rows), width))
    for r, (idx, vals) in enumerate(rows):
        X[r, idx] = vals
    y = np.asarray(labels)

    distinct = np.unique(y)
    if task == "auto":
        task = "classification" if distinct.size == 2 else "regression"
    if task == "classification":
        if distinct.size > 2:
            raise ValueError(f"binary task expected, found {distinct.size} labels")
        if distinct.size == 2:
            y = np.where(y == distinct[0], -1.0, 1.0)
        elif not np.all(np.abs(y) == 1):
            raise ValueError("single-label file cannot be mapped to +1/-1")
    meta = {"lines": last_line, "n": len(rows), "d": width}
    if distinct.size == 2:
        meta["label_map"] = {repr(float(distinct[0])): -1, repr(float(distinct[1])): 1}
    return Dataset(X, y, task, meta)


def _fmt(v):
    v = float(v)
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def serialize_libsvm(data):
    """Inverse of :func:`parse_libsvm` (zero entries are omitted)."""
    out = []
    for x, label in zip(data.X, data.y):
        if data.task == "classification":
            parts = ["+1" if label > 0 else "-1"]
        else:
            parts = [_fmt(label)]
        nz = np.flatnonzero(x)
        parts.extend(f"{j + 1}:{_fmt(x[j])}" for j in nz)
        out.append(" ".join(parts))
    return "\n".join(out) + "\n"


def load_libsvm(path, task="auto", n_features=None):
    with open(path, encoding="utf-8") as fh:
        data = parse_libsvm(fh, task=task, n_features=n_features)
    data.meta["source"] = str(path)
    return data
