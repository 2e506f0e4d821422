"""
Metric-dataset ingestion and analysis: CSV loading, row cleaning, Pearson and
Spearman correlation against the target, min-max scaling and threshold-based
feature selection.
"""

from __future__ import annotations

import csv
import hashlib
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (InsufficientData, ParseError, SchemaError, ZeroRange,
                     ZeroVariance)

log = logging.getLogger(__name__)

IGNORED_COLUMNS = ("date",)


@dataclass(frozen=True, eq=False)
class Dataset:
    feature_names: tuple[str, ...]
    features: np.ndarray  # (rows, features)
    target: np.ndarray  # (rows,)
    target_name: str
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=float)
        if feats.ndim == 1:
            feats = feats.reshape(-1, len(self.feature_names))
        tgt = np.asarray(self.target, dtype=float).reshape(-1)
        if feats.shape[1] != len(self.feature_names):
            raise SchemaError("feature matrix width does not match feature_names")
        if feats.shape[0] != tgt.shape[0]:
            raise SchemaError("feature and target row counts differ")
        feats.setflags(write=False)
        tgt.setflags(write=False)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "target", tgt)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def n_rows(self) -> int:
        return self.target.shape[0]

    def column(self, name: str) -> np.ndarray:
        return self.features[:, self.feature_names.index(name)]

    def select(self, names: Sequence[str]) -> "Dataset":
        idx = [self.feature_names.index(n) for n in names]
        return Dataset(tuple(names), self.features[:, idx], self.target,
                       self.target_name, self.notes)

    def rows(self, start: int, stop: int | None = None) -> "Dataset":
        return Dataset(self.feature_names, self.features[start:stop],
                       self.target[start:stop], self.target_name, self.notes)

    def digest(self) -> bytes:
        """SHA-256 of a canonical text serialization (names, then repr'd rows)."""
        h = hashlib.sha256()
        h.update(",".join(self.feature_names + (self.target_name,)).encode())
        for xs, y in zip(self.features, self.target):
            h.update(b"\n")
            h.update(",".join(repr(float(v)) for v in (*xs, y)).encode())
        return h.digest()


def _parse_cell(cell: str, row: int, col: str) -> float:
    s = cell.strip()
    if s == "":
        return math.nan
    try:
        return float(s)
    except ValueError:
        raise ParseError(row, col, cell) from None


def load_csv(path: str | Path, target_name: str) -> Dataset:
    """Read a header-first CSV. Row numbers in errors count the header as row 1.

    Empty cells load as NaN and are left for :func:`clean` to drop.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        if target_name not in header:
            raise SchemaError(f"{path}: target column {target_name!r} missing")
        t_idx = header.index(target_name)
        f_idx = [i for i, h in enumerate(header)
                 if i != t_idx and h.lower() not in IGNORED_COLUMNS]
        feats, target = [], []
        for lineno, rec in enumerate(reader, start=2):
            if not rec or all(not c.strip() for c in rec):
                continue
            if len(rec) != len(header):
                raise SchemaError(f"{path}: row {lineno} has {len(rec)} cells, "
                                  f"expected {len(header)}")
            feats.append([_parse_cell(rec[i], lineno, header[i]) for i in f_idx])
            target.append(_parse_cell(rec[t_idx], lineno, target_name))
    names = tuple(header[i] for i in f_idx)
    return Dataset(names, np.array(feats, dtype=float).reshape(-1, len(names)),
                   np.array(target, dtype=float), target_name)


def clean(d: Dataset) -> Dataset:
    """Drop rows with missing/non-finite values, then constant feature columns."""
    ok = np.isfinite(d.features).all(axis=1) & np.isfinite(d.target)
    if ok.sum() < 2:
        raise InsufficientData(f"{int(ok.sum())} valid rows remain, need at least 2")
    feats, target = d.features[ok], d.target[ok]
    notes = list(d.notes)
    dropped_rows = int((~ok).sum())
    if dropped_rows:
        notes.append(f"dropped {dropped_rows} rows with missing or non-finite values")
    keep = []
    for j, name in enumerate(d.feature_names):
        if np.ptp(feats[:, j]) == 0:
            msg = f"dropped constant feature {name!r}"
            log.warning(msg)
            notes.append(msg)
        else:
            keep.append(j)
    return Dataset(tuple(d.feature_names[j] for j in keep), feats[:, keep], target,
                   d.target_name, tuple(notes))


def pearson(xs, ys) -> float:
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or x.size < 2:
        raise ValueError("pearson needs two equal-length sequences of >= 2 values")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0 or syy == 0:
        raise ZeroVariance("pearson correlation of a constant sequence")
    return float(dx @ dy) / math.sqrt(sxx * syy)


def average_ranks(values) -> np.ndarray:
    """1-based ranks; tied values share the mean of their positions."""
    v = np.asarray(values, dtype=float)
    order = np.argsort(v, kind="mergesort")
    ranks = np.empty(v.size, dtype=float)
    sv = v[order]
    i = 0
    while i < v.size:
        j = i
        while j + 1 < v.size and sv[j + 1] == sv[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def spearman(xs, ys) -> float:
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or x.size < 2:
        raise ValueError("spearman needs two equal-length sequences of >= 2 values")
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise ZeroVariance("spearman correlation of a constant sequence")
    rx, ry = average_ranks(x), average_ranks(y)
    n = x.size
    if np.unique(x).size == n and np.unique(y).size == n:
        d = rx - ry
        return 1.0 - 6.0 * float(d @ d) / (n * (n * n - 1))
    # ties: the rank-difference formula no longer holds
    return pearson(rx, ry)


@dataclass(frozen=True)
class CorrelationReport:
    pearson_r: dict[str, float]
    spearman_rho: dict[str, float]

    def strength(self, name: str) -> float:
        return max(abs(self.pearson_r[name]), abs(self.spearman_rho[name]))

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(self.pearson_r)

    def to_dict(self) -> dict:
        return {n: {"pearson": self.pearson_r[n], "spearman": self.spearman_rho[n]}
                for n in self.feature_names}


def correlate(d: Dataset) -> CorrelationReport:
    return CorrelationReport(
        {n: pearson(d.features[:, j], d.target) for j, n in enumerate(d.feature_names)},
        {n: spearman(d.features[:, j], d.target) for j, n in enumerate(d.feature_names)},
    )


@dataclass(frozen=True)
class ScalerParams:
    feature_names: tuple[str, ...]
    mins: tuple[float, ...]
    maxs: tuple[float, ...]

    def __post_init__(self):
        for n, lo, hi in zip(self.feature_names, self.mins, self.maxs):
            if not hi > lo:
                raise ZeroRange(f"feature {n!r} has max <= min")

    def apply(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        lo, hi = np.array(self.mins), np.array(self.maxs)
        return (x - lo) / (hi - lo)

    def invert(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        lo, hi = np.array(self.mins), np.array(self.maxs)
        return z * (hi - lo) + lo

    def select(self, names: Sequence[str]) -> "ScalerParams":
        idx = [self.feature_names.index(n) for n in names]
        return ScalerParams(tuple(names), tuple(self.mins[i] for i in idx),
                            tuple(self.maxs[i] for i in idx))


def normalize(d: Dataset) -> tuple[Dataset, ScalerParams]:
    """Min-max scale every feature onto [0, 1]; the target is left as is."""
    lo = d.features.min(axis=0)
    hi = d.features.max(axis=0)
    for n, a, b in zip(d.feature_names, lo, hi):
        if b == a:
            raise ZeroRange(f"feature {n!r} is constant")
    params = ScalerParams(d.feature_names, tuple(map(float, lo)), tuple(map(float, hi)))
    return (Dataset(d.feature_names, params.apply(d.features), d.target,
                    d.target_name, d.notes), params)


def denormalize(d: Dataset, params: ScalerParams) -> Dataset:
    return Dataset(d.feature_names, params.invert(d.features), d.target,
                   d.target_name, d.notes)


def select_features(report: CorrelationReport, threshold: float) -> list[str]:
    """Names with max(|r|, |rho|) >= threshold, strongest first, ties by name."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must lie in [0, 1], got {threshold}")
    chosen = [n for n in report.feature_names if report.strength(n) >= threshold]
    return sorted(chosen, key=lambda n: (-report.strength(n), n))


def train_eval_split(d: Dataset, train_fraction: float = 0.8) -> tuple[Dataset, Dataset]:
    """Time-ordered split: the first ``train_fraction`` of rows trains."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must lie in (0, 1)")
    cut = int(round(d.n_rows * train_fraction))
    cut = min(max(cut, 1), d.n_rows - 1)
    return d.rows(0, cut), d.rows(cut)


def synthetic_dataset(n_features: int, n_rows: int, seed: int,
                      noise: float = 0.0) -> tuple[Dataset, np.ndarray, float]:
    """Rows drawn from a known linear model; returns (dataset, weights, intercept)."""
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, 1.0, size=(n_rows, n_features))
    w = rng.uniform(-1.0, 1.0, size=n_features)
    b = float(rng.uniform(-1.0, 1.0))
    y = x @ w + b
    if noise:
        y = y + rng.normal(0.0, noise, size=n_rows)
    names = tuple(f"f{j:02d}" for j in range(n_features))
    return Dataset(names, x, y, "target"), w, b
