"""CSV ingestion, task/variant handling, label encoding, splits, scaling.

Everything here is a pure transformation of immutable inputs; no function
mutates its arguments or keeps hidden state, so values can be shared freely
across threads.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np


class Task(Enum):
    BINARY = "binary"
    MULTICLASS = "multiclass"


class Variant(Enum):
    CURRENT = "current"
    SPEED = "speed"
    COMBINED = "combined"


DEFAULT_GROUP_PREFIXES: Mapping[Variant, tuple[str, ...]] = {
    Variant.CURRENT: ("CURRENT",),
    Variant.SPEED: ("ROTO",),
}


@dataclass(frozen=True)
class Dataset:
    """Feature matrix with named columns, encoded labels and task metadata.

    Class codes are contiguous from 0 and every code occurs at least once.
    """

    feature_names: tuple[str, ...]
    X: np.ndarray
    y: np.ndarray
    class_names: tuple[str, ...]
    task: Task
    variant: Variant

    def __post_init__(self):
        if self.X.ndim != 2:
            raise ValueError("X must be a 2-D matrix")
        if self.X.shape[0] != self.y.shape[0]:
            raise ValueError("X row count must equal label count")
        if len(self.feature_names) != self.X.shape[1]:
            raise ValueError("feature_names length must equal column count")
        if len(set(self.feature_names)) != len(self.feature_names):
            raise ValueError("duplicate feature names")
        codes = np.unique(self.y)
        expected = np.arange(len(self.class_names))
        if not np.array_equal(codes, expected):
            raise ValueError(
                "class codes must be contiguous from 0 and all present; "
                f"got {codes.tolist()} for {len(self.class_names)} classes"
            )
        if self.task is Task.BINARY and len(self.class_names) != 2:
            raise ValueError("binary task requires exactly 2 classes")

    @property
    def n_samples(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)


@dataclass(frozen=True)
class Standardizer:
    """Per-feature location/scale fitted on a training partition only."""

    means: np.ndarray
    scales: np.ndarray

    def __post_init__(self):
        if self.means.shape != self.scales.shape:
            raise ValueError("means and scales must have equal length")
        if np.any(self.scales <= 0):
            raise ValueError("scales must be strictly positive")


@dataclass(frozen=True)
class Split:
    """Train/test index pair from one fold of one stratified repeat."""

    repeat_id: int
    fold_id: int
    train_indices: np.ndarray
    test_indices: np.ndarray


def child_seed(seed: int, *key: int) -> int:
    """Derive a deterministic sub-seed from a root seed and an integer key."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(key))
    return int(ss.generate_state(1)[0])


def load_csv(path, label_column: str = "class",
             class_order: Sequence[str] | None = None) -> Dataset:
    """Load a feature table from CSV with a header row and one label column.

    Every non-label cell must parse as a real number; parse failures report
    the offending row and column.  Class codes follow ``class_order`` when
    given, otherwise sorted class-name order.  The result carries the
    combined variant and the multiclass task.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"dataset file not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"empty dataset file: {path}") from None
        header = [h.strip() for h in header]
        if label_column not in header:
            raise ValueError(
                f"label column {label_column!r} not in header {header}"
            )
        label_idx = header.index(label_column)
        feature_names = [h for i, h in enumerate(header) if i != label_idx]
        if len(set(feature_names)) != len(feature_names):
            dupes = sorted({n for n in feature_names
                            if feature_names.count(n) > 1})
            raise ValueError(f"duplicate feature name(s): {dupes}")
        rows: list[list[float]] = []
        labels: list[str] = []
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(
                    f"row {row_no}: expected {len(header)} cells, got {len(row)}"
                )
            vals = []
            for i, cell in enumerate(row):
                if i == label_idx:
                    labels.append(cell.strip())
                    continue
                try:
                    vals.append(float(cell))
                except ValueError:
                    raise ValueError(
                        f"non-numeric value {cell!r} at row {row_no}, "
                        f"column {header[i]!r}"
                    ) from None
            rows.append(vals)
    if not rows:
        raise ValueError(f"dataset has no data rows: {path}")

    present = sorted(set(labels))
    if class_order is not None:
        missing = [c for c in present if c not in class_order]
        if missing:
            raise ValueError(f"class_order does not cover classes {missing}")
        class_names = tuple(c for c in class_order if c in present)
    else:
        class_names = tuple(present)
    code_of = {name: i for i, name in enumerate(class_names)}
    y = np.array([code_of[lab] for lab in labels], dtype=np.int64)
    X = np.array(rows, dtype=np.float64)
    return Dataset(feature_names=tuple(feature_names), X=X, y=y,
                   class_names=class_names, task=Task.MULTICLASS,
                   variant=Variant.COMBINED)


def select_variant(d: Dataset, variant: Variant,
                   group_prefixes: Mapping[Variant, Sequence[str]] = DEFAULT_GROUP_PREFIXES,
                   ) -> Dataset:
    """Restrict columns to one feature group by name prefix.

    The combined variant keeps all columns; column order is preserved.
    """
    if variant is Variant.COMBINED:
        return replace(d, variant=Variant.COMBINED)
    prefixes = tuple(group_prefixes[variant])
    keep = [j for j, name in enumerate(d.feature_names)
            if name.startswith(prefixes)]
    if not keep:
        raise ValueError(
            f"variant {variant.value!r} with prefixes {list(prefixes)} "
            "matches no feature columns"
        )
    return replace(
        d,
        feature_names=tuple(d.feature_names[j] for j in keep),
        X=d.X[:, keep],
        variant=variant,
    )


def encode_binary(d: Dataset, healthy_class: str) -> Dataset:
    """Merge all non-healthy classes into one; healthy becomes code 0."""
    if healthy_class not in d.class_names:
        raise ValueError(
            f"healthy class {healthy_class!r} not among {list(d.class_names)}"
        )
    healthy_code = d.class_names.index(healthy_class)
    y = (d.y != healthy_code).astype(np.int64)
    if np.unique(y).size < 2:
        raise ValueError("binary encoding left a single class")
    return replace(d, y=y, class_names=(healthy_class, "Faulty"),
                   task=Task.BINARY)


def fit_standardizer(X_train: np.ndarray) -> Standardizer:
    """Column means and sample standard deviations (n-1 denominator).

    Zero-variance columns get scale 1 so they stay centered but inert.
    """
    X_train = np.asarray(X_train, dtype=np.float64)
    if X_train.ndim != 2 or X_train.shape[0] < 2:
        raise ValueError("need at least 2 rows to fit a standardizer")
    means = X_train.mean(axis=0)
    stds = X_train.std(axis=0, ddof=1)
    # tolerance catches constant columns whose float mean is inexact
    near_zero = stds <= 1e-12 * np.maximum(1.0, np.abs(means))
    scales = np.where(near_zero, 1.0, stds)
    return Standardizer(means=means, scales=scales)


def apply_standardizer(s: Standardizer, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != s.means.shape[0]:
        raise ValueError(
            f"expected {s.means.shape[0]} columns, got {X.shape[1] if X.ndim == 2 else 'non-2D'}"
        )
    return (X - s.means) / s.scales


def stratified_kfold(y: np.ndarray, K: int, repeat_count: int,
                     seed: int) -> list[Split]:
    """Repeated stratified K-fold splits, deterministic given the seed.

    Within-class index lists are shuffled with a counter-based generator
    keyed by (seed, repeat, class) and dealt round-robin into folds, so
    per-class fold counts differ by at most one.
    """
    y = np.asarray(y)
    if K < 2:
        raise ValueError("K must be at least 2")
    if repeat_count < 1:
        raise ValueError("repeat_count must be at least 1")
    classes, counts = np.unique(y, return_counts=True)
    too_small = [int(c) for c, n in zip(classes, counts) if n < K]
    if too_small:
        raise ValueError(
            f"classes {too_small} have fewer than K={K} members"
        )
    n = y.shape[0]
    splits: list[Split] = []
    for r in range(repeat_count):
        folds: list[list[int]] = [[] for _ in range(K)]
        for c in classes:
            idx = np.flatnonzero(y == c)
            ss = np.random.SeedSequence(entropy=seed, spawn_key=(r, int(c)))
            rng = np.random.Generator(np.random.Philox(ss))
            perm = rng.permutation(idx)
            for pos, sample in enumerate(perm):
                folds[pos % K].append(int(sample))
        all_idx = np.arange(n)
        for f in range(K):
            test = np.array(sorted(folds[f]), dtype=np.int64)
            mask = np.ones(n, dtype=bool)
            mask[test] = False
            train = all_idx[mask].astype(np.int64)
            splits.append(Split(repeat_id=r, fold_id=f,
                                train_indices=train, test_indices=test))
    return splits
