"""Equal-frequency discretization and plug-in mutual information (nats)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DiscreteColumn:
    """Integer bin codes in [0, bin_count)."""

    codes: np.ndarray
    bin_count: int

    def __post_init__(self):
        if self.bin_count < 1:
            raise ValueError("bin_count must be at least 1")
        if self.codes.size and (self.codes.min() < 0
                                or self.codes.max() >= self.bin_count):
            raise ValueError("codes must lie in [0, bin_count)")


def from_labels(y: np.ndarray) -> DiscreteColumn:
    """Wrap already-discrete class codes without re-binning."""
    y = np.asarray(y, dtype=np.int64)
    return DiscreteColumn(codes=y, bin_count=int(y.max()) + 1)


def discretize_equal_frequency(x: np.ndarray, bins: int) -> DiscreteColumn:
    """Assign rank-quantile bin codes; equal values always share a bin.

    Boundaries are interior quantiles of the given column, so a constant
    column collapses to a single bin.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        raise ValueError("cannot discretize an empty column")
    if bins < 1:
        raise ValueError("bins must be at least 1")
    if bins == 1:
        return DiscreteColumn(codes=np.zeros(x.size, dtype=np.int64),
                              bin_count=1)
    edges = np.quantile(x, np.arange(1, bins) / bins)
    codes = np.searchsorted(edges, x, side="left").astype(np.int64)
    return DiscreteColumn(codes=codes, bin_count=int(codes.max()) + 1)


def mutual_information(a: DiscreteColumn, b: DiscreteColumn) -> float:
    """Plug-in estimate sum p(a,b) ln[p(a,b)/(p(a)p(b))] over observed cells.

    Exactly symmetric in its arguments: the per-cell terms are sorted before
    summation, so transposing the joint table cannot change the result.
    """
    if a.codes.shape != b.codes.shape:
        raise ValueError("columns must have equal length")
    n = a.codes.size
    joint = np.bincount(a.codes * b.bin_count + b.codes,
                        minlength=a.bin_count * b.bin_count
                        ).reshape(a.bin_count, b.bin_count)
    pa = joint.sum(axis=1) / n
    pb = joint.sum(axis=0) / n
    pj = joint / n
    rows, cols = np.nonzero(joint)
    terms = pj[rows, cols] * np.log(pj[rows, cols]
                                    / (pa[rows] * pb[cols]))
    return max(float(np.sort(terms).sum()), 0.0)
