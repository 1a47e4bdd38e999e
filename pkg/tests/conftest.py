"""Shared data generators for the test suite."""

from __future__ import annotations

import csv

import numpy as np
import pytest
from scipy.special import expit


def make_logistic_data(n, p, planted=(), magnitude=2.0, seed=0,
                       intercept=0.0):
    """Standardized Gaussian design with labels from a logistic model.

    Returns (X, y, beta) where beta carries +-magnitude on the planted
    coordinates (signs drawn from the seed) and zero elsewhere.
    """
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, p))
    X = (X - X.mean(axis=0)) / X.std(axis=0, ddof=1)
    beta = np.zeros(p)
    planted = list(planted)
    if planted:
        beta[planted] = rng.choice([-1.0, 1.0], size=len(planted)) * magnitude
    y = (rng.random(n) < expit(intercept + X @ beta)).astype(np.int64)
    if y.min() == y.max():  # force both classes for degenerate draws
        y[0] = 1 - y[0]
    return X, y, beta


CLASS_NAMES = ("Healthy", "Mech_Damage", "Elec_Damage", "Mech_Elec_Damage")


def write_benchmark_like_csv(path, seed=0, per_class=46):
    """Write a 4-class CSV shaped like the benchmark table.

    13 current-prefixed and 13 speed-prefixed feature columns, one label
    column, with class-dependent shifts planted on a few features in each
    group so both diagnostic tasks are learnable.
    """
    rng = np.random.default_rng(seed)
    names = ([f"CURRENT_f{i:02d}" for i in range(1, 14)]
             + [f"ROTO_f{i:02d}" for i in range(1, 14)])
    shifts = np.zeros((4, 26))
    # current group separates faults from healthy; speed group separates
    # fault types, so combined features dominate either group alone
    shifts[1:, 0] = 1.8
    shifts[1:, 2] = -1.4
    shifts[:, 4] = (0.0, 0.9, 0.9, 1.8)
    shifts[:, 13] = (0.0, 1.6, -1.6, 0.0)
    shifts[:, 15] = (0.0, 0.0, 1.7, 1.7)
    shifts[:, 17] = (0.0, 1.1, 0.4, -1.1)
    rows = []
    for cls in range(4):
        base = rng.normal(size=(per_class, 26))
        base += shifts[cls]
        for r in base:
            rows.append((CLASS_NAMES[cls], r))
    order = rng.permutation(len(rows))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(names) + ["class"])
        for idx in order:
            label, values = rows[idx]
            writer.writerow([f"{v:.9f}" for v in values] + [label])
    return path


@pytest.fixture
def benchmark_csv(tmp_path):
    return write_benchmark_like_csv(tmp_path / "bench.csv", seed=20240)
