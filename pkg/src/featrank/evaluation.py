"""Leakage-free evaluation: per-split scaling, ranking, top-k selection,
downstream classification, and the accuracy/compactness/stability metrics.

For every split, the standardizer and the ranker see training rows only;
test rows enter exclusively at prediction time, so replacing their values
cannot change which features are selected or the fitted model.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from . import glm
from .dataset import (Dataset, Task, apply_standardizer, child_seed,
                      fit_standardizer, stratified_kfold)
from .rankers import Method, RankerSettings, fit_ranker


@dataclass(frozen=True)
class ResultRecord:
    """One evaluated (split, subset size) cell of the protocol."""

    method: Method
    task: Task
    variant: str
    k: int
    repeat_id: int
    fold_id: int
    balanced_accuracy: float
    selected_features: tuple[int, ...]
    runtime_ms: float


@dataclass(frozen=True)
class BestResult:
    """Best mean accuracy over the subset-size grid with its stability."""

    method: Method
    task: Task
    variant: str
    best_balanced_accuracy: float
    best_k: int
    stability: float


def balanced_accuracy(y_true, y_pred) -> float:
    """Mean per-class recall over the classes present in y_true."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape:
        raise ValueError("label vectors must have equal length")
    if y_true.size == 0:
        raise ValueError("labels are empty")
    recalls = []
    for c in np.unique(y_true):
        mask = y_true == c
        recalls.append(float(np.mean(y_pred[mask] == c)))
    return float(np.mean(recalls))


def jaccard(a: Iterable[int], b: Iterable[int]) -> float:
    """Intersection over union; two empty sets count as identical."""
    sa, sb = set(a), set(b)
    if not sa and not sb:
        return 1.0
    return len(sa & sb) / len(sa | sb)


def stability(subsets: Sequence[Iterable[int]]) -> float:
    """Mean pairwise overlap of the selected top-k subsets."""
    sets = [set(s) for s in subsets]
    if len(sets) < 2:
        raise ValueError("stability needs at least 2 subsets")
    sizes = {len(s) for s in sets}
    if len(sizes) != 1:
        raise ValueError("all subsets must have the same size")
    pair_scores = [jaccard(a, b) for a, b in combinations(sets, 2)]
    return float(np.mean(pair_scores))


def _fit_downstream(Xtr, ytr, task: Task, ridge: float):
    if task is Task.BINARY:
        return glm.fit_ridge_logistic(Xtr, ytr.astype(np.float64),
                                      ridge=ridge)
    return glm.fit_ovr_classifier(Xtr, ytr, ridge=ridge)


def _predict_downstream(model, Xte, task: Task):
    if task is Task.BINARY:
        return glm.predict_binary(model, Xte)
    return glm.predict_ovr(model, Xte)


def run_pipeline(d: Dataset, method: Method, k_grid: Sequence[int],
                 K: int, repeats: int, seed: int,
                 settings: RankerSettings = RankerSettings(),
                 ridge: float = 1.0) -> list[ResultRecord]:
    """Evaluate one (method, task, variant) cell over all splits and k.

    Per split: standardize on the training rows only, rank on the training
    partition, then for each k train the downstream ridge-logistic model
    (one-vs-rest for multiclass) on the selected columns and score balanced
    accuracy on the held-out rows.  Rankings are computed once per split and
    reused across the k grid.  Fully deterministic given the seed.
    """
    k_grid = list(k_grid)
    if any(k > d.n_features for k in k_grid):
        raise ValueError(
            f"k grid {k_grid} exceeds feature count {d.n_features}")
    if any(k < 1 for k in k_grid):
        raise ValueError("k values must be positive")
    records: list[ResultRecord] = []
    splits = stratified_kfold(d.y, K, repeats, seed)
    for sp in splits:
        Xtr_raw = d.X[sp.train_indices]
        ytr = d.y[sp.train_indices]
        Xte_raw = d.X[sp.test_indices]
        yte = d.y[sp.test_indices]
        try:
            t0 = time.perf_counter()
            scaler = fit_standardizer(Xtr_raw)
            Xtr = apply_standardizer(scaler, Xtr_raw)
            Xte = apply_standardizer(scaler, Xte_raw)
            ranking = fit_ranker(method, Xtr, ytr, settings,
                                 seed=child_seed(seed, sp.repeat_id,
                                                 sp.fold_id))
            rank_ms = (time.perf_counter() - t0) * 1e3
            for k in k_grid:
                t1 = time.perf_counter()
                sel = ranking.order[:k]
                model = _fit_downstream(Xtr[:, sel], ytr, d.task, ridge)
                pred = _predict_downstream(model, Xte[:, sel], d.task)
                acc = balanced_accuracy(yte, pred)
                ms = (time.perf_counter() - t1) * 1e3
                records.append(ResultRecord(
                    method=method, task=d.task, variant=d.variant.value,
                    k=k, repeat_id=sp.repeat_id, fold_id=sp.fold_id,
                    balanced_accuracy=acc,
                    selected_features=tuple(int(j) for j in sel),
                    runtime_ms=rank_ms / len(k_grid) + ms,
                ))
        except Exception as exc:
            raise RuntimeError(
                f"pipeline failed for method={method.value} "
                f"repeat={sp.repeat_id} fold={sp.fold_id}: {exc}"
            ) from exc
    return records


def best_over_k(records: Sequence[ResultRecord],
                k_grid: Sequence[int]) -> BestResult:
    """Mean accuracy per k, best k (ties to the smaller), stability there."""
    if not records:
        raise ValueError("no records")
    method = records[0].method
    task = records[0].task
    variant = records[0].variant
    k_grid = sorted(set(k_grid))
    by_k: dict[int, list[ResultRecord]] = {k: [] for k in k_grid}
    split_ids = set()
    for r in records:
        if (r.method, r.task, r.variant) != (method, task, variant):
            raise ValueError("records mix more than one cell")
        if r.k not in by_k:
            raise ValueError(f"record k={r.k} outside the grid {k_grid}")
        by_k[r.k].append(r)
        split_ids.add((r.repeat_id, r.fold_id))
    n_splits = len(split_ids)
    for k, recs in by_k.items():
        if len(recs) != n_splits:
            raise ValueError(
                f"incomplete record set: k={k} has {len(recs)} of "
                f"{n_splits} splits")
    means = {k: float(np.mean([r.balanced_accuracy for r in recs]))
             for k, recs in by_k.items()}
    best_k = k_grid[0]
    for k in k_grid[1:]:
        if means[k] > means[best_k]:
            best_k = k
    subsets = [r.selected_features
               for r in sorted(by_k[best_k],
                               key=lambda r: (r.repeat_id, r.fold_id))]
    stab = stability(subsets) if len(subsets) >= 2 else 1.0
    return BestResult(method=method, task=task, variant=variant,
                      best_balanced_accuracy=means[best_k], best_k=best_k,
                      stability=stab)
