"""The five feature-ranking methods and one-vs-rest score aggregation.

Every ranker returns a full :class:`Ranking` (ordered feature indices plus
per-feature scores and the hyperparameters used).  Rankers are pure given
(data, hyperparameters, seed); one-vs-rest class fits are combined
deterministically by averaging.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import glm, mi
from .dataset import child_seed, stratified_kfold
from .kernels import relieff_weights


class Method(Enum):
    RELIEFF = "relieff"
    MRMR = "mrmr"
    LASSO = "lasso"
    SPIKE_SLAB = "spike_slab"
    ARD = "ard"


@dataclass(frozen=True)
class Ranking:
    """Ordered feature indices (best first) with aligned relevance scores."""

    method: Method
    order: np.ndarray
    scores: np.ndarray
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class RankerSettings:
    """Hyperparameters for all rankers; defaults match the benchmark config."""

    relieff_neighbors: int | None = None  # None: 10 clamped to class size - 1
    mi_bins: int = 8
    lasso_grid_size: int = 20
    lasso_inner_folds: int = 3
    lasso_lambda_min_ratio: float = 1e-3
    ss_tau0_sq: float = 1e-3
    ss_tau1_sq: float = 1.0
    ss_pi: float = 0.5
    ard_epsilon: float = 0.1
    ard_alpha_init: float = 1.0
    ard_alpha_bounds: tuple[float, float] = (1e-4, 1e6)
    tol: float = 1e-6
    max_iter: int = 500


def _ranking_from_scores(method: Method, scores: np.ndarray,
                         meta: dict) -> Ranking:
    # stable argsort of the negated scores: ties fall back to ascending index
    order = np.argsort(-scores, kind="stable")
    return Ranking(method=method, order=order, scores=scores, meta=meta)


def aggregate_ovr_scores(per_class_scores) -> np.ndarray:
    """Elementwise mean of the per-class relevance score vectors."""
    if len(per_class_scores) == 0:
        raise ValueError("need at least one class score vector")
    arr = np.asarray(per_class_scores, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError("score vectors must all have the same length")
    return arr.mean(axis=0)


def rank_relieff(X, y, neighbors: int | None = None,
                 class_priors=None) -> Ranking:
    """Neighbor-based relevance weights from a deterministic full pass.

    Every instance is visited once; its nearest hits and, per other class,
    nearest misses (Euclidean distance over all features) update the weights
    with miss contributions weighted by P(C)/(1 - P(class of the instance)).
    Per-feature discrepancies are range-normalized, so constant features
    contribute zero.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.shape[1] == 0:
        raise ValueError("no features to rank")
    classes, counts = np.unique(y, return_counts=True)
    n_classes = int(classes.max()) + 1
    min_count = int(counts.min())
    if neighbors is None:
        k = min(10, min_count - 1)
        if k < 1:
            raise ValueError("smallest class has a single member")
    else:
        k = int(neighbors)
        if k < 1:
            raise ValueError("neighbors must be at least 1")
        if min_count <= k:
            raise ValueError(
                f"every class needs more than {k} members; smallest has "
                f"{min_count}")
    if class_priors is None:
        priors = np.zeros(n_classes)
        priors[classes] = counts / y.size
    else:
        priors = np.asarray(class_priors, dtype=np.float64)
        if priors.shape[0] != n_classes:
            raise ValueError("one prior per class required")
    rng_span = X.max(axis=0) - X.min(axis=0)
    Xn = np.divide(X, rng_span, out=np.zeros_like(X), where=rng_span > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        miss_coef = priors[None, :] / (1.0 - priors[:, None])
    miss_coef = np.nan_to_num(miss_coef, nan=0.0, posinf=0.0)
    w = relieff_weights(np.ascontiguousarray(X), np.ascontiguousarray(Xn),
                        y, n_classes, k, miss_coef)
    return _ranking_from_scores(Method.RELIEFF, w, {"neighbors": k})


def rank_mrmr(X, y, bins: int = 8) -> Ranking:
    """Greedy ranking trading class relevance against mean redundancy.

    The first feature maximizes its mutual information with the class; each
    following pick maximizes relevance minus the mean pairwise information
    with the already-selected set.  Scores record the criterion value at the
    step each feature was selected, so only the order is monotone.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n, p = X.shape
    if p == 0:
        raise ValueError("no features to rank")
    if n < 2:
        raise ValueError("need at least 2 samples")
    cols = [mi.discretize_equal_frequency(X[:, j], bins) for j in range(p)]
    ycol = mi.from_labels(y)
    relevance = np.array([mi.mutual_information(c, ycol) for c in cols])
    pair_cache = np.full((p, p), np.nan)
    selected: list[int] = []
    scores = np.zeros(p)
    remaining = list(range(p))
    first = int(np.argmax(relevance))
    selected.append(first)
    scores[first] = relevance[first]
    remaining.remove(first)
    while remaining:
        best_j = -1
        best_val = -np.inf
        for j in remaining:
            red = 0.0
            for s in selected:
                if np.isnan(pair_cache[j, s]):
                    pair_cache[j, s] = pair_cache[s, j] = \
                        mi.mutual_information(cols[j], cols[s])
                red += pair_cache[j, s]
            val = relevance[j] - red / len(selected)
            if val > best_val:
                best_val = val
                best_j = j
        selected.append(best_j)
        scores[best_j] = best_val
        remaining.remove(best_j)
    order = np.array(selected, dtype=np.int64)
    return Ranking(method=Method.MRMR, order=order, scores=scores,
                   meta={"bins": bins})


def _select_l1_lambda(X, y, grid, inner_folds, seed, max_iter, tol):
    """Mean inner-fold balanced accuracy per lambda; ties pick the sparser."""
    from .evaluation import balanced_accuracy  # local import avoids a cycle
    splits = stratified_kfold(y, inner_folds, 1, seed)
    acc = np.zeros(grid.size)
    for sp in splits:
        Xtr, ytr = X[sp.train_indices], y[sp.train_indices]
        Xva, yva = X[sp.test_indices], y[sp.test_indices]
        for i, coef in enumerate(
                glm.l1_path(Xtr, ytr, grid, max_iter=max_iter, tol=tol)):
            acc[i] += balanced_accuracy(yva, glm.predict_binary(coef, Xva))
    # grid descends, so argmax resolves ties toward the larger lambda
    return int(np.argmax(acc))


def _binary_l1_scores(X, y, settings: RankerSettings, seed: int):
    lmax = glm.l1_lambda_max(X, y)
    lmax = max(lmax, 1e-12)
    grid = np.geomspace(lmax, lmax * settings.lasso_lambda_min_ratio,
                        settings.lasso_grid_size)
    best = _select_l1_lambda(X, y, grid, settings.lasso_inner_folds, seed,
                             settings.max_iter, settings.tol)
    coef = glm.fit_l1_logistic(X, y, float(grid[best]),
                               max_iter=settings.max_iter, tol=settings.tol)
    return np.abs(coef.beta), float(grid[best])


def rank_lasso(X, y, settings: RankerSettings = RankerSettings(),
               seed: int = 0) -> Ranking:
    """Coefficient-magnitude ranking from l1-penalized logistic fits.

    The penalty is selected by inner stratified cross-validation on a
    logarithmic grid below the all-zero threshold, then the model is refitted
    on the full data.  Multiclass labels are handled one-vs-rest with the
    per-class coefficient magnitudes averaged.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    classes = np.unique(y)
    if classes.size < 2:
        raise ValueError("labels contain a single class")
    meta = {
        "grid_size": settings.lasso_grid_size,
        "inner_folds": settings.lasso_inner_folds,
        "seed": seed,
        "multiclass": "one-vs-rest mean |coefficient|",
    }
    if classes.size == 2:
        scores, lam = _binary_l1_scores(X, y.astype(np.float64), settings,
                                        seed)
        meta["lambda"] = lam
    else:
        per_class = []
        lams = []
        for c in classes:
            yb = (y == c).astype(np.float64)
            s, lam = _binary_l1_scores(X, yb, settings,
                                       child_seed(seed, int(c)))
            per_class.append(s)
            lams.append(lam)
        scores = aggregate_ovr_scores(per_class)
        meta["lambda"] = lams
    return _ranking_from_scores(Method.LASSO, scores, meta)


def rank_spike_slab(X, y, settings: RankerSettings = RankerSettings()
                    ) -> Ranking:
    """Posterior inclusion probabilities from the two-component prior fit."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    classes = np.unique(y)
    if classes.size < 2:
        raise ValueError("labels contain a single class")
    kwargs = dict(tau0_sq=settings.ss_tau0_sq, tau1_sq=settings.ss_tau1_sq,
                  pi=settings.ss_pi, max_iter=settings.max_iter,
                  tol=settings.tol)
    if classes.size == 2:
        post = glm.fit_vb_spike_slab(X, y.astype(np.float64), **kwargs)
        scores = post.inclusion_prob
    else:
        per_class = [
            glm.fit_vb_spike_slab(X, (y == c).astype(np.float64),
                                  **kwargs).inclusion_prob
            for c in classes
        ]
        scores = aggregate_ovr_scores(per_class)
    meta = {"tau0_sq": settings.ss_tau0_sq, "tau1_sq": settings.ss_tau1_sq,
            "pi": settings.ss_pi}
    return _ranking_from_scores(Method.SPIKE_SLAB, scores, meta)


def rank_ard(X, y, settings: RankerSettings = RankerSettings()) -> Ranking:
    """Threshold-exceedance probabilities from the per-feature-precision fit.

    The threshold applies to standardized features, so callers must pass a
    standardized matrix.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    classes = np.unique(y)
    if classes.size < 2:
        raise ValueError("labels contain a single class")
    eps = settings.ard_epsilon
    kwargs = dict(alpha_init=settings.ard_alpha_init,
                  alpha_bounds=settings.ard_alpha_bounds,
                  max_iter=settings.max_iter, tol=settings.tol)

    def scores_for(yb):
        post = glm.fit_vb_ard(X, yb, **kwargs)
        return np.array([
            glm.exceedance_probability(post.mean[j],
                                       float(np.sqrt(post.variance[j])), eps)
            for j in range(post.mean.size)
        ])

    if classes.size == 2:
        scores = scores_for(y.astype(np.float64))
    else:
        scores = aggregate_ovr_scores(
            [scores_for((y == c).astype(np.float64)) for c in classes])
    meta = {"epsilon": eps, "alpha_bounds": list(settings.ard_alpha_bounds)}
    return _ranking_from_scores(Method.ARD, scores, meta)


def fit_ranker(method: Method, X, y, settings: RankerSettings,
               seed: int = 0) -> Ranking:
    """Dispatch to one ranking method with the shared settings bundle."""
    if method is Method.RELIEFF:
        return rank_relieff(X, y, neighbors=settings.relieff_neighbors)
    if method is Method.MRMR:
        return rank_mrmr(X, y, bins=settings.mi_bins)
    if method is Method.LASSO:
        return rank_lasso(X, y, settings=settings, seed=seed)
    if method is Method.SPIKE_SLAB:
        return rank_spike_slab(X, y, settings=settings)
    if method is Method.ARD:
        return rank_ard(X, y, settings=settings)
    raise ValueError(f"unknown method {method!r}")
