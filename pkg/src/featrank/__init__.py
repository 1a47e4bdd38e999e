"""Feature-ranking library and benchmark CLI for diagnostic CSV datasets.

Five ranking methods (neighbor-based, information-theoretic, l1-penalized,
and two Bayesian posterior-relevance scores) evaluated under a leakage-free
repeated stratified cross-validation protocol with balanced accuracy,
subset compactness and ranking-stability reporting.
"""

__version__ = "0.1.0"

from .dataset import (Dataset, Split, Standardizer, Task, Variant,
                      apply_standardizer, encode_binary, fit_standardizer,
                      load_csv, select_variant, stratified_kfold)
from .evaluation import (BestResult, ResultRecord, balanced_accuracy,
                         best_over_k, jaccard, run_pipeline, stability)
from .glm import (Coefficients, GaussianPosterior, OvrModel,
                  SpikeSlabPosterior, exceedance_probability,
                  fit_l1_logistic, fit_ovr_classifier, fit_ridge_logistic,
                  fit_vb_ard, fit_vb_spike_slab, predict_binary, predict_ovr,
                  sigmoid, soft_threshold)
from .mi import DiscreteColumn, discretize_equal_frequency, mutual_information
from .rankers import (Method, Ranking, RankerSettings, aggregate_ovr_scores,
                      fit_ranker, rank_ard, rank_lasso, rank_mrmr,
                      rank_relieff, rank_spike_slab)

__all__ = [
    "__version__",
    "Dataset", "Split", "Standardizer", "Task", "Variant",
    "apply_standardizer", "encode_binary", "fit_standardizer", "load_csv",
    "select_variant", "stratified_kfold",
    "BestResult", "ResultRecord", "balanced_accuracy", "best_over_k",
    "jaccard", "run_pipeline", "stability",
    "Coefficients", "GaussianPosterior", "OvrModel", "SpikeSlabPosterior",
    "exceedance_probability", "fit_l1_logistic", "fit_ovr_classifier",
    "fit_ridge_logistic", "fit_vb_ard", "fit_vb_spike_slab",
    "predict_binary", "predict_ovr", "sigmoid", "soft_threshold",
    "DiscreteColumn", "discretize_equal_frequency", "mutual_information",
    "Method", "Ranking", "RankerSettings", "aggregate_ovr_scores",
    "fit_ranker", "rank_ard", "rank_lasso", "rank_mrmr", "rank_relieff",
    "rank_spike_slab",
]
