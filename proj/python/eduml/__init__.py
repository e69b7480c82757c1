"""Python bindings for the eduml C++ library.

Labels follow the library convention: 1 = fail, 0 = pass. Models predict the
probability of passing.
"""

from ._eduml import (
    FAIL,
    PASS,
    EdumlError,
    Model,
    anova_oneway,
    confusion_metrics,
    cross_validate,
    gk_gamma,
    kruskal_wallis,
    odds_ratio_table,
    roc_auc,
    run_pipeline,
    stratified_kfold,
    synth_csv,
    tail_probability,
)

__all__ = [
    "FAIL",
    "PASS",
    "EdumlError",
    "Model",
    "anova_oneway",
    "confusion_metrics",
    "cross_validate",
    "fit",
    "gk_gamma",
    "kruskal_wallis",
    "odds_ratio_table",
    "roc_auc",
    "run_pipeline",
    "stratified_kfold",
    "synth_csv",
    "tail_probability",
]


def fit(family, X, y, feature_names=None, params=None, seed=0):
    """Fits a tree, forest, boosted, logistic or majority model."""
    return Model.fit(family, X, y, feature_names, params or {}, seed)
