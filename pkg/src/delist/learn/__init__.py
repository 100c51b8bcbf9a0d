"""From-scratch binary classifiers, metrics, and cross-validation."""

from .ensembles import (
    forest_scores,
    gbdt_loss,
    gbdt_scores,
    train_gbdt,
    train_random_forest,
)
from .linear import (
    logistic_loss_and_grad,
    svm_objective_and_subgrad,
    train_linear_svm,
    train_logistic,
)
from .metrics import (
    EvalMetrics,
    auc_score,
    evaluate_metrics,
    mean_metrics,
)
from .models import (
    ALIASES,
    FOREST,
    GBDT,
    KINDS,
    KNN,
    LOGISTIC,
    SVM,
    TREE,
    ArrayDataset,
    Model,
    canonical_kind,
    load_model,
    model_from_json,
    model_to_json,
    predict_score,
    predict_scores,
    save_model,
    take_rows,
    train_model,
)
from .neighbors import train_knn
from .trees import apply_tree, fit_tree, train_decision_tree
from .validation import (
    DEFAULT_CV_FOLDS,
    CvResult,
    advance_sweep,
    cross_validate,
    feature_importances,
    stratified_kfold,
)

__all__ = [
    "ALIASES",
    "DEFAULT_CV_FOLDS",
    "ArrayDataset",
    "CvResult",
    "EvalMetrics",
    "FOREST",
    "GBDT",
    "KINDS",
    "KNN",
    "LOGISTIC",
    "Model",
    "SVM",
    "TREE",
    "advance_sweep",
    "apply_tree",
    "auc_score",
    "canonical_kind",
    "cross_validate",
    "evaluate_metrics",
    "feature_importances",
    "fit_tree",
    "forest_scores",
    "gbdt_loss",
    "gbdt_scores",
    "load_model",
    "logistic_loss_and_grad",
    "mean_metrics",
    "model_from_json",
    "model_to_json",
    "predict_score",
    "predict_scores",
    "save_model",
    "stratified_kfold",
    "svm_objective_and_subgrad",
    "take_rows",
    "train_decision_tree",
    "train_gbdt",
    "train_knn",
    "train_linear_svm",
    "train_logistic",
    "train_model",
    "train_random_forest",
]
