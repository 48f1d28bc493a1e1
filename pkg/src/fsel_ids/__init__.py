"""Feature selection and intrusion detection modeling toolkit.

Builds binary traffic classifiers over typed CSV datasets: filter and
wrapper feature selection, fitted preprocessing plans, five classifier
families, and a hold-out evaluation harness reporting accuracy, detection
rate and false alarm rate with per-stage timings.
"""

from .dataset import (
    ClassDistribution,
    Column,
    Dataset,
    DatasetError,
    class_distribution,
    load_csv,
    stratified_subsample,
)
from .filters import (
    FilterScores,
    entropy,
    gain_ratio,
    info_gain,
    relief_weights,
    score_features,
)
from .metrics import (
    ConfusionMatrix,
    EvaluationReport,
    MetricsError,
    accuracy,
    confusion,
    detection_rate,
    false_alarm_rate,
)
from .models import (
    ModelError,
    TrainedModel,
    TrainParams,
    fit_model,
    model_from_json,
    model_to_json,
    nb_posterior,
    predict_model,
)
from .pipeline import PipelineError, PipelineResult, RunConfig, run_pipeline
from .preprocess import (
    DiscretizationPlan,
    MinMaxParams,
    OneHotPlan,
    PreprocessPlan,
    apply_discretizer,
    apply_minmax,
    apply_onehot,
    apply_preprocess,
    fit_discretizer,
    fit_minmax,
    fit_onehot,
    fit_preprocess,
    plan_from_json,
    plan_to_json,
)
from .schema import FeatureSchema, SchemaError, parse_schema, schema_to_text
from .wrapper import SearchTrace, best_first_search, stratified_folds, wrapper_merit

__version__ = "0.1.0"

__all__ = [
    "ClassDistribution",
    "Column",
    "ConfusionMatrix",
    "Dataset",
    "DatasetError",
    "DiscretizationPlan",
    "EvaluationReport",
    "FeatureSchema",
    "FilterScores",
    "MetricsError",
    "MinMaxParams",
    "ModelError",
    "OneHotPlan",
    "PipelineError",
    "PipelineResult",
    "PreprocessPlan",
    "RunConfig",
    "SchemaError",
    "SearchTrace",
    "TrainParams",
    "TrainedModel",
    "accuracy",
    "apply_discretizer",
    "apply_minmax",
    "apply_onehot",
    "apply_preprocess",
    "best_first_search",
    "class_distribution",
    "confusion",
    "detection_rate",
    "entropy",
    "false_alarm_rate",
    "fit_discretizer",
    "fit_minmax",
    "fit_model",
    "fit_onehot",
    "fit_preprocess",
    "gain_ratio",
    "info_gain",
    "load_csv",
    "model_from_json",
    "model_to_json",
    "nb_posterior",
    "parse_schema",
    "plan_from_json",
    "plan_to_json",
    "predict_model",
    "relief_weights",
    "run_pipeline",
    "schema_to_text",
    "score_features",
    "stratified_folds",
    "stratified_subsample",
    "wrapper_merit",
]
