"""End-to-end experiment runner: load, select, transform, train, evaluate.

The hold-out protocol is fixed: models fit on the training file only and
are measured on the predefined test file; nothing is ever mixed. Feature
selection and transform fitting see only training data. Every stage is
timed separately so selection cost, training cost and scoring cost stay
attributable.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import Dataset, load_csv, stratified_subsample
from .filters import FILTER_METHODS, FilterScores, score_features
from .metrics import EvaluationReport, build_report, confusion
from .models import TrainedModel, fit_model, params_from_dict, predict_model
from .preprocess import PreprocessPlan, apply_preprocess, fit_preprocess
from .schema import FeatureSchema, parse_schema
from .unsw import UNSW_SCHEMA
from .wrapper import SearchTrace, best_first_search, subset_names

FS_METHODS = ("none", "wrapper") + FILTER_METHODS


class PipelineError(RuntimeError):
    """A stage failure, annotated with the stage that raised it."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines one experiment cell."""

    train_path: str
    test_path: str
    schema_path: str | None = None  # None uses the built-in UNSW-NB15 schema
    fs: str = "none"
    k: int = 19
    algorithm: str = "tree"
    params: dict = field(default_factory=dict)
    seed: int = 0
    subsample: float = 1.0
    bins: int = 10
    relief_neighbors: int = 10
    relief_sample: int | None = None
    folds: int = 5
    stop_after: int | None = 5
    epsilon: float = 1e-5
    positive_label: str = "1"
    dataset_name: str = ""

    def __post_init__(self):
        if self.fs not in FS_METHODS:
            raise ValueError(f"unknown fs method {self.fs!r}; pick from {FS_METHODS}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not (0.0 < self.subsample <= 1.0):
            raise ValueError(f"subsample must be in (0, 1], got {self.subsample}")

    @property
    def name(self) -> str:
        return self.dataset_name or Path(self.train_path).stem


@dataclass(frozen=True)
class PipelineResult:
    """Everything one run produced, for reporting and for saving."""

    report: EvaluationReport
    selected_names: tuple[str, ...]  # in the method's own order
    model: TrainedModel
    plan: PreprocessPlan
    predictions: np.ndarray
    scores: FilterScores | None = None
    trace: SearchTrace | None = None


def _stage(name: str):
    class _StageGuard:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and not isinstance(exc, PipelineError):
                raise PipelineError(name, str(exc)) from exc
            return False

    return _StageGuard()


def load_splits(config: RunConfig) -> tuple[Dataset, Dataset, FeatureSchema]:
    """Load train and test files; test reuses the training dictionaries."""
    with _stage("load"):
        if config.schema_path is None:
            schema = UNSW_SCHEMA
        else:
            schema = parse_schema(Path(config.schema_path).read_text(encoding="utf-8"))
        train = load_csv(config.train_path, schema, positive_label=config.positive_label)
        test = load_csv(
            config.test_path,
            schema,
            positive_label=config.positive_label,
            vocab=train.vocabulary(),
        )
        return train, test, schema


def select_features(
    train: Dataset, config: RunConfig
) -> tuple[tuple[int, ...], float, FilterScores | None, SearchTrace | None]:
    """Run the configured selection method on training data, timed.

    Returns the subset in the method's own order (rank order for filters,
    discovery order for the wrapper, column order for "none").
    """
    with _stage("select"):
        if config.fs == "none":
            return tuple(range(len(train.columns))), 0.0, None, None
        started = time.perf_counter()
        if config.fs == "wrapper":
            subset, trace = best_first_search(
                train,
                folds=config.folds,
                stop_after=config.stop_after,
                epsilon=config.epsilon,
                seed=config.seed,
            )
            return subset, time.perf_counter() - started, None, trace
        scores = score_features(
            train,
            config.fs,
            bins=config.bins,
            neighbors=config.relief_neighbors,
            sample_count=config.relief_sample,
            seed=config.seed,
        )
        subset = scores.top(min(config.k, len(train.columns)))
        return subset, time.perf_counter() - started, scores, None


def run_pipeline(config: RunConfig) -> PipelineResult:
    """Execute one full experiment cell and assemble its report."""
    train, test, _ = load_splits(config)

    with _stage("subsample"):
        if config.subsample < 1.0:
            train = stratified_subsample(train, config.subsample, config.seed)

    subset, fs_seconds, scores, trace = select_features(train, config)
    selected_names = subset_names(train, subset)

    with _stage("train"):
        started = time.perf_counter()
        # Models always see features in original column order; the ranked
        # order above is reporting metadata only.
        plan = fit_preprocess(train, sorted(subset))
        encoded_train = apply_preprocess(plan, train)
        params = params_from_dict(config.algorithm, config.params, seed=config.seed)
        model = fit_model(encoded_train, params)
        train_seconds = time.perf_counter() - started

    with _stage("evaluate"):
        started = time.perf_counter()
        encoded_test = apply_preprocess(plan, test)
        predictions = predict_model(model, encoded_test)
        eval_seconds = time.perf_counter() - started
        cm = confusion(predictions, test.labels)
        report = build_report(
            dataset=config.name,
            fs_method=config.fs,
            selected_count=len(subset),
            algorithm=config.algorithm,
            cm=cm,
            fs_seconds=fs_seconds,
            train_seconds=train_seconds,
            eval_seconds=eval_seconds,
        )

    return PipelineResult(
        report=report,
        selected_names=selected_names,
        model=model,
        plan=plan,
        predictions=predictions,
        scores=scores,
        trace=trace,
    )
