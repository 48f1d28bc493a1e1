import numpy as np
import pytest

from fsel_ids.pipeline import (
    FS_METHODS,
    PipelineError,
    RunConfig,
    load_splits,
    run_pipeline,
)


def toy_config(toy_split, **overrides):
    train, test, schema = toy_split
    fields = dict(
        train_path=str(train),
        test_path=str(test),
        schema_path=str(schema),
        folds=3,
    )
    fields.update(overrides)
    return RunConfig(**fields)


def test_fs_method_registry():
    assert FS_METHODS == ("none", "wrapper", "infogain", "gainratio", "relief")


def test_config_validation_and_name(toy_split):
    with pytest.raises(ValueError, match="unknown fs"):
        toy_config(toy_split, fs="pca")
    with pytest.raises(ValueError, match="k must"):
        toy_config(toy_split, k=0)
    with pytest.raises(ValueError, match="subsample"):
        toy_config(toy_split, subsample=0.0)
    assert toy_config(toy_split).name == "train"
    assert toy_config(toy_split, dataset_name="toy").name == "toy"


def test_baseline_tree_learns_toy_data(toy_split):
    result = run_pipeline(toy_config(toy_split))
    report = result.report
    assert report.fs_method == "none"
    assert report.selected_count == 3
    assert report.fs_seconds == 0.0
    assert report.acc >= 95.0
    assert report.far <= 5.0
    assert report.cm.total == 120
    assert result.selected_names == ("f1", "f2", "proto")
    assert result.scores is None and result.trace is None


def test_infogain_with_all_features_matches_baseline(toy_split):
    base = run_pipeline(toy_config(toy_split))
    ranked = run_pipeline(toy_config(toy_split, fs="infogain", k=3))
    np.testing.assert_array_equal(base.predictions, ranked.predictions)
    assert base.report.cm == ranked.report.cm
    # same columns, different presentation order metadata
    assert sorted(ranked.selected_names) == sorted(base.selected_names)
    assert ranked.scores is not None


def test_filter_selection_reports_rank_order(toy_split):
    result = run_pipeline(toy_config(toy_split, fs="infogain", k=2))
    assert result.report.selected_count == 2
    names = result.scores.feature_names
    want = tuple(names[f] for f in result.scores.top(2))
    assert result.selected_names == want
    assert result.selected_names[0] == "f1"  # the planted signal wins


def test_k_is_capped_at_feature_count(toy_split):
    result = run_pipeline(toy_config(toy_split, fs="gainratio", k=50))
    assert result.report.selected_count == 3


def test_wrapper_selection_produces_trace(toy_split):
    result = run_pipeline(toy_config(toy_split, fs="wrapper", stop_after=2))
    assert result.trace is not None
    assert result.report.fs_method == "wrapper"
    assert result.report.fs_seconds > 0.0
    assert "f1" in result.selected_names
    assert result.report.acc >= 90.0


def test_relief_selection_runs(toy_split):
    result = run_pipeline(
        toy_config(toy_split, fs="relief", k=2, relief_neighbors=5)
    )
    assert result.report.selected_count == 2
    assert result.selected_names[0] == "f1"


def test_same_seed_reproduces_everything_but_timings(toy_split):
    a = run_pipeline(toy_config(toy_split, fs="infogain", k=2, seed=3))
    b = run_pipeline(toy_config(toy_split, fs="infogain", k=2, seed=3))
    np.testing.assert_array_equal(a.predictions, b.predictions)
    assert a.selected_names == b.selected_names
    assert a.report.cm == b.report.cm
    assert a.report.acc == b.report.acc


def test_subsample_shrinks_training_only(toy_split):
    full = run_pipeline(toy_config(toy_split))
    frac = run_pipeline(toy_config(toy_split, subsample=0.5, seed=1))
    assert frac.report.cm.total == full.report.cm.total == 120
    # the halved training set still solves this easy problem
    assert frac.report.acc >= 90.0


def test_load_stage_annotates_missing_file(toy_split):
    config = toy_config(toy_split, train_path="/nonexistent/train.csv")
    with pytest.raises(PipelineError, match=r"^\[load\]") as info:
        run_pipeline(config)
    assert info.value.stage == "load"


def test_train_stage_annotates_bad_algorithm(toy_split):
    config = toy_config(toy_split, algorithm="boosting")
    with pytest.raises(PipelineError, match=r"^\[train\]") as info:
        run_pipeline(config)
    assert info.value.stage == "train"


def test_evaluate_stage_annotates_signature_drift(toy_split):
    # a test schema missing a training column fails inside [load]
    train, test, schema = toy_split
    bad_schema = schema.parent / "bad_schema.txt"
    bad_schema.write_text("f1,numeric\nf2,numeric\nlabel,class\n", encoding="utf-8")
    config = toy_config(toy_split, schema_path=str(bad_schema))
    with pytest.raises(PipelineError) as info:
        run_pipeline(config)
    assert info.value.stage == "load"


def test_load_splits_shares_training_vocabulary(toy_split):
    train, test, _ = load_splits(toy_config(toy_split))
    t_proto = train.column_by_name("proto")
    e_proto = test.column_by_name("proto")
    assert e_proto.categories[: len(t_proto.categories)] == t_proto.categories


@pytest.mark.parametrize("algorithm", ["naive_bayes", "knn", "linear_svm"])
def test_other_algorithms_run_end_to_end(toy_split, algorithm):
    config = toy_config(toy_split, algorithm=algorithm, params={"k": 3})
    if algorithm != "knn":
        config = toy_config(toy_split, algorithm=algorithm)
    result = run_pipeline(config)
    assert result.report.algorithm == algorithm
    assert result.report.acc >= 85.0
