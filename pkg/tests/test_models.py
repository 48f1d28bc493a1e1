import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fsel_ids.models import (
    ALGORITHMS,
    ForestPayload,
    ModelError,
    TrainedModel,
    TrainParams,
    fit_model,
    mlp_grads,
    mlp_init,
    mlp_loss,
    model_from_json,
    model_to_json,
    nb_posterior,
    params_from_dict,
    predict_model,
    svm_objective,
)
from fsel_ids.tree import TreeNode

from conftest import make_dataset, random_mixed_dataset, separable_dataset


def numeric_ds(mat, labels):
    mat = np.asarray(mat, dtype=np.float64)
    cols = [(f"x{i}", "numeric", mat[:, i]) for i in range(mat.shape[1])]
    return make_dataset(cols, labels)


def small_params(algorithm, **overrides):
    quick = {
        "n_trees": 5,
        "mlp_epochs": 5,
        "hidden_units": 4,
        "svm_epochs": 5,
        "k": 3,
    }
    quick.update(overrides)
    return params_from_dict(algorithm, quick)


def test_train_params_validation():
    with pytest.raises(ModelError, match="unknown algorithm"):
        TrainParams("boosting")
    with pytest.raises(ModelError, match="k must be positive"):
        TrainParams("knn", k=0)
    with pytest.raises(ModelError, match="confidence"):
        TrainParams("tree", confidence=0.9)
    with pytest.raises(ModelError, match="epoch"):
        TrainParams("mlp", mlp_epochs=-1)


def test_params_from_dict_rejects_unknown_keys():
    with pytest.raises(ModelError, match="unknown hyperparameters"):
        params_from_dict("tree", {"depth": 3})
    p = params_from_dict("knn", {"k": 9}, seed=4)
    assert p.k == 9 and p.seed == 4


@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_fit_predict_deterministic(algorithm):
    rng = np.random.default_rng(1)
    ds = separable_dataset(rng, 60)
    runs = []
    for _ in range(2):
        model = fit_model(ds, small_params(algorithm))
        runs.append(predict_model(model, ds))
    np.testing.assert_array_equal(runs[0], runs[1])
    assert runs[0].dtype == np.uint8


@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_separable_data_is_learnable(algorithm):
    rng = np.random.default_rng(2)
    train = separable_dataset(rng, 120)
    test = separable_dataset(rng, 60)
    model = fit_model(
        train,
        small_params(
            algorithm, mlp_epochs=30, mlp_learning_rate=0.1, svm_epochs=10
        ),
    )
    acc = float((predict_model(model, test) == test.labels).mean())
    assert acc >= 0.9, f"{algorithm} reached only {acc}"


def test_forest_with_one_full_tree_degenerates_to_tree():
    rng = np.random.default_rng(5)
    ds = random_mixed_dataset(rng, 80, 4)
    tree = fit_model(ds, params_from_dict("tree", {"prune": False}))
    forest = fit_model(
        ds,
        params_from_dict(
            "forest", {"n_trees": 1, "bootstrap": False, "feature_sample": 4}
        ),
    )
    assert forest.payload.roots[0] == tree.payload
    np.testing.assert_array_equal(
        predict_model(forest, ds), predict_model(tree, ds)
    )


def test_forest_vote_tie_goes_to_attack():
    always_normal = TreeNode((5, 0))
    always_attack = TreeNode((0, 5))
    model = TrainedModel(
        TrainParams("forest", n_trees=2),
        ("x0",),
        ForestPayload((always_normal, always_attack), 1),
    )
    ds = numeric_ds([[0.0], [1.0]], [0, 0])
    np.testing.assert_array_equal(predict_model(model, ds), [1, 1])


def test_forest_default_feature_sample_is_sqrt():
    rng = np.random.default_rng(6)
    ds = random_mixed_dataset(rng, 40, 9)
    model = fit_model(ds, params_from_dict("forest", {"n_trees": 2}))
    assert model.payload.feature_sample == 3
    ds10 = random_mixed_dataset(rng, 40, 10)
    model10 = fit_model(ds10, params_from_dict("forest", {"n_trees": 2}))
    assert model10.payload.feature_sample == 4


def test_forest_tracks_tree_accuracy():
    scores = []
    for seed in range(5):
        rng = np.random.default_rng(seed)
        train = separable_dataset(rng, 100)
        test = separable_dataset(rng, 60)
        tree = fit_model(train, params_from_dict("tree"))
        forest = fit_model(train, params_from_dict("forest", {"n_trees": 15}))
        t = float((predict_model(tree, test) == test.labels).mean())
        f = float((predict_model(forest, test) == test.labels).mean())
        scores.append((t, f))
    assert all(f >= t - 0.02 for t, f in scores)


def test_nb_hand_computed_posterior():
    values = [1.0, 2.0, 3.0, 5.0, 6.0, 7.0, 8.0]
    labels = [0, 0, 0, 1, 1, 1, 1]
    ds = make_dataset([("x", "numeric", values)], labels)
    model = fit_model(ds, params_from_dict("naive_bayes"))

    def log_gauss(x, mean, var):
        return -0.5 * math.log(2 * math.pi * var) - (x - mean) ** 2 / (2 * var)

    # class 0: mean 2, population variance 2/3; class 1: mean 6.5, variance 1.25
    probe = make_dataset([("x", "numeric", [4.0])], [0])
    j0 = math.log(3 / 7) + log_gauss(4.0, 2.0, 2.0 / 3.0)
    j1 = math.log(4 / 7) + log_gauss(4.0, 6.5, 1.25)
    want = math.exp(j1) / (math.exp(j0) + math.exp(j1))
    got = nb_posterior(model, probe)
    assert got[0, 1] == pytest.approx(want, abs=1e-9)
    assert got[0, 0] == pytest.approx(1.0 - want, abs=1e-9)


def test_nb_nominal_unseen_id_uses_default_likelihood():
    codes = [0, 0, 0, 1, 1, 1]
    labels = [0, 0, 0, 1, 1, 1]
    ds = make_dataset([("p", "nominal", codes, ("a", "b"))], labels)
    model = fit_model(ds, params_from_dict("naive_bayes"))
    probe = make_dataset([("p", "nominal", [2], ("a", "b", "c"))], [0])
    got = nb_posterior(model, probe)
    # both classes fall back to log(1/(3+2)); posteriors reduce to the priors
    assert got[0, 0] == pytest.approx(0.5, abs=1e-12)


def test_nb_gaussian_blobs_track_truth():
    rng = np.random.default_rng(8)
    n = 200
    x = np.vstack([rng.normal(-2, 0.7, (n // 2, 3)), rng.normal(2, 0.7, (n // 2, 3))])
    y = [0] * (n // 2) + [1] * (n // 2)
    ds = numeric_ds(x, y)
    model = fit_model(ds, params_from_dict("naive_bayes"))
    acc = float((predict_model(model, ds) == ds.labels).mean())
    assert acc > 0.95


def test_nb_requires_both_classes():
    ds = make_dataset([("x", "numeric", [1.0, 2.0])], [1, 1])
    with pytest.raises(ModelError, match="class 0"):
        fit_model(ds, params_from_dict("naive_bayes"))


@settings(max_examples=20)
@given(st.integers(min_value=0, max_value=10_000))
def test_nb_posterior_rows_sum_to_one(seed):
    rng = np.random.default_rng(seed)
    ds = random_mixed_dataset(rng, 30, 3)
    model = fit_model(ds, params_from_dict("naive_bayes"))
    post = nb_posterior(model, ds)
    np.testing.assert_allclose(post.sum(axis=1), np.ones(30), atol=1e-12)
    assert post.min() >= 0.0


def knn_oracle(train_mat, train_labels, queries, k):
    out = []
    for q in queries:
        dists = [
            (float(np.sum((q - t) ** 2)), i) for i, t in enumerate(train_mat)
        ]
        dists.sort()
        votes = sum(train_labels[i] for _, i in dists[:k])
        out.append(1 if 2 * votes >= k else 0)
    return out


@pytest.mark.parametrize("k", [1, 3, 7, 20])
def test_knn_matches_exhaustive_oracle(k):
    rng = np.random.default_rng(40 + k)
    train = rng.normal(0, 1, (20, 3))
    labels = rng.integers(0, 2, 20)
    queries = rng.normal(0, 1, (12, 3))
    ds = numeric_ds(train, labels)
    model = fit_model(ds, params_from_dict("knn", {"k": k}))
    probe = numeric_ds(queries, [0] * 12)
    want = knn_oracle(train, labels.tolist(), queries, k)
    np.testing.assert_array_equal(predict_model(model, probe), want)


def test_knn_k1_copies_nearest_label():
    train = numeric_ds([[0.0], [10.0]], [0, 1])
    model = fit_model(train, params_from_dict("knn", {"k": 1}))
    probe = numeric_ds([[1.0], [9.0]], [0, 0])
    np.testing.assert_array_equal(predict_model(model, probe), [0, 1])


def test_knn_k_equal_n_is_global_majority():
    train = numeric_ds([[0.0], [1.0], [2.0], [3.0], [4.0]], [0, 0, 1, 1, 1])
    model = fit_model(train, params_from_dict("knn", {"k": 5}))
    probe = numeric_ds([[-100.0], [100.0]], [0, 0])
    np.testing.assert_array_equal(predict_model(model, probe), [1, 1])


def test_knn_permutation_of_training_rows_is_irrelevant():
    rng = np.random.default_rng(44)
    train = rng.normal(0, 1, (30, 2))
    labels = rng.integers(0, 2, 30)
    queries = rng.normal(0, 1, (10, 2))
    perm = rng.permutation(30)
    a = fit_model(numeric_ds(train, labels), params_from_dict("knn", {"k": 5}))
    b = fit_model(
        numeric_ds(train[perm], labels[perm]), params_from_dict("knn", {"k": 5})
    )
    probe = numeric_ds(queries, [0] * 10)
    np.testing.assert_array_equal(predict_model(a, probe), predict_model(b, probe))


def test_knn_rejects_k_beyond_rows():
    ds = numeric_ds([[0.0], [1.0]], [0, 1])
    with pytest.raises(ModelError, match="exceeds"):
        fit_model(ds, params_from_dict("knn", {"k": 3}))


def test_mlp_solves_xor():
    pts = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    ys = np.array([0, 1, 1, 0])
    ds = numeric_ds(np.tile(pts, (16, 1)), np.tile(ys, 16).tolist())
    params = params_from_dict(
        "mlp",
        {
            "hidden_units": 8,
            "mlp_epochs": 300,
            "mlp_learning_rate": 0.5,
            "batch_size": 16,
        },
    )
    model = fit_model(ds, params)
    assert float((predict_model(model, ds) == ds.labels).mean()) == 1.0


def test_mlp_zero_epochs_is_the_random_init():
    rng = np.random.default_rng(3)
    ds = numeric_ds(rng.normal(0, 1, (50, 4)), rng.integers(0, 2, 50).tolist())
    model = fit_model(ds, params_from_dict("mlp", {"mlp_epochs": 0}))
    init = mlp_init(4, model.params.hidden_units, model.params.seed)
    np.testing.assert_array_equal(model.payload.w1, init["w1"])
    np.testing.assert_array_equal(model.payload.w2, init["w2"])


def test_mlp_gradients_match_central_differences():
    rng = np.random.default_rng(7)
    x = rng.normal(0, 1, (12, 4))
    y = rng.integers(0, 2, 12).astype(np.float64)
    params = mlp_init(4, 3, seed=1)
    grads = mlp_grads(params, x, y)
    eps = 1e-6
    for key in params:
        flat = params[key].reshape(-1)
        for idx in range(flat.size):
            orig = flat[idx]
            flat[idx] = orig + eps
            up = mlp_loss(params, x, y)
            flat[idx] = orig - eps
            down = mlp_loss(params, x, y)
            flat[idx] = orig
            fd = (up - down) / (2 * eps)
            analytic = grads[key].reshape(-1)[idx]
            scale = max(abs(fd), abs(analytic), 1e-8)
            assert abs(fd - analytic) / scale <= 1e-4, (key, idx, fd, analytic)


def test_svm_separates_clean_blobs():
    rng = np.random.default_rng(9)
    x = np.vstack([rng.normal(-2, 0.3, (30, 2)), rng.normal(2, 0.3, (30, 2))])
    y = [0] * 30 + [1] * 30
    ds = numeric_ds(x, y)
    model = fit_model(ds, params_from_dict("linear_svm", {"svm_epochs": 20}))
    assert float((predict_model(model, ds) == ds.labels).mean()) == 1.0
    trace = model.payload.objective_trace
    assert len(trace) == 21
    assert all(a >= b - 1e-12 for a, b in zip(trace, trace[1:]))
    assert svm_objective(
        model.payload.w, model.payload.b, ds.as_matrix(),
        ds.labels.astype(np.float64) * 2 - 1, model.params.svm_lambda,
    ) == pytest.approx(trace[-1], abs=1e-12)


def test_svm_large_penalty_shrinks_weights():
    rng = np.random.default_rng(10)
    x = np.vstack([rng.normal(-2, 0.3, (30, 2)), rng.normal(2, 0.3, (30, 2))])
    y = [0] * 30 + [1] * 30
    ds = numeric_ds(x, y)
    loose = fit_model(ds, params_from_dict("linear_svm", {"svm_epochs": 10}))
    tight = fit_model(
        ds, params_from_dict("linear_svm", {"svm_epochs": 10, "svm_lambda": 4.0})
    )
    assert np.linalg.norm(tight.payload.w) < np.linalg.norm(loose.payload.w)
    assert np.linalg.norm(tight.payload.w) < 0.5


def test_svm_divergence_is_reported():
    rng = np.random.default_rng(11)
    ds = numeric_ds(rng.normal(0, 1, (24, 3)), rng.integers(0, 2, 24).tolist())
    params = params_from_dict("linear_svm", {"svm_lambda": 1e6, "svm_epochs": 3})
    with np.errstate(over="ignore", invalid="ignore"):
        with pytest.raises(ModelError, match="diverged"):
            fit_model(ds, params)


@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_model_json_round_trip(algorithm):
    rng = np.random.default_rng(12)
    train = separable_dataset(rng, 50)
    test = separable_dataset(rng, 30)
    model = fit_model(train, small_params(algorithm))
    text = model_to_json(model)
    doc = json.loads(text)
    assert doc["format"] == "fsel-ids/model"
    again = model_from_json(text)
    assert again.params == model.params
    assert again.feature_names == model.feature_names
    np.testing.assert_array_equal(
        predict_model(again, test), predict_model(model, test)
    )


def test_model_from_json_rejects_other_documents():
    with pytest.raises(ModelError, match="not a model"):
        model_from_json(json.dumps({"format": "something-else"}))


def test_predict_rejects_signature_mismatch():
    rng = np.random.default_rng(13)
    train = separable_dataset(rng, 40)
    model = fit_model(train, params_from_dict("tree"))
    other = numeric_ds(rng.normal(0, 1, (5, 2)), [0, 1, 0, 1, 0])
    with pytest.raises(ModelError, match="signature"):
        predict_model(model, other)


def test_fit_rejects_empty_training_set():
    empty = make_dataset([("x", "numeric", [])], [])
    with pytest.raises(ModelError, match="empty"):
        fit_model(empty, params_from_dict("tree"))


def test_train_seconds_is_recorded():
    rng = np.random.default_rng(14)
    ds = separable_dataset(rng, 40)
    model = fit_model(ds, params_from_dict("tree"))
    assert model.train_seconds >= 0.0
