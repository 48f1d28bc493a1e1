"""Classifier families behind a single train/predict contract.

Six algorithm tags: tree, forest, naive_bayes, knn, mlp, linear_svm. Every
fit is deterministic given (data, params, seed). Trees and naive Bayes
accept mixed nominal/numeric datasets; knn, mlp and linear_svm require
all-numeric (already encoded) datasets. Prediction ties always resolve to
the attack class.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from . import tree as tree_mod
from .dataset import Dataset, DatasetError
from .tree import TreeNode

ALGORITHMS = ("tree", "forest", "naive_bayes", "knn", "mlp", "linear_svm")

MODEL_FORMAT = "fsel-ids/model"
MODEL_VERSION = 1

NB_VAR_FLOOR = 1e-9


class ModelError(ValueError):
    """Raised for invalid training parameters or prediction mismatches."""


@dataclass(frozen=True)
class TrainParams:
    """Algorithm tag plus every tunable, with common defaults baked in."""

    algorithm: str
    seed: int = 0
    # tree
    min_leaf: int = 2
    prune: bool = True
    confidence: float = 0.25
    # forest
    n_trees: int = 100
    feature_sample: int | None = None  # None means ceil(sqrt(feature count))
    bootstrap: bool = True
    # knn
    k: int = 5
    # mlp
    hidden_units: int = 32
    mlp_epochs: int = 50
    mlp_learning_rate: float = 0.01
    batch_size: int = 32
    # linear svm
    svm_lambda: float = 1e-4
    svm_epochs: int = 20
    svm_learning_rate: float = 0.1

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ModelError(f"unknown algorithm {self.algorithm!r}; pick from {ALGORITHMS}")
        positive = {
            "min_leaf": self.min_leaf,
            "n_trees": self.n_trees,
            "k": self.k,
            "hidden_units": self.hidden_units,
            "mlp_learning_rate": self.mlp_learning_rate,
            "batch_size": self.batch_size,
            "svm_lambda": self.svm_lambda,
            "svm_learning_rate": self.svm_learning_rate,
        }
        for name, value in positive.items():
            if value <= 0:
                raise ModelError(f"{name} must be positive, got {value}")
        if not (0.0 < self.confidence <= 0.5):
            raise ModelError(f"confidence must be in (0, 0.5], got {self.confidence}")
        if self.feature_sample is not None and self.feature_sample < 1:
            raise ModelError(f"feature_sample must be >= 1, got {self.feature_sample}")
        if self.mlp_epochs < 0 or self.svm_epochs < 0:
            raise ModelError("epoch counts must be >= 0")


def params_from_dict(algorithm: str, overrides: dict | None = None, seed: int = 0) -> TrainParams:
    """Build TrainParams from an override mapping, rejecting unknown keys."""
    base = TrainParams(algorithm=algorithm, seed=seed)
    if not overrides:
        return base
    known = {f.name for f in fields(TrainParams)}
    bad = sorted(set(overrides) - known)
    if bad:
        raise ModelError(f"unknown hyperparameters: {bad}")
    return replace(base, **overrides)


@dataclass(frozen=True)
class TrainedModel:
    """Fitted classifier: tag, learned payload, feature signature, fit time."""

    params: TrainParams
    feature_names: tuple[str, ...]
    payload: object
    train_seconds: float = 0.0

    @property
    def algorithm(self) -> str:
        return self.params.algorithm

    def __post_init__(self):
        if not self.feature_names:
            raise ModelError("feature signature must be non-empty")


@dataclass(frozen=True)
class ForestPayload:
    roots: tuple[TreeNode, ...]
    feature_sample: int


@dataclass(frozen=True)
class NominalStats:
    """Per-class log likelihood per category id, plus the unseen-id default."""

    log_table: tuple[tuple[float, ...], tuple[float, ...]]
    log_default: tuple[float, float]


@dataclass(frozen=True)
class GaussianStats:
    mean: tuple[float, float]
    var: tuple[float, float]


@dataclass(frozen=True)
class NBPayload:
    log_prior: tuple[float, float]
    feature_stats: tuple[object, ...]  # GaussianStats or NominalStats per column


@dataclass(frozen=True)
class KNNPayload:
    matrix: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        self.matrix.flags.writeable = False
        self.labels.flags.writeable = False


@dataclass(frozen=True)
class MLPPayload:
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray


@dataclass(frozen=True)
class SVMPayload:
    w: np.ndarray
    b: float
    objective_trace: tuple[float, ...] = ()


def _check_not_empty(train: Dataset):
    if train.row_count == 0:
        raise ModelError("cannot train on an empty dataset")
    if not train.columns:
        raise ModelError("cannot train with no features")


def _fit_tree(train: Dataset, params: TrainParams) -> TreeNode:
    root = tree_mod.grow(train, min_leaf=params.min_leaf)
    if params.prune:
        root = tree_mod.prune(root, params.confidence)
    return root


def _fit_forest(train: Dataset, params: TrainParams) -> ForestPayload:
    d = len(train.columns)
    sample = params.feature_sample
    if sample is None:
        sample = max(1, math.isqrt(d) + (0 if math.isqrt(d) ** 2 == d else 1))
    sample = min(sample, d)
    roots = []
    for t in range(params.n_trees):
        rng = np.random.default_rng(params.seed + t)
        if params.bootstrap:
            rows = rng.integers(0, train.row_count, size=train.row_count)
            sampled = train.take_rows(rows)
        else:
            sampled = train
        roots.append(
            tree_mod.grow(
                sampled,
                min_leaf=params.min_leaf,
                rng=rng,
                feature_sample=sample if sample < d else None,
            )
        )
    return ForestPayload(tuple(roots), sample)


def _fit_naive_bayes(train: Dataset, params: TrainParams) -> NBPayload:
    y = train.labels
    n = train.row_count
    counts = [int(np.count_nonzero(y == c)) for c in (0, 1)]
    for c, have in enumerate(counts):
        if have == 0:
            raise ModelError(f"class {c} has no training rows")
    log_prior = tuple(math.log(have / n) for have in counts)
    stats: list[object] = []
    for col in train.columns:
        if col.kind == "numeric":
            means, variances = [], []
            for c in (0, 1):
                v = col.values[y == c]
                means.append(float(v.mean()))
                variances.append(max(float(v.var()), NB_VAR_FLOOR))
            stats.append(GaussianStats(tuple(means), tuple(variances)))
        else:
            width = len(col.categories)
            tables, defaults = [], []
            for c in (0, 1):
                obs = np.bincount(col.values[y == c], minlength=width)[:width]
                denom = counts[c] + width
                tables.append(tuple(math.log((int(o) + 1) / denom) for o in obs))
                defaults.append(math.log(1.0 / denom))
            stats.append(NominalStats((tables[0], tables[1]), (defaults[0], defaults[1])))
    return NBPayload(log_prior, tuple(stats))


def nb_log_joint(payload: NBPayload, ds: Dataset) -> np.ndarray:
    """Per-row (n, 2) array of log prior + summed log likelihoods."""
    n = ds.row_count
    out = np.zeros((n, 2), dtype=np.float64)
    out[:, 0] = payload.log_prior[0]
    out[:, 1] = payload.log_prior[1]
    for col, stat in zip(ds.columns, payload.feature_stats):
        if isinstance(stat, GaussianStats):
            x = col.values
            for c in (0, 1):
                mean, var = stat.mean[c], stat.var[c]
                out[:, c] += -0.5 * np.log(2.0 * math.pi * var) - (x - mean) ** 2 / (2.0 * var)
        else:
            ids = col.values
            for c in (0, 1):
                table = np.asarray(stat.log_table[c])
                ll = np.where(ids < len(table), table[np.minimum(ids, len(table) - 1)],
                              stat.log_default[c])
                out[:, c] += ll
    return out


def nb_posterior(model: TrainedModel, ds: Dataset) -> np.ndarray:
    """Normalized class probabilities, rows summing to 1."""
    if model.algorithm != "naive_bayes":
        raise ModelError(f"posteriors need a naive_bayes model, got {model.algorithm}")
    _check_signature(model, ds)
    joint = nb_log_joint(model.payload, ds)
    shifted = joint - joint.max(axis=1, keepdims=True)
    p = np.exp(shifted)
    return p / p.sum(axis=1, keepdims=True)


def _fit_knn(train: Dataset, params: TrainParams) -> KNNPayload:
    if params.k > train.row_count:
        raise ModelError(f"k={params.k} exceeds training rows {train.row_count}")
    return KNNPayload(train.as_matrix(), train.labels.copy())


def _knn_votes(payload: KNNPayload, queries: np.ndarray, k: int) -> np.ndarray:
    """Attack votes among the k nearest training rows, per query."""
    t = payload.matrix
    t_sq = np.sum(t * t, axis=1)
    votes = np.empty(len(queries), dtype=np.int64)
    chunk = max(1, int(2_000_000 // max(1, len(t))))
    for start in range(0, len(queries), chunk):
        q = queries[start:start + chunk]
        d2 = t_sq[None, :] - 2.0 * (q @ t.T) + np.sum(q * q, axis=1)[:, None]
        order = np.argsort(d2, axis=1, kind="stable")[:, :k]
        votes[start:start + chunk] = payload.labels[order].sum(axis=1)
    return votes


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def mlp_init(d: int, hidden: int, seed: int) -> dict[str, np.ndarray]:
    rng = np.random.default_rng(seed)
    return {
        "w1": rng.normal(0.0, 0.5, size=(d, hidden)),
        "b1": np.zeros(hidden),
        "w2": rng.normal(0.0, 0.5, size=hidden),
        "b2": np.zeros(1),
    }


def mlp_logits(params: dict[str, np.ndarray], x: np.ndarray) -> np.ndarray:
    hidden = sigmoid(x @ params["w1"] + params["b1"])
    return hidden @ params["w2"] + params["b2"][0]


def mlp_loss(params: dict[str, np.ndarray], x: np.ndarray, y: np.ndarray) -> float:
    """Mean binary cross-entropy, computed from logits for stability."""
    z = mlp_logits(params, x)
    return float(np.mean(np.logaddexp(0.0, z) - y * z))


def mlp_grads(params: dict[str, np.ndarray], x: np.ndarray, y: np.ndarray) -> dict[str, np.ndarray]:
    """Analytic gradients of mlp_loss with respect to every parameter."""
    hidden = sigmoid(x @ params["w1"] + params["b1"])
    z = hidden @ params["w2"] + params["b2"][0]
    dz = (sigmoid(z) - y) / len(y)
    d_hidden = np.outer(dz, params["w2"]) * hidden * (1.0 - hidden)
    return {
        "w1": x.T @ d_hidden,
        "b1": d_hidden.sum(axis=0),
        "w2": hidden.T @ dz,
        "b2": np.asarray([dz.sum()]),
    }


def _fit_mlp(train: Dataset, params: TrainParams) -> MLPPayload:
    x = train.as_matrix()
    y = train.labels.astype(np.float64)
    weights = mlp_init(x.shape[1], params.hidden_units, params.seed)
    rng = np.random.default_rng(params.seed + 1)
    for epoch in range(params.mlp_epochs):
        order = rng.permutation(len(x))
        for start in range(0, len(x), params.batch_size):
            batch = order[start:start + params.batch_size]
            grads = mlp_grads(weights, x[batch], y[batch])
            for key in weights:
                weights[key] = weights[key] - params.mlp_learning_rate * grads[key]
        loss = mlp_loss(weights, x, y)
        if not math.isfinite(loss):
            raise ModelError(f"mlp training diverged at epoch {epoch} (loss {loss})")
    return MLPPayload(weights["w1"], weights["b1"], weights["w2"], weights["b2"])


def svm_objective(w: np.ndarray, b: float, x: np.ndarray, s: np.ndarray, lam: float) -> float:
    """Mean hinge loss plus L2 penalty; s holds labels in {-1, +1}."""
    margins = 1.0 - s * (x @ w + b)
    return float(np.mean(np.maximum(margins, 0.0)) + lam * float(w @ w))


def _fit_svm(train: Dataset, params: TrainParams) -> SVMPayload:
    x = train.as_matrix()
    s = train.labels.astype(np.float64) * 2.0 - 1.0
    n, d = x.shape
    w = np.zeros(d)
    b = 0.0
    rng = np.random.default_rng(params.seed)
    trace = [svm_objective(w, b, x, s, params.svm_lambda)]
    for epoch in range(params.svm_epochs):
        lr = params.svm_learning_rate / (1.0 + epoch)
        for i in rng.permutation(n):
            margin = s[i] * (float(x[i] @ w) + b)
            if margin < 1.0:
                w = w - lr * (2.0 * params.svm_lambda * w - s[i] * x[i])
                b = b + lr * s[i]
            else:
                w = w - lr * (2.0 * params.svm_lambda * w)
        value = svm_objective(w, b, x, s, params.svm_lambda)
        if not math.isfinite(value):
            raise ModelError(f"svm training diverged at epoch {epoch} (objective {value})")
        trace.append(value)
    return SVMPayload(w, b, tuple(trace))


ALGORITHM_FITTERS = {
    "tree": _fit_tree,
    "forest": _fit_forest,
    "naive_bayes": _fit_naive_bayes,
    "knn": _fit_knn,
    "mlp": _fit_mlp,
    "linear_svm": _fit_svm,
}


def fit_model(train: Dataset, params: TrainParams) -> TrainedModel:
    """Train one classifier on the dataset's full feature set."""
    _check_not_empty(train)
    started = time.perf_counter()
    payload = ALGORITHM_FITTERS[params.algorithm](train, params)
    elapsed = time.perf_counter() - started
    return TrainedModel(params, train.feature_names, payload, elapsed)


def _check_signature(model: TrainedModel, ds: Dataset):
    if ds.feature_names != model.feature_names:
        raise ModelError(
            f"feature signature mismatch: model expects {model.feature_names[:4]}..."
            f" ({len(model.feature_names)} features), dataset has"
            f" {ds.feature_names[:4]}... ({len(ds.feature_names)})"
        )


def predict_model(model: TrainedModel, ds: Dataset) -> np.ndarray:
    """Class ids (uint8: 1 = attack) for every row; ties go to attack."""
    _check_signature(model, ds)
    algo = model.algorithm
    if algo == "tree":
        return tree_mod.predict(model.payload, ds)
    if algo == "forest":
        votes = np.zeros(ds.row_count, dtype=np.int64)
        for root in model.payload.roots:
            votes += tree_mod.predict(root, ds)
        return (2 * votes >= len(model.payload.roots)).astype(np.uint8)
    if algo == "naive_bayes":
        joint = nb_log_joint(model.payload, ds)
        return (joint[:, 1] >= joint[:, 0]).astype(np.uint8)
    if algo == "knn":
        votes = _knn_votes(model.payload, ds.as_matrix(), model.params.k)
        return (2 * votes >= model.params.k).astype(np.uint8)
    if algo == "mlp":
        p = model.payload
        weights = {"w1": p.w1, "b1": p.b1, "w2": p.w2, "b2": p.b2}
        return (mlp_logits(weights, ds.as_matrix()) >= 0.0).astype(np.uint8)
    if algo == "linear_svm":
        scores = ds.as_matrix() @ model.payload.w + model.payload.b
        return (scores >= 0.0).astype(np.uint8)
    raise ModelError(f"unknown algorithm {algo!r}")


def _node_to_dict(node: TreeNode) -> dict:
    doc: dict = {"counts": list(node.counts)}
    if node.is_leaf:
        return doc
    doc["feature"] = node.feature
    doc["children"] = [_node_to_dict(c) for c in node.children]
    if node.is_numeric_split:
        doc["threshold"] = node.threshold
    else:
        doc["codes"] = list(node.codes)
        doc["default_child"] = node.default_child
    return doc


def _node_from_dict(doc: dict) -> TreeNode:
    counts = (int(doc["counts"][0]), int(doc["counts"][1]))
    if "children" not in doc:
        return TreeNode(counts)
    children = tuple(_node_from_dict(c) for c in doc["children"])
    if "threshold" in doc:
        return TreeNode(counts, int(doc["feature"]), float(doc["threshold"]), (), children)
    return TreeNode(
        counts,
        int(doc["feature"]),
        math.nan,
        tuple(int(c) for c in doc["codes"]),
        children,
        int(doc["default_child"]),
    )


def _payload_to_dict(model: TrainedModel) -> dict:
    algo = model.algorithm
    p = model.payload
    if algo == "tree":
        return {"root": _node_to_dict(p)}
    if algo == "forest":
        return {
            "feature_sample": p.feature_sample,
            "roots": [_node_to_dict(r) for r in p.roots],
        }
    if algo == "naive_bayes":
        stats = []
        for s in p.feature_stats:
            if isinstance(s, GaussianStats):
                stats.append({"kind": "numeric", "mean": list(s.mean), "var": list(s.var)})
            else:
                stats.append({
                    "kind": "nominal",
                    "log_table": [list(s.log_table[0]), list(s.log_table[1])],
                    "log_default": list(s.log_default),
                })
        return {"log_prior": list(p.log_prior), "feature_stats": stats}
    if algo == "knn":
        return {"matrix": p.matrix.tolist(), "labels": p.labels.tolist()}
    if algo == "mlp":
        return {"w1": p.w1.tolist(), "b1": p.b1.tolist(),
                "w2": p.w2.tolist(), "b2": p.b2.tolist()}
    if algo == "linear_svm":
        return {"w": p.w.tolist(), "b": p.b, "objective_trace": list(p.objective_trace)}
    raise ModelError(f"unknown algorithm {algo!r}")


def _payload_from_dict(algo: str, doc: dict):
    if algo == "tree":
        return _node_from_dict(doc["root"])
    if algo == "forest":
        return ForestPayload(
            tuple(_node_from_dict(r) for r in doc["roots"]),
            int(doc["feature_sample"]),
        )
    if algo == "naive_bayes":
        stats: list[object] = []
        for s in doc["feature_stats"]:
            if s["kind"] == "numeric":
                stats.append(GaussianStats(tuple(s["mean"]), tuple(s["var"])))
            else:
                stats.append(NominalStats(
                    (tuple(s["log_table"][0]), tuple(s["log_table"][1])),
                    tuple(s["log_default"]),
                ))
        return NBPayload(tuple(doc["log_prior"]), tuple(stats))
    if algo == "knn":
        return KNNPayload(
            np.asarray(doc["matrix"], dtype=np.float64).reshape(len(doc["labels"]), -1),
            np.asarray(doc["labels"], dtype=np.uint8),
        )
    if algo == "mlp":
        return MLPPayload(
            np.asarray(doc["w1"], dtype=np.float64),
            np.asarray(doc["b1"], dtype=np.float64),
            np.asarray(doc["w2"], dtype=np.float64),
            np.asarray(doc["b2"], dtype=np.float64),
        )
    if algo == "linear_svm":
        return SVMPayload(
            np.asarray(doc["w"], dtype=np.float64),
            float(doc["b"]),
            tuple(doc.get("objective_trace", ())),
        )
    raise ModelError(f"unknown algorithm {algo!r}")


def model_to_json(model: TrainedModel) -> str:
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "algorithm": model.algorithm,
        "params": asdict(model.params),
        "feature_names": list(model.feature_names),
        "train_seconds": model.train_seconds,
        "payload": _payload_to_dict(model),
    }
    return json.dumps(doc)


def model_from_json(text: str) -> TrainedModel:
    doc = json.loads(text)
    if doc.get("format") != MODEL_FORMAT:
        raise ModelError(f"not a model document: {doc.get('format')!r}")
    if doc.get("version") != MODEL_VERSION:
        raise ModelError(f"unsupported model version {doc.get('version')!r}")
    params = TrainParams(**doc["params"])
    return TrainedModel(
        params,
        tuple(doc["feature_names"]),
        _payload_from_dict(params.algorithm, doc["payload"]),
        float(doc["train_seconds"]),
    )
