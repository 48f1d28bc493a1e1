"""Filter-style feature scoring: entropy ranking and relief weighting.

Three scorers share one interface: each maps a dataset to a per-feature
score vector, higher is better. Entropy-based scorers (information gain,
gain ratio) see numeric features through an equal-frequency binning; the
relief weigher works on raw values with range-normalized differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, DatasetError
from .preprocess import bin_codes, equal_frequency_edges

FILTER_METHODS = ("infogain", "gainratio", "relief")


def entropy(codes: np.ndarray) -> float:
    """Base-2 entropy of an integer code vector."""
    if codes.size == 0:
        return 0.0
    counts = np.bincount(codes)
    counts = counts[counts > 0]
    p = counts / codes.size
    return float(-np.sum(p * np.log2(p)))


def info_gain(feature_codes: np.ndarray, class_codes: np.ndarray) -> float:
    """Reduction in class entropy from observing the feature."""
    if feature_codes.size != class_codes.size:
        raise DatasetError("feature and class vectors differ in length")
    n = feature_codes.size
    if n == 0:
        return 0.0
    h_class = entropy(class_codes)
    cond = 0.0
    for v in np.unique(feature_codes):
        mask = feature_codes == v
        cond += (mask.sum() / n) * entropy(class_codes[mask])
    gain = h_class - cond
    return max(gain, 0.0)


def gain_ratio(feature_codes: np.ndarray, class_codes: np.ndarray) -> float:
    """Information gain normalized by the feature's own entropy.

    Features with zero entropy (a single observed value) score 0. The
    result is clamped into [0, 1] to absorb rounding at the boundaries.
    """
    h_feature = entropy(feature_codes)
    if h_feature == 0.0:
        return 0.0
    ratio = info_gain(feature_codes, class_codes) / h_feature
    return min(max(ratio, 0.0), 1.0)


def feature_codes(ds: Dataset, index: int, bins: int = 10) -> np.ndarray:
    """Integer view of one feature for the entropy scorers.

    Nominal columns use their dictionary ids; numeric columns are binned
    with equal-frequency edges fitted on the column itself.
    """
    col = ds.columns[index]
    if col.kind == "nominal":
        return col.values.astype(np.int64)
    edges = equal_frequency_edges(col.values, bins)
    return bin_codes(col.values, edges).astype(np.int64)


def relief_weights(
    ds: Dataset,
    *,
    neighbors: int = 10,
    sample_count: int | None = None,
    seed: int = 0,
) -> np.ndarray:
    """Relief feature weights in [-1, 1], higher meaning more relevant.

    For each sampled row the nearest ``neighbors`` same-class rows (hits)
    and nearest ``neighbors`` other-class rows (misses) are found under the
    summed per-feature difference. Hit differences push a weight down,
    miss differences push it up; every contribution is divided by the
    number of sampled rows times ``neighbors``. Nominal features differ
    0/1; numeric differences are scaled by the feature's full-data range
    (a constant feature never differs). Ties in distance break toward the
    lower row index. Each class must have at least ``neighbors`` + 1 rows
    so full hit and miss sets always exist.

    Sampling: when ``sample_count`` is None or >= the row count, every row
    is visited in order; otherwise ``sample_count`` distinct rows are drawn
    by numpy's default_rng(seed).choice without replacement.
    """
    if neighbors < 1:
        raise DatasetError(f"neighbors must be >= 1, got {neighbors}")
    n = ds.row_count
    d = len(ds.columns)
    if n == 0 or d == 0:
        return np.zeros(d, dtype=np.float64)
    labels = ds.labels
    for cls in (0, 1):
        have = int(np.count_nonzero(labels == cls))
        if have < neighbors + 1:
            raise DatasetError(
                f"class {cls} has {have} rows, need at least {neighbors + 1} "
                f"for {neighbors} neighbors"
            )

    spans: list[float] = []
    for col in ds.columns:
        if col.kind == "numeric":
            spans.append(float(col.values.max()) - float(col.values.min()))
        else:
            spans.append(0.0)

    if sample_count is None or sample_count >= n:
        sampled = np.arange(n)
    else:
        if sample_count < 1:
            raise DatasetError(f"sample_count must be >= 1, got {sample_count}")
        sampled = np.random.default_rng(seed).choice(n, size=sample_count, replace=False)
    m = len(sampled)

    weights = np.zeros(d, dtype=np.float64)
    for i in sampled:
        diffs = np.empty((d, n), dtype=np.float64)
        dist = np.zeros(n, dtype=np.float64)
        for f, col in enumerate(ds.columns):
            if col.kind == "nominal":
                df = (col.values != col.values[i]).astype(np.float64)
            elif spans[f] > 0.0:
                df = np.abs(col.values - col.values[i]) / spans[f]
            else:
                df = np.zeros(n, dtype=np.float64)
            diffs[f] = df
            dist += df
        for same_class in (True, False):
            cand = np.flatnonzero((labels == labels[i]) == same_class)
            cand = cand[cand != i]
            order = np.argsort(dist[cand], kind="stable")
            chosen = cand[order[:neighbors]]
            for j in chosen:
                share = diffs[:, j] / (m * neighbors)
                if same_class:
                    weights -= share
                else:
                    weights += share
    np.clip(weights, -1.0, 1.0, out=weights)
    return weights


@dataclass(frozen=True)
class FilterScores:
    """Per-feature scores plus the full ranking they induce."""

    method: str
    feature_names: tuple[str, ...]
    scores: np.ndarray
    ranked: tuple[int, ...]  # every feature index, best first

    def __post_init__(self):
        self.scores.flags.writeable = False

    def top(self, k: int) -> tuple[int, ...]:
        """Indices of the k best features; a prefix of the full ranking."""
        if not (0 < k <= len(self.ranked)):
            raise DatasetError(f"k must be in 1..{len(self.ranked)}, got {k}")
        return self.ranked[:k]


def rank_by_score(scores: np.ndarray) -> tuple[int, ...]:
    """All indices ordered by descending score, ties toward the lower index."""
    order = np.argsort(-scores, kind="stable")
    return tuple(int(i) for i in order)


def score_features(
    ds: Dataset,
    method: str,
    *,
    bins: int = 10,
    neighbors: int = 10,
    sample_count: int | None = None,
    seed: int = 0,
) -> FilterScores:
    """Run one filter scorer over every input feature."""
    if method not in FILTER_METHODS:
        raise DatasetError(f"unknown filter method {method!r}; pick from {FILTER_METHODS}")
    if method == "relief":
        scores = relief_weights(
            ds, neighbors=neighbors, sample_count=sample_count, seed=seed
        )
    else:
        class_codes = ds.labels.astype(np.int64)
        values = []
        for f in range(len(ds.columns)):
            codes = feature_codes(ds, f, bins)
            if method == "infogain":
                values.append(info_gain(codes, class_codes))
            else:
                values.append(gain_ratio(codes, class_codes))
        scores = np.asarray(values, dtype=np.float64)
    return FilterScores(method, ds.feature_names, scores, rank_by_score(scores))
