"""Observation metrics over the interaction tensor and model predictions.

Covers: per-feature frequency, ensemble confidence, confidence/feature
tables and split densities, data-count/model-count correlation, shared
errors between model pairs, Dice feature similarity with nearest
neighbors, and per-class feature frequency. Every function is pure and
returns rows in a deterministic order; conditions worth surfacing come
back as flag strings which the CSV writers emit as a trailing
``#warnings`` block.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .pipeline import InteractionTensor


@dataclass(frozen=True)
class PredictionMatrix:
    """Per-model predicted labels plus ground truth."""

    predictions: np.ndarray  # M x N int
    true_labels: np.ndarray  # N int
    num_classes: int

    def __post_init__(self):
        preds = np.asarray(self.predictions, dtype=np.int64)
        labels = np.asarray(self.true_labels, dtype=np.int64)
        if preds.ndim != 2:
            raise ValidationError(f"predictions must be M x N, got shape {preds.shape}")
        if labels.ndim != 1 or labels.shape[0] != preds.shape[1]:
            raise ValidationError(
                f"true_labels shape {labels.shape} does not match predictions "
                f"{preds.shape}"
            )
        if self.num_classes < 1:
            raise ValidationError(f"num_classes must be >= 1, got {self.num_classes}")
        for name, arr in (("predictions", preds), ("true_labels", labels)):
            if arr.size and (arr.min() < 0 or arr.max() >= self.num_classes):
                raise ValidationError(
                    f"{name} contain labels outside [0, {self.num_classes})"
                )
        object.__setattr__(self, "predictions", preds)
        object.__setattr__(self, "true_labels", labels)

    @property
    def n_models(self) -> int:
        return self.predictions.shape[0]

    @property
    def n_data(self) -> int:
        return self.predictions.shape[1]


def _check_n(omega: InteractionTensor, preds: PredictionMatrix):
    if omega.dims[1] != preds.n_data:
        raise ValidationError(
            f"tensor has N={omega.dims[1]} data but predictions have N={preds.n_data}"
        )


def feature_data_counts(omega: InteractionTensor) -> np.ndarray:
    """Per-feature count of data containing it in any model (clip over models)."""
    return omega.data_feature_matrix().sum(axis=0).astype(np.int64)


def feature_frequency(omega: InteractionTensor) -> list[tuple[int, int]]:
    """(feature_id, data_count) sorted by count descending, id ascending."""
    counts = feature_data_counts(omega)
    order = sorted(range(len(counts)), key=lambda t: (-counts[t], t))
    return [(t, int(counts[t])) for t in order]


def ensemble_confidence(preds: PredictionMatrix) -> np.ndarray:
    """Fraction of models predicting the true label, per datum."""
    return (preds.predictions == preds.true_labels).mean(axis=0)


def datum_feature_counts(omega: InteractionTensor) -> np.ndarray:
    """Number of distinct features per datum (any model)."""
    return omega.data_feature_matrix().sum(axis=1).astype(np.int64)


def confidence_feature_table(omega: InteractionTensor,
                             preds: PredictionMatrix) -> list[tuple[int, float, int]]:
    """(datum, confidence, n_features) rows for external density plotting."""
    _check_n(omega, preds)
    conf = ensemble_confidence(preds)
    nfeat = datum_feature_counts(omega)
    return [(n, float(conf[n]), int(nfeat[n])) for n in range(preds.n_data)]


def split_feature_density(omega: InteractionTensor, preds: PredictionMatrix):
    """Per-feature densities for the all-correct and not-all-correct data groups.

    Each group's counts are normalized by the group's total number of
    feature incidences, so each density sums to 1 (an empty or
    feature-free group stays all-zero and is flagged). Rows follow the
    global frequency rank.
    """
    _check_n(omega, preds)
    flags = []
    high = ensemble_confidence(preds) == 1.0
    matrix = omega.data_feature_matrix()
    densities = []
    for name, sel in (("high-confidence", high), ("low-confidence", ~high)):
        counts = matrix[sel].sum(axis=0).astype(np.float64)
        total = counts.sum()
        if total == 0:
            flags.append(f"{name} group has no feature incidences; density left zero")
            densities.append(counts)
        else:
            densities.append(counts / total)
    order = [t for t, _ in feature_frequency(omega)]
    rows = [(t, rank, float(densities[0][t]), float(densities[1][t]))
            for rank, t in enumerate(order)]
    return rows, flags


def data_model_counts(omega: InteractionTensor):
    """(feature_id, data_count, model_count) rows plus their Pearson correlation.

    Correlation is over features present in the tensor; it is None (and
    flagged) when fewer than two such features exist or either count has
    no variance.
    """
    data_counts = feature_data_counts(omega)
    model_counts = omega.model_feature_matrix().sum(axis=0).astype(np.int64)
    rows = [(t, int(data_counts[t]), int(model_counts[t]))
            for t in range(omega.dims[2])]
    flags = []
    active = (data_counts > 0) | (model_counts > 0)
    x = data_counts[active].astype(np.float64)
    y = model_counts[active].astype(np.float64)
    corr = None
    if x.size < 2:
        flags.append("fewer than 2 features present; correlation undefined")
    elif x.std() == 0.0 or y.std() == 0.0:
        flags.append("counts have no variance; correlation undefined")
    else:
        corr = float(np.corrcoef(x, y)[0, 1])
    return rows, corr, flags


def shared_feature_count(model_features: np.ndarray, i: int, j: int) -> int:
    """Number of feature clusters both models possess."""
    return int((model_features[i] & model_features[j]).sum())


def shared_error(preds: PredictionMatrix, i: int, j: int,
                 mode: str = "identical") -> tuple[float, bool]:
    """Jointly misclassified data, relative to the pair's mean error count.

    identical mode counts joint errors only when both models emit the
    same wrong label; joint mode counts any joint error. Returns
    (value, degenerate) where degenerate marks error-free pairs.
    """
    if mode not in ("identical", "joint"):
        raise ValidationError(f"mode must be 'identical' or 'joint', got {mode!r}")
    wrong_i = preds.predictions[i] != preds.true_labels
    wrong_j = preds.predictions[j] != preds.true_labels
    joint = wrong_i & wrong_j
    if mode == "identical":
        joint = joint & (preds.predictions[i] == preds.predictions[j])
    denom = (int(wrong_i.sum()) + int(wrong_j.sum())) / 2.0
    if denom == 0.0:
        return 0.0, True
    return float(joint.sum()) / denom, False


def shared_error_table(model_features: np.ndarray, preds: PredictionMatrix,
                       mode: str = "identical"):
    """(i, j, shared_features, shared_error) for every unordered model pair."""
    m = preds.n_models
    if m < 2:
        raise ValidationError(f"need at least 2 models, got {m}")
    if model_features.shape[0] != m:
        raise ValidationError(
            f"model_features covers {model_features.shape[0]} models, "
            f"predictions have {m}"
        )
    rows = []
    flags = []
    for i in range(m):
        for j in range(i + 1, m):
            shared = shared_feature_count(model_features, i, j)
            err, degenerate = shared_error(preds, i, j, mode=mode)
            if degenerate:
                flags.append(f"pair ({i}, {j}) has no errors; shared_error set to 0")
            rows.append((i, j, shared, err))
    return rows, flags


def feature_similarity(fa, fb) -> float:
    """Dice coefficient 2|A & B| / (|A| + |B|); two empty sets define 0."""
    sa, sb = set(fa), set(fb)
    if not sa and not sb:
        return 0.0
    return 2.0 * len(sa & sb) / (len(sa) + len(sb))


def nearest_neighbors(data_features: np.ndarray, index: int,
                      top_k: int) -> list[tuple[int, float]]:
    """top_k data ranked by Dice similarity to the query row (query excluded).

    Ties break toward the smaller datum index.
    """
    n = data_features.shape[0]
    if not (0 <= index < n):
        raise ValidationError(f"index must be in [0, {n}), got {index}")
    if top_k < 1:
        raise ValidationError(f"top_k must be >= 1, got {top_k}")
    query = data_features[index].astype(bool)
    others = data_features.astype(bool)
    inter = (others & query).sum(axis=1)
    sizes = others.sum(axis=1) + query.sum()
    with np.errstate(invalid="ignore"):
        sims = np.where(sizes > 0, 2.0 * inter / np.where(sizes == 0, 1, sizes), 0.0)
    order = sorted((i for i in range(n) if i != index),
                   key=lambda i: (-sims[i], i))
    return [(i, float(sims[i])) for i in order[:top_k]]


def per_class_frequency(data_features: np.ndarray, true_labels: np.ndarray,
                        num_classes: int | None = None) -> np.ndarray:
    """T x K counts of class-k data containing each feature."""
    labels = np.asarray(true_labels, dtype=np.int64)
    if labels.ndim != 1 or labels.shape[0] != data_features.shape[0]:
        raise ValidationError(
            f"labels shape {labels.shape} does not match data_features "
            f"{data_features.shape}"
        )
    k = int(labels.max()) + 1 if num_classes is None else num_classes
    if labels.size and (labels.min() < 0 or labels.max() >= k):
        raise ValidationError(f"labels outside [0, {k})")
    t = data_features.shape[1]
    out = np.zeros((t, k), dtype=np.int64)
    for cls in range(k):
        out[:, cls] = data_features[labels == cls].sum(axis=0)
    return out


# ---------------------------------------------------------------------------
# CSV emission
# ---------------------------------------------------------------------------

def format_float(x: float) -> str:
    return f"{x:.12g}"


def write_csv_with_warnings(path, header: list[str], rows, flags=()):
    """UTF-8 CSV with a fixed header; flags land in a #warnings block."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(
            format_float(v) if isinstance(v, float) else str(v) for v in row))
    if flags:
        lines.append("#warnings")
        for flag in flags:
            lines.append(f"# {flag}")
    text = "\n".join(lines) + "\n"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
