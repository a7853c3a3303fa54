"""Interaction-tensor pipeline over per-model activation matrices.

Stages: column-centered PCA per model, cross-model feature correlation
tensor, greedy correlation-threshold clustering, and thresholded
feature-to-data matching that yields the sparse binary interaction
tensor (model, datum, feature-cluster).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class ActivationMatrix:
    """Rows are data points, columns are representation dimensions."""

    model_id: str
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float32)
        if v.ndim != 2:
            raise ValidationError(
                f"activations for {self.model_id!r} must be 2-d, got shape {v.shape}"
            )
        if v.shape[0] < 2 or v.shape[1] < 1:
            raise ValidationError(
                f"activations for {self.model_id!r} need N >= 2, d >= 1, got {v.shape}"
            )
        if not np.isfinite(v).all():
            raise ValidationError(
                f"activations for {self.model_id!r} contain non-finite values"
            )
        object.__setattr__(self, "values", v)

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_dims(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class ProjectionBasis:
    """Top-k right singular vectors of the centered activation matrix."""

    columns: np.ndarray        # d x k, orthonormal
    singular_values: np.ndarray  # k, nonincreasing
    column_means: np.ndarray   # d


@dataclass(frozen=True)
class ProjectedActivations:
    """Per-feature scores and their per-column linf-normalized magnitudes."""

    model_id: str
    values: np.ndarray       # N x k scores
    normalized: np.ndarray   # N x k in [0, 1]
    zero_columns: tuple = ()

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[1]


def fit_pca(act: ActivationMatrix, k: int) -> ProjectionBasis:
    """PCA basis from the SVD of the column-centered activations.

    Columns are centered so within-model feature scores come out exactly
    decorrelated. Each singular vector is flipped so its largest-magnitude
    entry is positive, pinning the otherwise arbitrary SVD signs.
    """
    x = act.values.astype(np.float64)
    n, d = x.shape
    if not (1 <= k <= min(n, d)):
        raise ValidationError(
            f"k must be in [1, min(N, d)] = [1, {min(n, d)}], got {k}"
        )
    means = x.mean(axis=0)
    centered = x - means
    _, svals, vt = np.linalg.svd(centered, full_matrices=False)
    cols = vt[:k].T.copy()
    for a in range(k):
        peak = np.argmax(np.abs(cols[:, a]))
        if cols[peak, a] < 0:
            cols[:, a] = -cols[:, a]
    return ProjectionBasis(columns=cols, singular_values=svals[:k].copy(),
                           column_means=means)


def project(act: ActivationMatrix, basis: ProjectionBasis,
            model_id: str | None = None) -> ProjectedActivations:
    """Scores (centered @ basis) plus per-column linf-normalized magnitudes.

    Columns whose scores are identically zero stay zero in the normalized
    matrix and are reported in ``zero_columns``.
    """
    x = act.values.astype(np.float64)
    if x.shape[1] != basis.columns.shape[0]:
        raise ValidationError(
            f"dimension mismatch: activations have d={x.shape[1]}, "
            f"basis expects d={basis.columns.shape[0]}"
        )
    scores = (x - basis.column_means) @ basis.columns
    mags = np.abs(scores)
    peaks = mags.max(axis=0)
    zero_cols = np.flatnonzero(peaks == 0.0)
    safe = np.where(peaks == 0.0, 1.0, peaks)
    normalized = mags / safe
    if zero_cols.size:
        warnings.warn(
            f"model {act.model_id!r}: projected feature column(s) "
            f"{zero_cols.tolist()} are identically zero", stacklevel=2)
    return ProjectedActivations(
        model_id=model_id if model_id is not None else act.model_id,
        values=scores, normalized=normalized,
        zero_columns=tuple(int(z) for z in zero_cols))


def correlation_matrix(p: ProjectedActivations, q: ProjectedActivations) -> np.ndarray:
    """Pearson correlation (population form) between feature columns.

    Zero-variance columns yield 0 rows/columns; a warning flags them.
    """
    if p.n_rows != q.n_rows:
        raise ValidationError(
            f"row-count mismatch: {p.n_rows} vs {q.n_rows}"
        )
    n = p.n_rows

    def standardize(v: ProjectedActivations) -> np.ndarray:
        centered = v.values - v.values.mean(axis=0)
        sigma = np.sqrt((centered ** 2).mean(axis=0))
        dead = sigma == 0.0
        if dead.any():
            warnings.warn(
                f"model {v.model_id!r}: zero-variance feature column(s) "
                f"{np.flatnonzero(dead).tolist()} correlate as 0", stacklevel=3)
        return np.where(dead, 0.0, centered / np.where(dead, 1.0, sigma))

    corr = standardize(p).T @ standardize(q) / n
    return np.clip(corr, -1.0, 1.0)


@dataclass(frozen=True)
class CorrelationTensor:
    """All pairwise feature-correlation blocks: values[i, j] is k x k."""

    values: np.ndarray  # M x M x k x k

    @property
    def n_models(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[2]


def build_lambda(projections: list[ProjectedActivations]) -> CorrelationTensor:
    """Correlation blocks for every model pair; mirrored blocks are exact transposes."""
    m = len(projections)
    if m < 2:
        raise ValidationError(f"need at least 2 models, got {m}")
    k = projections[0].n_features
    n = projections[0].n_rows
    for p in projections:
        if p.n_features != k or p.n_rows != n:
            raise ValidationError(
                f"model {p.model_id!r} has shape ({p.n_rows}, {p.n_features}), "
                f"expected ({n}, {k})"
            )
    values = np.empty((m, m, k, k), dtype=np.float64)
    for i in range(m):
        for j in range(i, m):
            block = correlation_matrix(projections[i], projections[j])
            values[i, j] = block
            if j != i:
                values[j, i] = block.T
    return CorrelationTensor(values=values)


def percentile_threshold(values, p) -> float:
    """Nearest-rank percentile: element ceil(p/100 * n) of the sorted multiset."""
    flat = np.sort(np.asarray(values, dtype=np.float64).ravel())
    if flat.size == 0:
        raise ValidationError("percentile of an empty multiset")
    if not (0 < p <= 100):
        raise ValidationError(f"percentile must be in (0, 100], got {p}")
    rank = int(math.ceil(Fraction(p) * flat.size / 100))
    return float(flat[rank - 1])


def lambda_offdiagonal_values(lam: CorrelationTensor) -> np.ndarray:
    """|correlation| entries of all cross-model blocks (i != j)."""
    m = lam.n_models
    mask = ~np.eye(m, dtype=bool)
    return np.abs(lam.values[mask]).ravel()


@dataclass(frozen=True)
class ClusterAssignment:
    """Cluster id (1-based, contiguous) per (model, feature) pair."""

    assignment: np.ndarray  # M x k int32
    gamma_corr: float

    @property
    def n_clusters(self) -> int:
        return int(self.assignment.max())

    def cluster_sizes(self) -> np.ndarray:
        return np.bincount(self.assignment.ravel(), minlength=self.n_clusters + 1)[1:]

    def model_cluster_matrix(self) -> np.ndarray:
        """M x T bool: does model m own any feature in cluster t."""
        m, k = self.assignment.shape
        t = self.n_clusters
        out = np.zeros((m, t), dtype=bool)
        for mi in range(m):
            out[mi, self.assignment[mi] - 1] = True
        return out


def cluster_features(lam: CorrelationTensor, gamma_corr: float) -> ClusterAssignment:
    """Greedy correlation-threshold clustering of the M*k features.

    Pairs are visited in row-major order of the (model, feature) grid.
    An unassigned pair seeds a new cluster; every pair (p, q) whose
    absolute correlation with the seed exceeds both gamma_corr and the
    best correlation recorded for (p, q) so far joins the seed's cluster
    (possibly leaving an earlier one). Seeds self-correlate at 1 and can
    never be stolen, so cluster ids stay contiguous and nonempty.
    """
    if not (0.0 < gamma_corr < 1.0):
        raise ValidationError(f"gamma_corr must be in (0, 1), got {gamma_corr}")
    corr = np.abs(lam.values)
    m, k = corr.shape[0], corr.shape[2]
    assignment = np.zeros((m, k), dtype=np.int32)
    maximum = np.full((m, k), -1.0)
    current = 0
    for i in range(m):
        for j in range(k):
            if assignment[i, j] != 0:
                continue
            current += 1
            assignment[i, j] = current
            for p in range(m):
                row = corr[i, p, j, :]
                joins = (row > maximum[p]) & (row > gamma_corr)
                assignment[p, joins] = current
                maximum[p, joins] = row[joins]
    return ClusterAssignment(assignment=assignment, gamma_corr=float(gamma_corr))


@dataclass(frozen=True)
class InteractionTensor:
    """Sparse binary (model, datum, feature-cluster) incidences.

    A triple (m, n, t) is present iff model m has a feature in cluster t
    whose normalized magnitude on datum n exceeds gamma_data. Triples are
    unique and sorted lexicographically.
    """

    dims: tuple[int, int, int]  # (M, N, T)
    triples: np.ndarray         # nnz x 3 uint32, sorted
    gamma_corr: float
    gamma_data: float

    @property
    def nnz(self) -> int:
        return self.triples.shape[0]

    def data_feature_matrix(self) -> np.ndarray:
        """N x T bool: datum n has cluster t in any model (OR over models)."""
        _, n, t = self.dims
        out = np.zeros((n, t), dtype=bool)
        if self.nnz:
            out[self.triples[:, 1], self.triples[:, 2]] = True
        return out

    def model_feature_matrix(self) -> np.ndarray:
        """M x T bool: model m exhibits cluster t on some datum."""
        m, _, t = self.dims
        out = np.zeros((m, t), dtype=bool)
        if self.nnz:
            out[self.triples[:, 0], self.triples[:, 2]] = True
        return out


def assign_data_features(projections: list[ProjectedActivations],
                         clusters: ClusterAssignment,
                         gamma_data: float) -> tuple[np.ndarray, InteractionTensor]:
    """Threshold normalized feature magnitudes into the interaction tensor.

    Returns the aggregated N x T data-feature matrix and the tensor
    itself.
    """
    # 0 and 1 are degenerate but well-defined: everything / nothing passes
    # the strict > threshold.
    if not (0.0 <= gamma_data <= 1.0):
        raise ValidationError(f"gamma_data must be in [0, 1], got {gamma_data}")
    m, k = clusters.assignment.shape
    if len(projections) != m:
        raise ValidationError(
            f"assignment covers {m} models but {len(projections)} projections given"
        )
    n = projections[0].n_rows
    t = clusters.n_clusters
    parts = []
    for mi, proj in enumerate(projections):
        if proj.n_features != k or proj.n_rows != n:
            raise ValidationError(
                f"model {proj.model_id!r} projection shape mismatch"
            )
        rows, feats = np.nonzero(proj.normalized > gamma_data)
        if rows.size == 0:
            continue
        trip = np.empty((rows.size, 3), dtype=np.uint32)
        trip[:, 0] = mi
        trip[:, 1] = rows
        trip[:, 2] = clusters.assignment[mi, feats] - 1
        parts.append(trip)
    if parts:
        triples = np.unique(np.concatenate(parts, axis=0), axis=0)
    else:
        triples = np.empty((0, 3), dtype=np.uint32)
    omega = InteractionTensor(dims=(m, n, t), triples=triples,
                              gamma_corr=clusters.gamma_corr,
                              gamma_data=float(gamma_data))
    return omega.data_feature_matrix(), omega
