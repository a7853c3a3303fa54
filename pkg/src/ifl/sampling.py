"""Generative process: sampled data points, sampled hypotheses, prediction rules.

This is the object-level (one sample at a time) implementation. The
Monte-Carlo estimators in :mod:`ifl.montecarlo` run the same draw layout
through compiled kernels; both read identical slots from the counter
streams in :mod:`ifl.rng`, so a kernel estimate can be cross-checked
against a loop over these functions draw for draw.

Slot layout of one sample stream (offsets are slot indices):

    0                      datum class label (low bit)
    1                      datum kind (uniform vs p_d)
    2 .. 2+n_max-1         datum feature draws (first n_d or n_r used)
    D+0 ..                 hypothesis f: class-0 dominant, class-0 rare,
                           class-1 dominant, class-1 rare (c_d+c_r each class)
    D+H ..                 hypothesis g (agreement estimators only)
    D+2H                   agreement coin (bernoulli mode only)

with D = 2 + max(n_d, n_r) and H = 2 (c_d + c_r).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Literal

from .params import FrameworkParams
from .rng import CounterStream, sample_without_replacement

Kind = Literal["dominant", "rare"]

DOMINANT: Kind = "dominant"
RARE: Kind = "rare"


@dataclass(frozen=True)
class FeatureId:
    """One feature of the universe: (class, population, index within pool)."""

    class_label: int
    kind: Kind
    index: int


@dataclass(frozen=True)
class DataPoint:
    label: int
    kind: Kind
    features: FrozenSet[FeatureId]


@dataclass(frozen=True)
class Hypothesis:
    """Per-class learned feature sets: ``dominant[label]`` and ``rare[label]``."""

    dominant: tuple[FrozenSet[FeatureId], FrozenSet[FeatureId]]
    rare: tuple[FrozenSet[FeatureId], FrozenSet[FeatureId]]

    def features_for_class(self, label: int) -> FrozenSet[FeatureId]:
        return self.dominant[label] | self.rare[label]

    def all_features(self) -> FrozenSet[FeatureId]:
        return self.features_for_class(0) | self.features_for_class(1)


def datum_slot_count(params: FrameworkParams) -> int:
    """Slots reserved for the datum part of a sample stream."""
    return 2 + max(params.n_d, params.n_r)


def hypothesis_slot_count(params: FrameworkParams) -> int:
    """Slots reserved for one hypothesis."""
    return 2 * (params.c_d + params.c_r)


def sample_datapoint(params: FrameworkParams, stream: CounterStream) -> DataPoint:
    """Draw a datum: uniform label, Ber(p_d) kind, features without replacement."""
    label = stream.u64(0) & 1
    if stream.unit(1) < params.p_d:
        kind, t, n = DOMINANT, params.t_d, params.n_d
    else:
        kind, t, n = RARE, params.t_r, params.n_r
    idxs = sample_without_replacement(stream, 2, n, t)
    features = frozenset(FeatureId(label, kind, i) for i in idxs)
    return DataPoint(label=label, kind=kind, features=features)


def sample_hypothesis(params: FrameworkParams, stream: CounterStream) -> Hypothesis:
    """Draw a model: c_d dominant and c_r rare features per class."""
    c_d, c_r = params.c_d, params.c_r
    dom = []
    rare = []
    per_class = c_d + c_r
    for label in (0, 1):
        base = label * per_class
        d_idx = sample_without_replacement(stream, base, c_d, params.t_d)
        r_idx = sample_without_replacement(stream, base + c_d, c_r, params.t_r)
        dom.append(frozenset(FeatureId(label, DOMINANT, i) for i in d_idx))
        rare.append(frozenset(FeatureId(label, RARE, i) for i in r_idx))
    return Hypothesis(dominant=(dom[0], dom[1]), rare=(rare[0], rare[1]))


def datapoint_correct_prob(h: Hypothesis, x: DataPoint) -> float:
    """1.0 when the model shares a feature with ``x``; else the 0.5 guess rate."""
    if h.features_for_class(x.label) & x.features:
        return 1.0
    return 0.5


def shared_class_features(f: Hypothesis, g: Hypothesis, label: int) -> int:
    """Number of features the two models share within one class's pools."""
    return (len(f.dominant[label] & g.dominant[label])
            + len(f.rare[label] & g.rare[label]))


def pair_case(f: Hypothesis, g: Hypothesis, x: DataPoint) -> tuple[str, int]:
    """Classify a (model, model, datum) triple into the agreement cases.

    Returns ("A", 0) when both models share a feature with x; ("B", k)
    when neither does and the models share k >= 1 features of x's class;
    ("C", 0) otherwise.
    """
    f_hit = bool(f.features_for_class(x.label) & x.features)
    g_hit = bool(g.features_for_class(x.label) & x.features)
    if f_hit and g_hit:
        return ("A", 0)
    if not f_hit and not g_hit:
        k = shared_class_features(f, g, x.label)
        if k >= 1:
            return ("B", k)
    return ("C", 0)
