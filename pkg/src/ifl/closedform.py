"""Closed-form accuracy, agreement, and coverage-bound formulas.

Everything here is exact combinatorics over sampling-without-replacement
pools. Two arithmetic lanes are provided:

* ``exact=True``  : big-integer binomials and ``Fraction`` throughout;
  identities such as q1 + sum(q2) + q3 = 1 hold exactly.
* ``exact=False`` : float fast path. Binomial *ratios* are evaluated as
  telescoping products so nothing overflows even at pool sizes where the
  raw coefficients have hundreds of digits.

Notation used in docstrings: C(n, r) is the binomial coefficient with
the convention C(n, r) = 0 whenever n < 0, r < 0 or n < r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import ValidationError
from .params import AgreementFn, CoverageParams, FrameworkParams

Number = Union[float, Fraction]


def binom(n: int, r: int) -> int:
    """C(n, r) as an exact big integer; 0 when n < 0, r < 0 or n < r."""
    if n < 0 or r < 0 or n < r:
        return 0
    return math.comb(n, r)


def _avoid_ratio_float(total: int, removed: int, draws: int) -> float:
    """C(total - removed, draws) / C(total, draws) without forming either.

    This is the probability that ``draws`` samples taken without
    replacement from ``total`` items all miss a marked subset of size
    ``removed``. Telescoping keeps every factor in [0, 1].
    """
    if total - removed < draws:
        return 0.0
    out = 1.0
    for i in range(draws):
        out *= (total - removed - i) / (total - i)
    return out


def _avoid_ratio_exact(total: int, removed: int, draws: int) -> Fraction:
    den = binom(total, draws)
    if den == 0:
        raise ValidationError(
            f"invalid pool: C({total}, {draws}) = 0 in denominator"
        )
    return Fraction(binom(total - removed, draws), den)


def _hypergeom_pmf_float(a: int, pop: int, marked: int, draws: int) -> float:
    """P[a marked items in ``draws`` draws] = C(marked,a) C(pop-marked,draws-a) / C(pop,draws).

    Caller guarantees pop >= draws >= 0. Evaluated as C(draws, a) times a
    telescoping product of per-draw probabilities, so no large
    intermediates appear.
    """
    if a < 0 or a > marked or draws - a < 0 or draws - a > pop - marked:
        return 0.0
    out = float(math.comb(draws, a))
    for i in range(a):
        out *= (marked - i) / (pop - i)
    for j in range(draws - a):
        out *= (pop - marked - j) / (pop - a - j)
    return out


def expected_accuracy(params: FrameworkParams, exact: bool = False) -> Number:
    """Expected accuracy of a random model on a random datum.

    Acc = p_d (1 - C(t_d-c_d, n_d) / (2 C(t_d, n_d)))
        + p_r (1 - C(t_r-c_r, n_r) / (2 C(t_r, n_r)))
    """
    p = params
    if exact:
        pd = Fraction(p.p_d)
        miss_d = _avoid_ratio_exact(p.t_d, p.c_d, p.n_d)
        miss_r = _avoid_ratio_exact(p.t_r, p.c_r, p.n_r)
        return pd * (1 - Fraction(1, 2) * miss_d) + (1 - pd) * (1 - Fraction(1, 2) * miss_r)
    miss_d = _avoid_ratio_float(p.t_d, p.c_d, p.n_d)
    miss_r = _avoid_ratio_float(p.t_r, p.c_r, p.n_r)
    return p.p_d * (1.0 - 0.5 * miss_d) + p.p_r * (1.0 - 0.5 * miss_r)


@dataclass(frozen=True)
class QComponents:
    """Probabilities of the three joint-prediction cases.

    q1    : both models share a feature with the datum.
    q2[k] : neither model shares a feature with the datum, and the two
            models share exactly k features of the datum's class
            (index k = 1..c; entry k is q2[k-1]).
    q3    : remainder; the models guess independently.
    """

    q1: Number
    q2: tuple
    q3: Number

    def q2_at(self, k: int) -> Number:
        """q2(k) for k in 1..c."""
        return self.q2[k - 1]


def q_components(params: FrameworkParams, exact: bool = False) -> QComponents:
    """The case probabilities (q1, q2(1..c), q3).

    q2(k) for a dominant datum conditions both models on avoiding the
    datum's n_d dominant features, leaving a pool of t_d - n_d; the rare
    pool is unconstrained. For a rare datum the roles are swapped. Each
    side is the convolution of two hypergeometric shared-count laws
    (dominant and rare overlaps between the two models' class sets).
    """
    p = params
    c_d, c_r, t_d, t_r, n_d, n_r = p.c_d, p.c_r, p.t_d, p.t_r, p.n_d, p.n_r

    if exact:
        pd = Fraction(p.p_d)
        pr = 1 - pd
        miss_d = _avoid_ratio_exact(t_d, c_d, n_d)
        miss_r = _avoid_ratio_exact(t_r, c_r, n_r)
        q1 = pd * (1 - miss_d) ** 2 + pr * (1 - miss_r) ** 2

        den_dd = binom(t_d, c_d) ** 2 * binom(t_r, c_r)
        den_rr = binom(t_d, c_d) * binom(t_r, c_r) ** 2
        q2 = []
        for k in range(1, p.c + 1):
            dom_num = 0
            rare_num = 0
            for a in range(0, k + 1):
                b = k - a
                dom_num += (binom(t_d - n_d, c_d) * binom(c_d, a)
                            * binom(t_d - n_d - c_d, c_d - a)
                            * binom(c_r, b) * binom(t_r - c_r, c_r - b))
                rare_num += (binom(c_d, a) * binom(t_d - c_d, c_d - a)
                             * binom(t_r - n_r, c_r) * binom(c_r, b)
                             * binom(t_r - n_r - c_r, c_r - b))
            q2.append(pd * Fraction(dom_num, den_dd)
                      + pr * Fraction(rare_num, den_rr))
        q3 = 1 - q1 - sum(q2, Fraction(0))
        return QComponents(q1=q1, q2=tuple(q2), q3=q3)

    miss_d = _avoid_ratio_float(t_d, c_d, n_d)
    miss_r = _avoid_ratio_float(t_r, c_r, n_r)
    q1 = p.p_d * (1.0 - miss_d) ** 2 + p.p_r * (1.0 - miss_r) ** 2

    # P[model avoids the datum] per population, conditioning pools for q2.
    avoid_d = _avoid_ratio_float(t_d, n_d, c_d)
    avoid_r = _avoid_ratio_float(t_r, n_r, c_r)
    q2 = []
    for k in range(1, p.c + 1):
        dom = 0.0
        if avoid_d > 0.0:
            s = 0.0
            for a in range(0, k + 1):
                s += (_hypergeom_pmf_float(a, t_d - n_d, c_d, c_d)
                      * _hypergeom_pmf_float(k - a, t_r, c_r, c_r))
            dom = avoid_d * avoid_d * s
        rare = 0.0
        if avoid_r > 0.0:
            s = 0.0
            for a in range(0, k + 1):
                s += (_hypergeom_pmf_float(a, t_d, c_d, c_d)
                      * _hypergeom_pmf_float(k - a, t_r - n_r, c_r, c_r))
            rare = avoid_r * avoid_r * s
        q2.append(p.p_d * dom + p.p_r * rare)
    q3 = 1.0 - q1 - math.fsum(q2)
    return QComponents(q1=q1, q2=tuple(q2), q3=q3)


def expected_agreement(params: FrameworkParams, zeta: AgreementFn,
                       exact: bool = False,
                       components: QComponents | None = None) -> Number:
    """Expected agreement of an i.i.d. model pair on a random datum.

    Agr = 1/2 + q1/2 + sum_k (zeta(k, c) - 1/2) q2(k)
    """
    qc = components if components is not None else q_components(params, exact=exact)
    c = params.c
    if exact:
        half = Fraction(1, 2)
        out = half + half * qc.q1
        for k in range(1, c + 1):
            out += (zeta.evaluate_exact(k, c) - half) * qc.q2_at(k)
        return out
    out = 0.5 + 0.5 * qc.q1
    for k in range(1, c + 1):
        out += (zeta.evaluate(k, c) - 0.5) * qc.q2_at(k)
    return out


def expected_agreement_case_sum(params: FrameworkParams, zeta: AgreementFn,
                                exact: bool = False,
                                components: QComponents | None = None) -> Number:
    """Alternative grouping of the same expectation.

    Agr = q1 + q3/2 + sum_k zeta(k, c) q2(k)

    Kept as an independent expression so the algebraic identity with
    :func:`expected_agreement` can be asserted, exactly in rational mode.
    """
    qc = components if components is not None else q_components(params, exact=exact)
    c = params.c
    if exact:
        out = qc.q1 + Fraction(1, 2) * qc.q3
        for k in range(1, c + 1):
            out += zeta.evaluate_exact(k, c) * qc.q2_at(k)
        return out
    out = qc.q1 + 0.5 * qc.q3
    for k in range(1, c + 1):
        out += zeta.evaluate(k, c) * qc.q2_at(k)
    return out


def coverage_bound(params: FrameworkParams, cov: CoverageParams,
                   exact: bool = False) -> Number:
    """Upper bound on accuracy when only a beta-fraction of each pool is learnable.

    The bound replaces the avoided-set size c with the unlearnable
    residue floor((1 - beta) * t) per population:

    Acc <= p_d (1 - C(floor((1-b_d) t_d), n_d) / (2 C(t_d, n_d))) + (rare term)
    """
    p = params
    resid_d = int(math.floor((1 - Fraction(cov.beta_d)) * p.t_d))
    resid_r = int(math.floor((1 - Fraction(cov.beta_r)) * p.t_r))
    if exact:
        pd = Fraction(p.p_d)
        miss_d = Fraction(binom(resid_d, p.n_d), binom(p.t_d, p.n_d))
        miss_r = Fraction(binom(resid_r, p.n_r), binom(p.t_r, p.n_r))
        return pd * (1 - Fraction(1, 2) * miss_d) + (1 - pd) * (1 - Fraction(1, 2) * miss_r)
    miss_d = _avoid_ratio_float(p.t_d, p.t_d - resid_d, p.n_d)
    miss_r = _avoid_ratio_float(p.t_r, p.t_r - resid_r, p.n_r)
    return p.p_d * (1.0 - 0.5 * miss_d) + p.p_r * (1.0 - 0.5 * miss_r)


def zeta_eval(zeta: AgreementFn, k: int, c: int) -> float:
    """Module-level alias for :meth:`AgreementFn.evaluate`."""
    return zeta.evaluate(k, c)


def zeta_table(zeta: AgreementFn, c: int) -> "list[float]":
    """zeta(k, c) for k = 0..c, as consumed by the simulation kernels."""
    return [zeta.evaluate(k, c) for k in range(c + 1)]
