"""Brute-force oracles for the closed forms, in exact rational arithmetic.

These deliberately share no combinatorial code with
:mod:`ifl.closedform`: feature sets are enumerated as bitmasks and the
prediction/agreement rules are applied literally, so the two paths can
certify each other.

By exchangeability of the pools, the datum is fixed to one canonical
feature set per kind (the first n indices) and only hypothesis
configurations are enumerated; kinds are weighted by p_d / p_r. The two
class labels are symmetric, so class 0 stands in for both.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from .errors import EnumerationSizeError
from .closedform import binom
from .params import AgreementFn, FrameworkParams

SIZE_LIMIT = 10_000_000


def _masks(t: int, c: int) -> list[int]:
    return [sum(1 << i for i in combo) for combo in combinations(range(t), c)]


def accuracy_enum_size(params: FrameworkParams) -> int:
    p = params
    return (binom(p.t_d, p.c_d) * binom(p.t_r, p.c_r)
            * (binom(p.t_d, p.n_d) + binom(p.t_r, p.n_r)))


def agreement_enum_size(params: FrameworkParams) -> int:
    p = params
    hyp = binom(p.t_d, p.c_d) * binom(p.t_r, p.c_r)
    return hyp * hyp * (binom(p.t_d, p.n_d) + binom(p.t_r, p.n_r))


def enum_accuracy(params: FrameworkParams) -> Fraction:
    """Exact expected accuracy by enumerating all hypothesis configurations."""
    size = accuracy_enum_size(params)
    if size > SIZE_LIMIT:
        raise EnumerationSizeError(size, SIZE_LIMIT)
    p = params
    pd = Fraction(p.p_d)
    dom_masks = _masks(p.t_d, p.c_d)
    rare_masks = _masks(p.t_r, p.c_r)
    parts = []
    for kind_is_dom in (True, False):
        datum = (1 << (p.n_d if kind_is_dom else p.n_r)) - 1
        hits = 0
        total = 0
        for fd in dom_masks:
            for fr in rare_masks:
                overlap = (fd & datum) if kind_is_dom else (fr & datum)
                if overlap:
                    hits += 1
                total += 1
        # correct with prob 1 on overlap, 1/2 otherwise
        parts.append(Fraction(2 * hits + (total - hits), 2 * total))
    return pd * parts[0] + (1 - pd) * parts[1]


def enum_agreement(params: FrameworkParams, zeta: AgreementFn) -> Fraction:
    """Exact expected agreement by enumerating all hypothesis pairs."""
    size = agreement_enum_size(params)
    if size > SIZE_LIMIT:
        raise EnumerationSizeError(size, SIZE_LIMIT)
    p = params
    pd = Fraction(p.p_d)
    dom_masks = _masks(p.t_d, p.c_d)
    rare_masks = _masks(p.t_r, p.c_r)
    hyps = [(fd, fr) for fd in dom_masks for fr in rare_masks]
    c_half = p.c_d + p.c_r
    parts = []
    for kind_is_dom in (True, False):
        datum = ((1 << p.n_d) - 1) if kind_is_dom else ((1 << p.n_r) - 1)
        count_a = 0
        count_c = 0
        count_b = [0] * (c_half + 1)
        for fd, fr in hyps:
            f_hit = bool((fd if kind_is_dom else fr) & datum)
            for gd, gr in hyps:
                g_hit = bool((gd if kind_is_dom else gr) & datum)
                if f_hit and g_hit:
                    count_a += 1
                elif not f_hit and not g_hit:
                    k = (fd & gd).bit_count() + (fr & gr).bit_count()
                    if k >= 1:
                        count_b[k] += 1
                    else:
                        count_c += 1
                else:
                    count_c += 1
        total = len(hyps) ** 2
        acc = Fraction(count_a) + Fraction(count_c, 2)
        for k in range(1, c_half + 1):
            if count_b[k]:
                acc += zeta.evaluate_exact(k, p.c) * count_b[k]
        parts.append(acc / total)
    return pd * parts[0] + (1 - pd) * parts[1]
