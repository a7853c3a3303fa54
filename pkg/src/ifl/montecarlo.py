"""Monte-Carlo estimators over the generative process.

All estimators are deterministic functions of (params, n_samples, seed)
regardless of backend lane, thread count, or batch size: kernels return
exact integer case counts and the mean/stderr arithmetic happens here.

The agreement estimator defaults to Rao-Blackwellized contributions
(each sampled triple contributes its exact conditional agreement
probability: 1, zeta(k, c), or 1/2). ``mode="bernoulli"`` instead flips
one coin per triple at that probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .closedform import zeta_table
from .errors import ValidationError
from .params import AgreementFn, CoverageParams, FrameworkParams
from .rng import MASK64


@dataclass(frozen=True)
class EstimateResult:
    mean: float
    stderr: float
    n_samples: int
    seed: int

    def to_dict(self) -> dict:
        return {"mean": self.mean, "stderr": self.stderr,
                "n": self.n_samples, "seed": self.seed}


def _finish(sum_x: float, sum_x2: float, n: int, seed: int) -> EstimateResult:
    mean = sum_x / n
    if n > 1:
        var = max(sum_x2 - n * mean * mean, 0.0) / (n - 1)
    else:
        var = 0.0
    return EstimateResult(mean=mean, stderr=math.sqrt(var / n),
                          n_samples=n, seed=seed)


def _check_n(n_samples: int):
    if n_samples < 1:
        raise ValidationError(f"n_samples must be >= 1, got {n_samples}")


def mc_accuracy(params: FrameworkParams, n_samples: int, seed: int) -> EstimateResult:
    """Mean correctness probability over i.i.d. (hypothesis, datum) draws."""
    _check_n(n_samples)
    p = params
    hits = int(backend.kernels().accuracy_counts(
        np.uint64(seed & MASK64), n_samples, p.p_d,
        p.t_d, p.t_r, p.n_d, p.n_r, p.c_d, p.c_r,
        p.t_d, p.t_r, p.c_d, p.c_r))
    misses = n_samples - hits
    return _finish(hits + 0.5 * misses, hits + 0.25 * misses, n_samples, seed)


def mc_coverage_accuracy(params: FrameworkParams, cov: CoverageParams,
                         n_samples: int, seed: int) -> EstimateResult:
    """Accuracy when hypotheses can only learn from a beta-fraction of each pool.

    Models draw from restricted pools of floor(beta * t) features per
    population; capacity beyond the pool is spent on noise and never
    matches a datum. With beta = 1 the draws coincide with
    :func:`mc_accuracy` bit for bit.
    """
    _check_n(n_samples)
    p = params
    pool_d, pool_r = cov.pools(p.t_d, p.t_r)
    hits = int(backend.kernels().accuracy_counts(
        np.uint64(seed & MASK64), n_samples, p.p_d,
        p.t_d, p.t_r, p.n_d, p.n_r, p.c_d, p.c_r,
        pool_d, pool_r, min(p.c_d, pool_d), min(p.c_r, pool_r)))
    misses = n_samples - hits
    return _finish(hits + 0.5 * misses, hits + 0.25 * misses, n_samples, seed)


def mc_agreement(params: FrameworkParams, zeta: AgreementFn, n_samples: int,
                 seed: int, mode: str = "rao") -> EstimateResult:
    """Mean agreement probability over i.i.d. (f, g, datum) draws."""
    _check_n(n_samples)
    if mode not in ("rao", "bernoulli"):
        raise ValidationError(f"mode must be 'rao' or 'bernoulli', got {mode!r}")
    p = params
    ztab = np.array(zeta_table(zeta, p.c) if p.c >= 1 else [0.5], dtype=np.float64)
    counts = backend.kernels().agreement_counts(
        np.uint64(seed & MASK64), n_samples, p.p_d,
        p.t_d, p.t_r, p.n_d, p.n_r, p.c_d, p.c_r,
        ztab, mode == "bernoulli")
    counts = [int(v) for v in counts]
    if mode == "bernoulli":
        agree = counts[0]
        return _finish(float(agree), float(agree), n_samples, seed)
    sum_x = counts[0] + 0.5 * counts[1]
    sum_x2 = counts[0] + 0.25 * counts[1]
    c_half = p.c_d + p.c_r
    for k in range(1, c_half + 1):
        z = ztab[k] if k < len(ztab) else 0.5
        sum_x += counts[2 + k] * z
        sum_x2 += counts[2 + k] * z * z
    return _finish(sum_x, sum_x2, n_samples, seed)
