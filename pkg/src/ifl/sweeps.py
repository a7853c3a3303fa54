"""Parameter sweeps over the closed forms, with CSV output.

Grids are "start:stop:step" strings stepped in exact decimal rationals,
so inclusion of the stop value is never a float-rounding accident. Grid
points that violate a parameter invariant become skipped rows carrying
the reason instead of numbers. Each CSV gets a sidecar
``<name>.params.json`` with the fully resolved parameters per row.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path

from .closedform import coverage_bound, expected_accuracy, expected_agreement
from .errors import ValidationError
from .montecarlo import mc_coverage_accuracy
from .params import AgreementFn, CoverageParams, FrameworkParams

SWEEPABLE = ("p_d", "c", "t_d", "t_r", "n_d", "n_r")
COUPLABLE = {"n_r": "n_d", "t_r": "t_d"}


def parse_grid(spec: str) -> list[Fraction]:
    """Inclusive start:stop:step grid in exact decimal arithmetic."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValidationError(f"grid must be start:stop:step, got {spec!r}")
    try:
        start, stop, step = (Fraction(p) for p in parts)
    except (ValueError, ZeroDivisionError) as e:
        raise ValidationError(f"bad grid {spec!r}: {e}") from e
    if step <= 0:
        raise ValidationError(f"grid step must be positive, got {step}")
    if stop < start:
        raise ValidationError(f"grid stop {stop} below start {start}")
    values = []
    v = start
    while v <= stop:
        values.append(v)
        v += step
    return values


@dataclass(frozen=True)
class SweepSpec:
    base: FrameworkParams
    vary: str
    grid: list[Fraction]
    zeta: AgreementFn
    couple_alpha: float | None = None

    def __post_init__(self):
        if self.vary not in SWEEPABLE:
            raise ValidationError(
                f"vary must be one of {SWEEPABLE}, got {self.vary!r}"
            )
        if not self.grid:
            raise ValidationError("grid is empty")
        if self.couple_alpha is not None:
            if self.vary not in COUPLABLE:
                raise ValidationError(
                    f"coupling applies to {tuple(COUPLABLE)}, not {self.vary!r}"
                )
            if not self.couple_alpha > 0:
                raise ValidationError(
                    f"couple_alpha must be positive, got {self.couple_alpha}"
                )


@dataclass(frozen=True)
class SweepRow:
    param_value: Fraction
    acc: float | None = None
    agr: float | None = None
    diff: float | None = None
    skipped: bool = False
    reason: str = ""
    params: FrameworkParams | None = None
    eta: float | None = None


def _int_value(name: str, value: Fraction) -> int:
    if value.denominator != 1:
        raise ValidationError(f"{name} must be an integer, got {value}")
    return int(value)


def _resolve_point(spec: SweepSpec, value: Fraction) -> FrameworkParams:
    updates = {}
    if spec.vary == "p_d":
        updates["p_d"] = float(value)
    else:
        updates[spec.vary] = _int_value(spec.vary, value)
    if spec.couple_alpha is not None:
        coupled = COUPLABLE[spec.vary]
        coupled_value = int(math.floor(Fraction(spec.couple_alpha) * value))
        updates[coupled] = coupled_value
    return spec.base.replace(**updates)


def _evaluate(spec: SweepSpec, value: Fraction, eta: float | None = None) -> SweepRow:
    try:
        params = _resolve_point(spec, value)
    except ValidationError as e:
        return SweepRow(param_value=value, skipped=True, reason=str(e), eta=eta)
    acc = float(expected_accuracy(params))
    agr = float(expected_agreement(params, spec.zeta))
    return SweepRow(param_value=value, acc=acc, agr=agr, diff=acc - agr,
                    params=params, eta=eta)


def sweep_single(spec: SweepSpec) -> list[SweepRow]:
    """One row per grid point; the varied parameter is set, others fixed."""
    if spec.couple_alpha is not None:
        raise ValidationError("use sweep_coupled for coupled sweeps")
    return [_evaluate(spec, v) for v in spec.grid]


def sweep_coupled(spec: SweepSpec) -> list[SweepRow]:
    """Sweep n_r or t_r with the dominant counterpart tied to floor(alpha * value)."""
    if spec.couple_alpha is None:
        raise ValidationError("sweep_coupled needs couple_alpha")
    return [_evaluate(spec, v) for v in spec.grid]


ETA_DOMAINS = {
    "constant": (Fraction(1, 2), Fraction(1)),
    "proportional": (Fraction(0), None),
    "step": (Fraction(0), None),
}


def sweep_zeta(base: FrameworkParams, family: str, eta_grid: list[Fraction],
               theta: float | None, vary: str, grid: list[Fraction],
               couple_alpha: float | None = None) -> list[SweepRow]:
    """Accuracy/agreement difference surface over (eta, varied parameter)."""
    if family not in ETA_DOMAINS:
        raise ValidationError(f"unknown agreement family {family!r}")
    lo, hi = ETA_DOMAINS[family]
    rows = []
    for eta in eta_grid:
        if eta < lo or (family == "proportional" and eta <= 0):
            raise ValidationError(f"eta {eta} outside {family} domain")
        if hi is not None and eta > hi:
            raise ValidationError(f"eta {eta} outside {family} domain")
        zeta = (AgreementFn("step", float(eta), 0.8 if theta is None else theta)
                if family == "step" else AgreementFn(family, float(eta)))
        spec = SweepSpec(base=base, vary=vary, grid=grid, zeta=zeta,
                         couple_alpha=couple_alpha)
        for v in grid:
            rows.append(_evaluate(spec, v, eta=float(eta)))
    return rows


@dataclass(frozen=True)
class CoverageRow:
    beta: Fraction
    bound: float
    mc_mean: float | None = None
    mc_stderr: float | None = None


def sweep_coverage(base: FrameworkParams, beta_grid: list[Fraction],
                   mc_samples: int | None = None, seed: int = 0) -> list[CoverageRow]:
    """Coverage bound per beta (beta_d = beta_r), optionally with an MC column."""
    rows = []
    for beta in beta_grid:
        if beta < 0 or beta > 1:
            raise ValidationError(f"beta must be in [0, 1], got {beta}")
        cov = CoverageParams(beta_d=beta, beta_r=beta)
        bound = float(coverage_bound(base, cov))
        if mc_samples:
            est = mc_coverage_accuracy(base, cov, mc_samples, seed)
            rows.append(CoverageRow(beta=beta, bound=bound,
                                    mc_mean=est.mean, mc_stderr=est.stderr))
        else:
            rows.append(CoverageRow(beta=beta, bound=bound))
    return rows


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, Fraction):
        return f"{float(x):.12g}"
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def write_csv(rows, path):
    """Deterministic CSV in grid order; 12 significant digits."""
    path = Path(path)
    has_eta = any(getattr(r, "eta", None) is not None for r in rows)
    if rows and isinstance(rows[0], CoverageRow):
        header = "beta,bound,mc_mean,mc_stderr"
        lines = [header]
        for r in rows:
            lines.append(",".join(
                [_fmt(r.beta), _fmt(r.bound), _fmt(r.mc_mean), _fmt(r.mc_stderr)]))
    else:
        header = ("eta,param,acc,agr,diff,skipped,reason" if has_eta
                  else "param,acc,agr,diff,skipped,reason")
        lines = [header]
        for r in rows:
            cells = [] if not has_eta else [_fmt(r.eta)]
            cells += [_fmt(r.param_value), _fmt(r.acc), _fmt(r.agr), _fmt(r.diff),
                      "true" if r.skipped else "false", r.reason.replace(",", ";")]
            lines.append(",".join(cells))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_sidecar(rows, csv_path):
    """<name>.params.json: resolved parameters per row, for audit."""
    csv_path = Path(csv_path)
    sidecar = csv_path.with_suffix(".params.json")
    entries = []
    for r in rows:
        if isinstance(r, CoverageRow):
            entries.append({"beta": str(r.beta), "bound": r.bound})
            continue
        e = {"param_value": str(r.param_value), "skipped": r.skipped}
        if r.eta is not None:
            e["eta"] = r.eta
        if r.skipped:
            e["reason"] = r.reason
        if r.params is not None:
            e["params"] = r.params.to_dict()
        entries.append(e)
    sidecar.write_text(json.dumps(entries, indent=2, sort_keys=True) + "\n")
    return sidecar
