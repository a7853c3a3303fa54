"""Parameter objects of the two-population feature-learning model.

The model has six free parameters: the dominant-data proportion ``p_d``,
the model capacity ``c`` (split evenly across the two classes), the
per-class feature pool sizes ``t_d`` and ``t_r``, and the per-datum
feature counts ``n_d`` and ``n_r``. Capacities ``c_d``/``c_r`` per class
are derived from ``p_d`` and ``c``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ValidationError


def derived_capacities(p_d: float, c: int) -> tuple[int, int]:
    """Per-class (dominant, rare) capacities from ``p_d`` and even ``c``.

    ``c_d`` is ``p_d * c / 2`` rounded half-up; the remainder of the
    per-class budget ``c / 2`` goes to ``c_r``. Rounding is done on the
    exact binary value of ``p_d`` so both arithmetic modes agree.
    """
    if c < 0:
        raise ValidationError(f"c must be nonnegative, got {c}")
    if c % 2 != 0:
        raise ValidationError("c must be even")
    c_d = int(math.floor(Fraction(p_d) * c / 2 + Fraction(1, 2)))
    c_r = c // 2 - c_d
    return c_d, c_r


@dataclass(frozen=True)
class FrameworkParams:
    """The six free parameters plus derived per-class capacities."""

    p_d: float
    c: int
    t_d: int
    t_r: int
    n_d: int
    n_r: int

    def __post_init__(self):
        if not (0.0 <= self.p_d <= 1.0):
            raise ValidationError(f"p_d must be in [0, 1], got {self.p_d}")
        for name in ("c", "t_d", "t_r", "n_d", "n_r"):
            v = getattr(self, name)
            if not isinstance(v, int):
                raise ValidationError(f"{name} must be an integer, got {v!r}")
        if self.t_d < 1 or self.t_r < 1:
            raise ValidationError("t_d and t_r must be positive")
        if not (1 <= self.n_d <= self.t_d):
            raise ValidationError(
                f"need 1 <= n_d <= t_d, got n_d={self.n_d}, t_d={self.t_d}"
            )
        if not (1 <= self.n_r <= self.t_r):
            raise ValidationError(
                f"need 1 <= n_r <= t_r, got n_r={self.n_r}, t_r={self.t_r}"
            )
        c_d, c_r = derived_capacities(self.p_d, self.c)
        if c_d > self.t_d:
            raise ValidationError(
                f"derived c_d={c_d} exceeds dominant pool t_d={self.t_d}"
            )
        if c_r > self.t_r:
            raise ValidationError(
                f"derived c_r={c_r} exceeds rare pool t_r={self.t_r}"
            )
        object.__setattr__(self, "_c_d", c_d)
        object.__setattr__(self, "_c_r", c_r)

    @property
    def p_r(self) -> float:
        return 1.0 - self.p_d

    @property
    def c_d(self) -> int:
        return self._c_d

    @property
    def c_r(self) -> int:
        return self._c_r

    def replace(self, **kwargs) -> "FrameworkParams":
        fields = dict(p_d=self.p_d, c=self.c, t_d=self.t_d, t_r=self.t_r,
                      n_d=self.n_d, n_r=self.n_r)
        fields.update(kwargs)
        return FrameworkParams(**fields)

    def to_dict(self) -> dict:
        return {"p_d": self.p_d, "c": self.c, "t_d": self.t_d,
                "t_r": self.t_r, "n_d": self.n_d, "n_r": self.n_r}

    @classmethod
    def from_dict(cls, d: dict) -> "FrameworkParams":
        required = ("p_d", "c", "t_d", "t_r", "n_d", "n_r")
        missing = [k for k in required if k not in d]
        if missing:
            raise ValidationError(f"missing parameter field(s): {', '.join(missing)}")
        unknown = [k for k in d if k not in required]
        if unknown:
            raise ValidationError(f"unknown parameter field(s): {', '.join(unknown)}")
        vals = {}
        for k in required:
            v = d[k]
            if k == "p_d":
                if not isinstance(v, (int, float)) or isinstance(v, bool):
                    raise ValidationError(f"field p_d must be a number, got {v!r}")
                vals[k] = float(v)
            else:
                if not isinstance(v, int) or isinstance(v, bool):
                    raise ValidationError(f"field {k} must be an integer, got {v!r}")
                vals[k] = v
        return cls(**vals)

    @classmethod
    def from_json(cls, text: str) -> "FrameworkParams":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as e:
            raise ValidationError(f"malformed parameter JSON: {e}") from e
        if not isinstance(d, dict):
            raise ValidationError("parameter JSON must be a flat object")
        return cls.from_dict(d)


#: Baseline parameter set used throughout simulations and sweeps.
DEFAULT_PARAMS = FrameworkParams(p_d=0.7, c=20, t_d=20, t_r=180, n_d=5, n_r=10)


ZETA_FAMILIES = ("constant", "proportional", "step")


@dataclass(frozen=True)
class AgreementFn:
    """Probability that two models agree given ``k`` shared features.

    Families:
      constant      -> eta                            (eta in [0.5, 1])
      proportional  -> min(eta * k / c, 1)            (eta > 0)
      step          -> theta if k <= eta else 1       (eta integer >= 0,
                                                       theta in [0.5, 1])
    """

    family: str
    eta: float
    theta: float | None = None

    def __post_init__(self):
        if self.family not in ZETA_FAMILIES:
            raise ValidationError(
                f"unknown agreement family {self.family!r}; "
                f"expected one of {ZETA_FAMILIES}"
            )
        if self.family == "constant":
            if not (0.5 <= self.eta <= 1.0):
                raise ValidationError(
                    f"constant family needs eta in [0.5, 1], got {self.eta}"
                )
            if self.theta is not None:
                raise ValidationError("constant family takes no theta")
        elif self.family == "proportional":
            if not self.eta > 0:
                raise ValidationError(
                    f"proportional family needs eta > 0, got {self.eta}"
                )
            if self.theta is not None:
                raise ValidationError("proportional family takes no theta")
        else:
            if self.eta < 0 or self.eta != int(self.eta):
                raise ValidationError(
                    f"step family needs a nonnegative integer eta, got {self.eta}"
                )
            if self.theta is None or not (0.5 <= self.theta <= 1.0):
                raise ValidationError(
                    f"step family needs theta in [0.5, 1], got {self.theta}"
                )

    def evaluate(self, k: int, c: int) -> float:
        """Agreement probability for ``k`` shared features at capacity ``c``."""
        if k < 0:
            raise ValidationError(f"k must be nonnegative, got {k}")
        if c < 1:
            raise ValidationError(f"c must be >= 1, got {c}")
        if self.family == "constant":
            return self.eta
        if self.family == "proportional":
            return min(self.eta * k / c, 1.0)
        return self.theta if k <= self.eta else 1.0

    def evaluate_exact(self, k: int, c: int) -> Fraction:
        """Same as :meth:`evaluate` in exact rational arithmetic."""
        if k < 0:
            raise ValidationError(f"k must be nonnegative, got {k}")
        if c < 1:
            raise ValidationError(f"c must be >= 1, got {c}")
        if self.family == "constant":
            return Fraction(self.eta)
        if self.family == "proportional":
            return min(Fraction(self.eta) * k / c, Fraction(1))
        return Fraction(self.theta) if k <= self.eta else Fraction(1)

    def spec_string(self) -> str:
        if self.family == "step":
            return f"step:{int(self.eta)}:{self.theta:g}"
        return f"{self.family}:{self.eta:g}"


def parse_zeta(text: str) -> AgreementFn:
    """Parse "constant:0.9", "proportional:2.0" or "step:2:0.8"."""
    parts = text.strip().split(":")
    family = parts[0]
    try:
        if family == "step":
            if len(parts) != 3:
                raise ValidationError(f"step spec needs eta and theta: {text!r}")
            return AgreementFn("step", float(parts[1]), float(parts[2]))
        if len(parts) != 2:
            raise ValidationError(f"agreement spec needs one parameter: {text!r}")
        return AgreementFn(family, float(parts[1]))
    except ValueError as e:
        raise ValidationError(f"bad agreement spec {text!r}: {e}") from e


@dataclass(frozen=True)
class CoverageParams:
    """Fractions of each feature pool present in the training data."""

    beta_d: float | Fraction
    beta_r: float | Fraction

    def __post_init__(self):
        for name in ("beta_d", "beta_r"):
            v = getattr(self, name)
            if not (0 <= v <= 1):
                raise ValidationError(f"{name} must be in [0, 1], got {v}")

    def pools(self, t_d: int, t_r: int) -> tuple[int, int]:
        """Learnable pool sizes floor(beta * t) per population."""
        pool_d = int(math.floor(Fraction(self.beta_d) * t_d))
        pool_r = int(math.floor(Fraction(self.beta_r) * t_r))
        return pool_d, pool_r
