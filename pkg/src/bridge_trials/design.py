"""Sample-size planning for trials that reuse concordant legacy records.

Computes the conventional enrollment requirement from the stratified
two-proportion formula, then the reduced requirement once concordant
records from a completed legacy trial are credited against the new
trial's concordant-stratum needs, arm by arm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

from .errors import ValidationError
from .numeric import RoundingPolicy, check_probability, normal_quantile, _snap_integer

__all__ = [
    "StrataRates",
    "LegacyTrial",
    "DesignSpec",
    "DesignResult",
    "implied_effect",
    "required_sample_size",
    "data_reuse_plan",
    "simplified_reuse_size",
    "design_report",
]


@dataclass(frozen=True)
class StrataRates:
    """Event rates under treatment/control in the concordant (C) and
    discordant (D) strata."""

    p_c1: float
    p_c0: float
    p_d1: float
    p_d0: float

    def __post_init__(self):
        for name in ("p_c1", "p_c0", "p_d1", "p_d0"):
            check_probability(getattr(self, name), name)


@dataclass(frozen=True)
class LegacyTrial:
    """The completed trial whose concordant records may be reused.

    ``n1`` may be real-valued; it only ever enters products, and exact
    algebraic cross-checks against the closed-form reuse formula need it
    unrounded.  ``completion`` scales how much of the trial's data exists.
    """

    n1: float
    k1: float
    completion: float = 1.0

    def __post_init__(self):
        if not self.n1 >= 0:
            raise ValidationError(f"n1 must be >= 0, got {self.n1!r}", field="n1")
        if not self.k1 > 0:
            raise ValidationError(f"k1 must be > 0, got {self.k1!r}", field="k1")
        check_probability(self.completion, "completion")


@dataclass(frozen=True)
class DesignSpec:
    """All inputs of the sample-size calculation.

    ``alpha`` is one-sided.  ``direction`` states which sign of the
    treated-minus-control rate difference is beneficial ("increase" or
    "decrease"); the engine normalizes so the tested effect is positive.
    ``delta_effect`` optionally bypasses the rates-implied effect, and
    ``z_alpha``/``z_beta`` pin the critical values explicitly (the
    published breast-cancer numbers use the conventional z_alpha = 1.96
    rather than the exact 0.975 quantile).
    """

    alpha: float
    power: float
    delta_margin: float
    cr12: float
    cr21: float
    rates: StrataRates
    k2: float
    legacy: Optional[LegacyTrial] = None
    unit_cost: Optional[float] = None
    rounding: RoundingPolicy = RoundingPolicy.CEIL_PER_ARM
    direction: str = "increase"
    delta_effect: Optional[float] = None
    z_alpha: Optional[float] = None
    z_beta: Optional[float] = None

    def __post_init__(self):
        check_probability(self.alpha, "alpha")
        check_probability(self.power, "power")
        if not 0.0 < self.alpha < 1.0:
            raise ValidationError(f"alpha must lie in (0, 1), got {self.alpha!r}", field="alpha")
        if not 0.0 < self.power < 1.0:
            raise ValidationError(f"power must lie in (0, 1), got {self.power!r}", field="power")
        check_probability(self.cr12, "cr12")
        check_probability(self.cr21, "cr21")
        if not self.k2 > 0:
            raise ValidationError(f"k2 must be > 0, got {self.k2!r}", field="k2")
        if self.unit_cost is not None and not self.unit_cost >= 0:
            raise ValidationError(f"unit_cost must be >= 0, got {self.unit_cost!r}",
                                  field="unit_cost")
        if self.direction not in ("increase", "decrease"):
            raise ValidationError(
                f"direction must be 'increase' or 'decrease', got {self.direction!r}",
                field="direction")
        if not isinstance(self.rounding, RoundingPolicy):
            object.__setattr__(self, "rounding", RoundingPolicy(self.rounding))

    def without_legacy(self) -> "DesignSpec":
        return replace(self, legacy=None)


@dataclass
class DesignResult:
    """Sample sizes, the per-arm reuse ledger, and cost savings.

    ``n2_prime_real`` is the pre-rounding reuse requirement from the
    closed-form expression; ``n2_prime`` is the integer recruit total.
    """

    delta_effect: float
    n2_real: float
    n2: int
    arm_treat: int
    arm_control: int
    n_c: int
    n_d: int
    reuse_treat: int
    reuse_control: int
    recruit_treat: int
    recruit_control: int
    n2_prime: int
    n2_prime_real: float
    savings: Optional[float] = None

    @property
    def reuse_total(self) -> int:
        return self.reuse_treat + self.reuse_control

    @property
    def cells(self) -> dict[str, int]:
        """Planned (stratum, arm) enrollment targets."""
        return {
            "c_treat": self._c_treat, "c_control": self._c_control,
            "d_treat": self.arm_treat - self._c_treat,
            "d_control": self.arm_control - self._c_control,
        }

    # Concordant-stratum targets are stored so reuse bookkeeping and the
    # simulator can split arms without re-deriving rounding.
    _c_treat: int = 0
    _c_control: int = 0


def implied_effect(rates: StrataRates, cr12: float) -> float:
    """Concordance-weighted mix of the two stratum effects."""
    check_probability(cr12, "cr12")
    return cr12 * (rates.p_c1 - rates.p_c0) + (1.0 - cr12) * (rates.p_d1 - rates.p_d0)


def _benefit_effect(spec: DesignSpec) -> float:
    raw = spec.delta_effect if spec.delta_effect is not None else implied_effect(spec.rates, spec.cr12)
    return raw if spec.direction == "increase" else -raw


def _critical_values(spec: DesignSpec) -> tuple[float, float]:
    z_a = spec.z_alpha if spec.z_alpha is not None else normal_quantile(1.0 - spec.alpha)
    z_b = spec.z_beta if spec.z_beta is not None else normal_quantile(spec.power)
    return z_a, z_b


def _arm_variance(p1: float, p0: float, k: float) -> float:
    return p1 * (1.0 - p1) / k + p0 * (1.0 - p0)


def required_sample_size(spec: DesignSpec) -> DesignResult:
    """Conventional (no-reuse) enrollment requirement.

    The real-valued total solves the one-sided two-proportion power
    equation with stratum variances mixed by cr12; integer arms apply the
    spec's rounding policy per arm, and stratum targets apply it per
    (stratum, arm) cell.
    """
    effect = _benefit_effect(spec)
    margin = spec.delta_margin
    if effect == margin:
        raise ValidationError("effect equals margin: infinite sample size")
    if effect < margin:
        raise ValidationError(
            f"effect {effect:.6g} is on the wrong side of the margin {margin:.6g} "
            "for a one-sided superiority test")
    z_a, z_b = _critical_values(spec)
    k = spec.k2
    v_c = _arm_variance(spec.rates.p_c1, spec.rates.p_c0, k)
    v_d = _arm_variance(spec.rates.p_d1, spec.rates.p_d0, k)
    mixed = spec.cr12 * v_c + (1.0 - spec.cr12) * v_d
    if mixed <= 0.0:
        raise ValidationError("all outcome variances are zero; no sample size is defined")
    n2_real = (k + 1.0) * (z_a + z_b) ** 2 / (effect - margin) ** 2 * mixed

    w_t = k / (k + 1.0)
    w_c = 1.0 / (k + 1.0)
    rnd = spec.rounding.round
    arm_treat = rnd(n2_real * w_t)
    arm_control = rnd(n2_real * w_c)
    c_treat = rnd(n2_real * spec.cr12 * w_t)
    c_control = rnd(n2_real * spec.cr12 * w_c)
    d_treat = rnd(n2_real * (1.0 - spec.cr12) * w_t)
    d_control = rnd(n2_real * (1.0 - spec.cr12) * w_c)
    n2 = arm_treat + arm_control

    return DesignResult(
        delta_effect=effect,
        n2_real=n2_real,
        n2=n2,
        arm_treat=arm_treat,
        arm_control=arm_control,
        n_c=c_treat + c_control,
        n_d=d_treat + d_control,
        reuse_treat=0,
        reuse_control=0,
        recruit_treat=arm_treat,
        recruit_control=arm_control,
        n2_prime=n2,
        n2_prime_real=n2_real,
        savings=(0.0 if spec.unit_cost is not None else None),
        _c_treat=c_treat,
        _c_control=c_control,
    )


def data_reuse_plan(spec: DesignSpec) -> DesignResult:
    """Enrollment plan crediting reusable concordant legacy records.

    Availability is the legacy trial's concordant count per arm (rounded
    per policy), floored after scaling by the completion fraction: a
    partially complete trial cannot contribute fractional patients.
    Recruitment per arm is the arm requirement minus reused records.
    """
    if spec.legacy is None:
        raise ValidationError("data_reuse_plan requires a legacy trial in the spec",
                              field="legacy")
    base = required_sample_size(spec)
    leg = spec.legacy
    rnd = spec.rounding.round

    w1_t = leg.k1 / (leg.k1 + 1.0)
    w1_c = 1.0 / (leg.k1 + 1.0)
    avail_full_t = rnd(leg.n1 * spec.cr21 * w1_t)
    avail_full_c = rnd(leg.n1 * spec.cr21 * w1_c)
    avail_t = math.floor(_snap_integer(leg.completion * avail_full_t))
    avail_c = math.floor(_snap_integer(leg.completion * avail_full_c))

    reuse_t = min(base._c_treat, avail_t)
    reuse_c = min(base._c_control, avail_c)
    recruit_t = base.arm_treat - reuse_t
    recruit_c = base.arm_control - reuse_c

    w2_t = spec.k2 / (spec.k2 + 1.0)
    w2_c = 1.0 / (spec.k2 + 1.0)
    supply_t = leg.completion * leg.n1 * spec.cr21 * w1_t
    supply_c = leg.completion * leg.n1 * spec.cr21 * w1_c
    n2_prime_real = (base.n2_real * (1.0 - spec.cr12)
                     + max(0.0, base.n2_real * spec.cr12 * w2_t - supply_t)
                     + max(0.0, base.n2_real * spec.cr12 * w2_c - supply_c))

    result = replace(
        base,
        reuse_treat=reuse_t,
        reuse_control=reuse_c,
        recruit_treat=recruit_t,
        recruit_control=recruit_c,
        n2_prime=recruit_t + recruit_c,
        n2_prime_real=n2_prime_real,
        savings=(spec.unit_cost * reuse_t if spec.unit_cost is not None else None),
    )
    return result


def simplified_reuse_size(n2: float, cr12: float, cr21: float) -> float:
    """Reuse requirement under matched trial sizes and allocation ratios.

    Valid when the legacy and new trials share size and ratio and the
    legacy trial is fully complete; equals the general plan's pre-rounding
    requirement in that regime.
    """
    check_probability(cr12, "cr12")
    check_probability(cr21, "cr21")
    if not n2 >= 0:
        raise ValidationError(f"n2 must be >= 0, got {n2!r}", field="n2")
    return n2 * ((1.0 - cr12) + max(0.0, cr12 - cr21))


def design_report(spec: DesignSpec, include_reuse: bool = True) -> DesignResult:
    """Full plan: reuse ledger when a legacy trial is present, else conventional."""
    if include_reuse and spec.legacy is not None:
        return data_reuse_plan(spec)
    return required_sample_size(spec)
