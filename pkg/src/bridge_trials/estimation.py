"""Stratified causal-effect estimation and the one-sided margin test.

The point estimate weights the concordant- and discordant-stratum
difference-in-means by the design-stage concordance rate, which is
treated as a known constant throughout (its sampling uncertainty is
deliberately excluded from the variance).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .concordance import HighRiskLabeling
from .errors import ValidationError
from .numeric import check_probability, normal_cdf, normal_quantile

__all__ = [
    "StratumArmData",
    "TrialRecord",
    "DeltaEstimate",
    "estimate_delta",
    "superiority_test",
    "pool_reused_and_new",
]

STRATA = ("C", "D")


@dataclass(frozen=True)
class StratumArmData:
    """Sample size and event count for one (stratum, arm) cell."""

    stratum: str
    arm: int
    n: int
    events: int

    def __post_init__(self):
        if self.stratum not in STRATA:
            raise ValidationError(f"stratum must be one of {STRATA}, got {self.stratum!r}")
        if self.arm not in (0, 1):
            raise ValidationError(f"arm must be 0 or 1, got {self.arm!r}")
        if self.n < 0 or not 0 <= self.events <= max(self.n, 0):
            raise ValidationError(
                f"need 0 <= events <= n, got events={self.events}, n={self.n}")

    @property
    def rate(self) -> float:
        return self.events / self.n


@dataclass
class TrialRecord:
    """One analyzed participant row (reused or newly recruited)."""

    unit_id: str
    arm: int
    outcome: int
    source: str = "new"           # "legacy" or "new"
    stratum: Optional[str] = None  # "C"/"D", may be derived from labelings


@dataclass
class DeltaEstimate:
    """Point estimate, analytic variance, and the margin test."""

    delta_hat: float
    variance: float
    z_stat: float
    p_value: float
    ci: tuple[float, float]
    alpha: float
    delta_margin: float
    cr12_used: float

    @property
    def rejected(self) -> bool:
        return self.p_value < self.alpha


def _index_cells(data: Iterable[StratumArmData]) -> dict[tuple[str, int], StratumArmData]:
    cells: dict[tuple[str, int], StratumArmData] = {}
    for cell in data:
        key = (cell.stratum, cell.arm)
        if key in cells:
            raise ValidationError(f"duplicate cell for stratum {key[0]}, arm {key[1]}")
        cells[key] = cell
    return cells


def estimate_delta(data: Iterable[StratumArmData], cr12: float) -> tuple[float, float]:
    """Concordance-weighted difference in proportions with its variance.

    Cells whose stratum weight is zero (cr12 of 0 or 1) may be absent;
    every cell that carries weight must be present with n > 0.
    """
    check_probability(cr12, "cr12")
    cells = _index_cells(data)
    weights = {"C": cr12, "D": 1.0 - cr12}
    delta_hat = 0.0
    variance = 0.0
    for stratum, w in weights.items():
        if w == 0.0:
            continue
        diffs = []
        var_sum = 0.0
        for arm in (1, 0):
            cell = cells.get((stratum, arm))
            if cell is None or cell.n == 0:
                arm_name = "treatment" if arm == 1 else "control"
                raise ValidationError(f"stratum {stratum} {arm_name} cell is empty")
            p = cell.rate
            if p in (0.0, 1.0):
                warnings.warn(
                    f"stratum {stratum}, arm {arm}: all-or-none events "
                    f"({cell.events}/{cell.n}); its variance contribution is zero",
                    UserWarning, stacklevel=2)
            diffs.append(p)
            var_sum += p * (1.0 - p) / cell.n
        delta_hat += w * (diffs[0] - diffs[1])
        variance += w * w * var_sum
    return delta_hat, variance


def superiority_test(delta_hat: float, variance: float, delta_margin: float,
                     alpha: float, cr12_used: float) -> DeltaEstimate:
    """One-sided test of H0: effect <= margin, with a two-sided (1-2*alpha) CI."""
    check_probability(alpha, "alpha")
    if not 0.0 < alpha < 0.5:
        raise ValidationError(f"alpha must lie in (0, 0.5), got {alpha!r}", field="alpha")
    if not variance > 0.0:
        raise ValidationError("variance must be positive; the data are degenerate")
    se = math.sqrt(variance)
    z = (delta_hat - delta_margin) / se
    p = normal_cdf(-z)
    half_width = normal_quantile(1.0 - alpha) * se
    return DeltaEstimate(
        delta_hat=delta_hat,
        variance=variance,
        z_stat=z,
        p_value=p,
        ci=(delta_hat - half_width, delta_hat + half_width),
        alpha=alpha,
        delta_margin=delta_margin,
        cr12_used=cr12_used,
    )


def _resolve_stratum(rec: TrialRecord, legacy_labeling: Optional[HighRiskLabeling],
                     new_labeling: Optional[HighRiskLabeling]) -> str:
    if rec.stratum is not None:
        return rec.stratum
    if legacy_labeling is None or new_labeling is None:
        raise ValidationError(
            f"record {rec.unit_id!r} has no stratum and no labelings were given")
    try:
        r1 = legacy_labeling.labels[rec.unit_id]
        r2 = new_labeling.labels[rec.unit_id]
    except KeyError:
        raise ValidationError(f"record {rec.unit_id!r} is missing from the labelings") from None
    if r2 != 1:
        raise ValidationError(
            f"record {rec.unit_id!r} is not in the new model's high-risk population")
    return "C" if r1 == 1 else "D"


def pool_reused_and_new(reused: Sequence[TrialRecord], fresh: Sequence[TrialRecord],
                        legacy_labeling: Optional[HighRiskLabeling] = None,
                        new_labeling: Optional[HighRiskLabeling] = None) -> list[StratumArmData]:
    """Bin reused and fresh records into the four (stratum, arm) cells.

    Reused records may only populate the concordant stratum; a legacy
    record outside it is a protocol violation, not data.
    """
    counts: dict[tuple[str, int], list[int]] = {
        (s, a): [0, 0] for s in STRATA for a in (0, 1)}
    for group, is_legacy in ((reused, True), (fresh, False)):
        for rec in group:
            if rec.arm not in (0, 1):
                raise ValidationError(f"record {rec.unit_id!r} has arm {rec.arm!r}")
            if rec.outcome not in (0, 1):
                raise ValidationError(f"record {rec.unit_id!r} has outcome {rec.outcome!r}")
            stratum = _resolve_stratum(rec, legacy_labeling, new_labeling)
            if stratum not in STRATA:
                raise ValidationError(f"record {rec.unit_id!r} has stratum {stratum!r}")
            if is_legacy and stratum != "C":
                raise ValidationError(
                    f"discordant legacy record is not reusable: {rec.unit_id!r}")
            cell = counts[(stratum, rec.arm)]
            cell[0] += 1
            cell[1] += rec.outcome
    return [StratumArmData(stratum=s, arm=a, n=n, events=e)
            for (s, a), (n, e) in sorted(counts.items())]
