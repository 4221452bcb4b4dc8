"""Validity checklist for reusing legacy-trial data, plus balance diagnostics.

The checklist is a fixed catalog of qualitative criteria grouped into four
consistency categories.  Statuses are asserted by the investigator, never
auto-decided; the quantitative balance report (standardized mean
differences and Kolmogorov-Smirnov tests between recruitment pools) only
informs that judgment.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from .concordance import RiskRecord
from .errors import ValidationError

__all__ = [
    "ChecklistItem",
    "CovariateBalance",
    "BalanceReport",
    "checklist_catalog",
    "balance_report",
    "render_checklist",
    "render_checklist_text",
]

CATEGORIES = (
    "population_consistency",
    "outcome_consistency",
    "intervention_consistency",
    "implementation_consistency",
)

STATUSES = ("met", "unmet", "unknown")

# Conventional flag threshold for standardized mean differences; surfaced in
# the human-readable summary only.
SMD_FLAG_THRESHOLD = 0.1

_CATALOG: tuple[tuple[str, str], ...] = (
    ("population_consistency",
     "Distributions of patient covariates and outcomes are similar across trials "
     "within concordant and discordant strata."),
    ("population_consistency",
     "Inclusion/exclusion criteria and recruitment processes are consistent."),
    ("population_consistency",
     "Underlying disease prevalence, risk factor distributions, and treatment "
     "responses are stable."),
    ("outcome_consistency",
     "Outcome definitions and measurement methods are identical."),
    ("intervention_consistency",
     "Clinical intervention triggered by legacy and updated AI model "
     "recommendations are similar."),
    ("implementation_consistency",
     "Clinicians comply with AI model recommendations across trials."),
    ("implementation_consistency",
     "All shared input variables between the legacy and updated AI models are "
     "measured identically."),
)


@dataclass(frozen=True)
class ChecklistItem:
    category: str
    criterion: str
    evidence: str = ""
    status: str = "unknown"

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise ValidationError(f"unknown category {self.category!r}", field="category")
        if self.status not in STATUSES:
            raise ValidationError(f"status must be one of {STATUSES}, got {self.status!r}",
                                  field="status")
        if (self.category, self.criterion) not in _CATALOG:
            raise ValidationError(
                f"criterion is not in the fixed catalog: {self.criterion!r}",
                field="criterion")


@dataclass(frozen=True)
class CovariateBalance:
    name: str
    smd: float
    test_p: float
    n_legacy: int
    n_new: int


@dataclass(frozen=True)
class BalanceReport:
    entries: tuple[CovariateBalance, ...] = field(default_factory=tuple)


def checklist_catalog() -> list[ChecklistItem]:
    """The complete fixed catalog, every status unknown."""
    return [ChecklistItem(category=c, criterion=t) for c, t in _CATALOG]


def _covariate_values(records: Sequence[RiskRecord], name: str, side: str) -> np.ndarray:
    if not records:
        raise ValidationError(f"{side} record group is empty")
    values = np.empty(len(records), dtype=float)
    for i, rec in enumerate(records):
        raw = (rec.covariates or {}).get(name)
        if raw is None:
            raise ValidationError(f"record {rec.unit_id!r} has no covariate {name!r}")
        try:
            values[i] = float(raw)
        except (TypeError, ValueError):
            raise ValidationError(
                f"covariate {name!r} of record {rec.unit_id!r} is not numeric: {raw!r} "
                "(one-hot expand categoricals first)") from None
    return values


def balance_report(legacy_records: Sequence[RiskRecord], new_records: Sequence[RiskRecord],
                   covariate_names: Sequence[str]) -> BalanceReport:
    """Standardized mean differences and KS tests between recruitment pools."""
    entries = []
    for name in covariate_names:
        legacy = _covariate_values(legacy_records, name, "legacy")
        new = _covariate_values(new_records, name, "new")
        mean_l, mean_n = float(np.mean(legacy)), float(np.mean(new))
        var_l = float(np.var(legacy, ddof=1)) if legacy.size > 1 else 0.0
        var_n = float(np.var(new, ddof=1)) if new.size > 1 else 0.0
        pooled = math.sqrt(0.5 * (var_l + var_n))
        if pooled > 0.0:
            smd = (mean_n - mean_l) / pooled
        elif mean_n == mean_l:
            smd = 0.0
        else:
            warnings.warn(f"covariate {name!r}: zero pooled spread with unequal means; "
                          "reporting an infinite standardized difference", UserWarning,
                          stacklevel=2)
            smd = math.inf if mean_n > mean_l else -math.inf
        ks = stats.ks_2samp(new, legacy, method="asymp")
        entries.append(CovariateBalance(name=name, smd=smd, test_p=float(ks.pvalue),
                                        n_legacy=legacy.size, n_new=new.size))
    return BalanceReport(entries=tuple(entries))


def render_checklist(items: Sequence[ChecklistItem],
                     balance: Optional[BalanceReport] = None) -> dict:
    """Structured report with the overall reuse verdict.

    The verdict is "reuse defensible" only when every item is met;
    any unmet item makes it "reuse not defensible", and unknowns alone
    yield "insufficient evidence".
    """
    seen = {(i.category, i.criterion) for i in items}
    missing = [c for c in _CATALOG if c not in seen]
    all_items = list(items) + [ChecklistItem(category=c, criterion=t) for c, t in missing]
    unmet = [i for i in all_items if i.status == "unmet"]
    unknown = [i for i in all_items if i.status == "unknown"]
    if unmet:
        verdict = "reuse not defensible"
    elif unknown:
        verdict = "insufficient evidence"
    else:
        verdict = "reuse defensible"
    report = {
        "verdict": verdict,
        "items": [
            {"category": i.category, "criterion": i.criterion,
             "evidence": i.evidence, "status": i.status}
            for i in all_items
        ],
        "unmet_criteria": [i.criterion for i in unmet],
        "unknown_criteria": [i.criterion for i in unknown],
    }
    if balance is not None:
        report["balance"] = [
            {"name": e.name, "smd": e.smd, "test_p": e.test_p,
             "n_legacy": e.n_legacy, "n_new": e.n_new}
            for e in balance.entries
        ]
    return report


def render_checklist_text(report: dict) -> str:
    """Plain-text summary of a rendered checklist report."""
    lines = [f"Reuse verdict: {report['verdict']}"]
    for item in report["items"]:
        mark = {"met": "+", "unmet": "x", "unknown": "?"}[item["status"]]
        lines.append(f"  [{mark}] ({item['category']}) {item['criterion']}")
        if item["evidence"]:
            lines.append(f"      evidence: {item['evidence']}")
    for entry in report.get("balance", []):
        flag = ""
        if not math.isfinite(entry["smd"]) or abs(entry["smd"]) > SMD_FLAG_THRESHOLD:
            flag = f"  <-- |SMD| > {SMD_FLAG_THRESHOLD}"
        lines.append(f"  balance {entry['name']}: smd={entry['smd']:.4g} "
                     f"p={entry['test_p']:.4g} "
                     f"(n={entry['n_legacy']}/{entry['n_new']}){flag}")
    return "\n".join(lines)
