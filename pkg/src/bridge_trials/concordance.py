"""Agreement between legacy and new model risk stratification.

Top-q% high-risk labeling, the two conditional concordance rates, overlap
curves over a grid of thresholds, bootstrap confidence intervals, and
McNemar tests on paired flags.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import ValidationError
from .numeric import RngStream, chi_square1_sf, exact_binomial_two_sided

__all__ = [
    "RiskRecord",
    "HighRiskLabeling",
    "ConcordanceEstimate",
    "classify_top_fraction",
    "concordance_rates",
    "union_concordance",
    "overlap_curve",
    "bootstrap_ci",
    "mcnemar_test",
    "paired_discordance",
]

# Discordant-pair total below which `auto` McNemar switches to the exact test.
EXACT_MCNEMAR_CUTOFF = 25


@dataclass
class RiskRecord:
    """One analysis unit: model scores plus optional trial fields."""

    unit_id: str
    scores: dict[str, float] = field(default_factory=dict)
    patient_id: Optional[str] = None
    covariates: Optional[dict] = None
    outcome: Optional[int] = None
    arm: Optional[int] = None
    trial_tag: Optional[str] = None


@dataclass
class HighRiskLabeling:
    """Binary high-risk labels for one model at one top-fraction q."""

    model_name: str
    q: float
    threshold: float
    labels: dict[str, int]

    def high_risk_ids(self) -> set[str]:
        return {uid for uid, flag in self.labels.items() if flag == 1}


@dataclass
class ConcordanceEstimate:
    """2x2 concordance cells and the two conditional rates, with optional CIs.

    Cell n_ab counts units with legacy flag a and new flag b; cr12 is the
    fraction of new-model high-risk units also flagged by the legacy model,
    cr21 the reverse.
    """

    q: float
    n11: int
    n10: int
    n01: int
    n00: int
    cr12: Optional[float]
    cr21: Optional[float]
    ci12: Optional[tuple[float, float]] = None
    ci21: Optional[tuple[float, float]] = None
    n_bootstrap: int = 0
    seed: int = 0
    n_skipped: int = 0


def _check_fraction(q: float) -> float:
    if not isinstance(q, (int, float)) or isinstance(q, bool) or math.isnan(q):
        raise ValidationError(f"q must be a number in (0, 1], got {q!r}", field="q")
    if not 0.0 < q <= 1.0:
        raise ValidationError(f"q must lie in (0, 1], got {q!r}", field="q")
    return float(q)


def _score_array(records: Sequence[RiskRecord], model_name: str) -> np.ndarray:
    values = np.empty(len(records), dtype=float)
    for i, rec in enumerate(records):
        try:
            values[i] = rec.scores[model_name]
        except KeyError:
            raise ValidationError(
                f"record {rec.unit_id!r} has no score for model {model_name!r}"
            ) from None
    if not np.all(np.isfinite(values)):
        bad = next(r.unit_id for r, v in zip(records, values) if not math.isfinite(v))
        raise ValidationError(f"record {bad!r} has a non-finite score for {model_name!r}")
    return values


def _top_fraction_threshold(scores: np.ndarray, q: float) -> float:
    # m-th largest score, m = ceil(q*n); every score >= threshold is flagged,
    # so ties at the boundary are all included.
    n = scores.size
    m = math.ceil(q * n - 1e-12)
    m = max(1, min(n, m))
    return float(np.partition(scores, n - m)[n - m])


def classify_top_fraction(records: Sequence[RiskRecord], model_name: str, q: float) -> HighRiskLabeling:
    """Label the top-q fraction of ``model_name`` scores as high risk.

    The threshold is the ceil(q*n)-th largest score; all units scoring at
    or above it are labeled 1, so at least ceil(q*n) units are flagged.
    """
    q = _check_fraction(q)
    if not records:
        raise ValidationError("cannot classify an empty record list")
    scores = _score_array(records, model_name)
    threshold = _top_fraction_threshold(scores, q)
    labels = {rec.unit_id: int(s >= threshold) for rec, s in zip(records, scores)}
    if len(labels) != len(records):
        raise ValidationError("duplicate unit_id values in record list")
    return HighRiskLabeling(model_name=model_name, q=q, threshold=threshold, labels=labels)


def _require_same_units(a: dict[str, int], b: dict[str, int]) -> None:
    if a.keys() != b.keys():
        missing = sorted(set(a) ^ set(b))
        shown = ", ".join(missing[:10]) + ("..." if len(missing) > 10 else "")
        raise ValidationError(f"labelings cover different units (symmetric difference: {shown})")


def _rates_from_flags(legacy: np.ndarray, new: np.ndarray) -> tuple[int, int, int, int, float | None, float | None]:
    n11 = int(np.sum(legacy & new))
    n10 = int(np.sum(legacy & ~new))
    n01 = int(np.sum(~legacy & new))
    n00 = int(np.sum(~legacy & ~new))
    cr12 = n11 / (n11 + n01) if (n11 + n01) > 0 else None
    cr21 = n11 / (n11 + n10) if (n11 + n10) > 0 else None
    return n11, n10, n01, n00, cr12, cr21


def concordance_rates(legacy: HighRiskLabeling, new: HighRiskLabeling) -> ConcordanceEstimate:
    """Cross-tabulate two labelings and compute both concordance rates."""
    _require_same_units(legacy.labels, new.labels)
    units = list(legacy.labels)
    lv = np.array([legacy.labels[u] for u in units], dtype=bool)
    nv = np.array([new.labels[u] for u in units], dtype=bool)
    n11, n10, n01, n00, cr12, cr21 = _rates_from_flags(lv, nv)
    return ConcordanceEstimate(q=new.q, n11=n11, n10=n10, n01=n01, n00=n00,
                               cr12=cr12, cr21=cr21)


def union_concordance(legacies: Sequence[HighRiskLabeling], new: HighRiskLabeling) -> float:
    """Fraction of new-model high-risk units flagged by at least one legacy model."""
    if not legacies:
        raise ValidationError("need at least one legacy labeling")
    for lab in legacies:
        _require_same_units(lab.labels, new.labels)
    new_high = new.high_risk_ids()
    if not new_high:
        raise ValidationError("new model labels no units high risk")
    covered = set()
    for lab in legacies:
        covered |= lab.high_risk_ids() & new_high
    return len(covered) / len(new_high)


def overlap_curve(records: Sequence[RiskRecord], legacy_model: str, new_model: str,
                  q_grid: Sequence[float]) -> list[tuple[float, float]]:
    """cr12 as a function of the high-risk fraction q, one point per grid value."""
    if not q_grid:
        raise ValidationError("q_grid must be non-empty")
    qs = [_check_fraction(q) for q in q_grid]
    if any(b <= a for a, b in zip(qs, qs[1:])):
        raise ValidationError("q_grid must be strictly increasing")
    curve = []
    for q in qs:
        est = concordance_rates(classify_top_fraction(records, legacy_model, q),
                                classify_top_fraction(records, new_model, q))
        curve.append((q, est.cr12))
    return curve


def bootstrap_ci(records: Sequence[RiskRecord], legacy_model: str, new_model: str, q: float,
                 n_bootstrap: int, seed: int, cluster_by: Optional[str] = None) -> ConcordanceEstimate:
    """Percentile bootstrap CIs for both concordance rates at fraction q.

    Units (or whole clusters, when ``cluster_by`` names a record attribute
    such as ``patient_id``) are resampled with replacement; thresholds and
    rates are recomputed per replicate.  Replicate i draws from the keyed
    stream (seed, i), so results are reproducible and independent of any
    parallel execution order.
    """
    q = _check_fraction(q)
    if n_bootstrap < 1:
        raise ValidationError("n_bootstrap must be >= 1", field="n_bootstrap")
    point = concordance_rates(classify_top_fraction(records, legacy_model, q),
                              classify_top_fraction(records, new_model, q))

    legacy_scores = _score_array(records, legacy_model)
    new_scores = _score_array(records, new_model)

    if cluster_by is None:
        groups = [np.array([i]) for i in range(len(records))]
    else:
        by_key: dict[object, list[int]] = {}
        for i, rec in enumerate(records):
            key = getattr(rec, cluster_by, None)
            if key is None and rec.covariates:
                key = rec.covariates.get(cluster_by)
            if key is None:
                raise ValidationError(f"record {rec.unit_id!r} has no {cluster_by!r} value")
            by_key.setdefault(key, []).append(i)
        groups = [np.array(ix) for _, ix in sorted(by_key.items(), key=lambda kv: str(kv[0]))]

    cr12s, cr21s = [], []
    skipped = 0
    for rep in range(n_bootstrap):
        rng = RngStream(seed, rep).generator()
        chosen = rng.integers(0, len(groups), size=len(groups))
        idx = np.concatenate([groups[g] for g in chosen])
        lv = legacy_scores[idx]
        nv = new_scores[idx]
        lt = _top_fraction_threshold(lv, q)
        nt = _top_fraction_threshold(nv, q)
        n11, n10, n01, n00, cr12, cr21 = _rates_from_flags(lv >= lt, nv >= nt)
        if cr12 is None or cr21 is None:
            skipped += 1
            continue
        cr12s.append(cr12)
        cr21s.append(cr21)

    if not cr12s:
        raise ValidationError("all bootstrap replicates were degenerate")
    lo12, hi12 = np.percentile(cr12s, [2.5, 97.5])
    lo21, hi21 = np.percentile(cr21s, [2.5, 97.5])
    point.ci12 = (float(lo12), float(hi12))
    point.ci21 = (float(lo21), float(hi21))
    point.n_bootstrap = n_bootstrap
    point.seed = seed
    point.n_skipped = skipped
    return point


def mcnemar_test(b: int, c: int, mode: str = "auto") -> tuple[float, float]:
    """McNemar test from the two discordant-pair counts.

    Returns (statistic, p).  The statistic is (b-c)^2/(b+c) without
    continuity correction; the exact p doubles the smaller binomial(b+c,
    1/2) tail.  ``auto`` uses the exact test when b + c < 25.
    """
    if b < 0 or c < 0:
        raise ValidationError(f"discordant counts must be >= 0, got b={b}, c={c}")
    if mode not in ("asymptotic", "exact", "auto"):
        raise ValidationError(f"unknown mode {mode!r}", field="mode")
    n = b + c
    if n == 0:
        return 0.0, 1.0
    statistic = (b - c) ** 2 / n
    if mode == "auto":
        mode = "exact" if n < EXACT_MCNEMAR_CUTOFF else "asymptotic"
    if mode == "exact":
        p = exact_binomial_two_sided(b, n)
    else:
        p = chi_square1_sf(statistic)
    return statistic, p


def paired_discordance(legacy_a: HighRiskLabeling, legacy_b: HighRiskLabeling,
                       new: HighRiskLabeling) -> tuple[int, int]:
    """Discordant-pair counts for comparing two legacy models on one new cohort.

    Restricted to units the new model flags high risk: b counts units
    flagged only by legacy_a, c those flagged only by legacy_b.  Feed the
    result to :func:`mcnemar_test`.
    """
    _require_same_units(legacy_a.labels, new.labels)
    _require_same_units(legacy_b.labels, new.labels)
    b = c = 0
    for uid in new.high_risk_ids():
        fa, fb = legacy_a.labels[uid], legacy_b.labels[uid]
        if fa and not fb:
            b += 1
        elif fb and not fa:
            c += 1
    return b, c
