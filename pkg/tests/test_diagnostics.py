import dataclasses
import math

import numpy as np
import pytest

from bridge_trials.concordance import RiskRecord
from bridge_trials.diagnostics import (
    CATEGORIES,
    ChecklistItem,
    balance_report,
    checklist_catalog,
    render_checklist,
    render_checklist_text,
)
from bridge_trials.errors import ValidationError

GOLDEN_CATALOG = [
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
]


def make_records(values, name="age", prefix="u"):
    return [RiskRecord(unit_id=f"{prefix}{i}", scores={"m": 0.0}, covariates={name: v})
            for i, v in enumerate(values)]


class TestCatalog:
    def test_seven_items(self):
        assert len(checklist_catalog()) == 7

    def test_all_statuses_unknown(self):
        assert all(item.status == "unknown" for item in checklist_catalog())

    def test_exactly_four_categories(self):
        assert {i.category for i in checklist_catalog()} == set(CATEGORIES)

    def test_golden_snapshot(self):
        assert [(i.category, i.criterion) for i in checklist_catalog()] == GOLDEN_CATALOG

    def test_category_counts(self):
        counts = {}
        for item in checklist_catalog():
            counts[item.category] = counts.get(item.category, 0) + 1
        assert counts == {"population_consistency": 3, "outcome_consistency": 1,
                          "intervention_consistency": 1, "implementation_consistency": 2}

    def test_foreign_criterion_rejected(self):
        with pytest.raises(ValidationError, match="catalog"):
            ChecklistItem(category="outcome_consistency", criterion="made up")


class TestBalanceReport:
    def test_identical_samples(self):
        legacy = make_records([1.0, 2.0, 3.0, 4.0])
        new = make_records([1.0, 2.0, 3.0, 4.0], prefix="n")
        report = balance_report(legacy, new, ["age"])
        entry = report.entries[0]
        assert entry.smd == 0.0
        assert entry.test_p == pytest.approx(1.0)

    def test_unit_shift_with_unit_sd(self):
        rng = np.random.default_rng(5)
        base = rng.standard_normal(4000)
        legacy = make_records(base)
        new = make_records(base + 1.0, prefix="n")
        entry = balance_report(legacy, new, ["age"]).entries[0]
        assert entry.smd == pytest.approx(1.0, abs=0.05)

    def test_exact_smd_formula(self):
        legacy = make_records([0.0, 1.0, -1.0, 2.0, -2.0])
        new = make_records([1.0, 2.0, 0.0, 3.0, -1.0], prefix="n")
        entry = balance_report(legacy, new, ["age"]).entries[0]
        pooled = math.sqrt(0.5 * (np.var([0, 1, -1, 2, -2], ddof=1) * 2))
        assert entry.smd == pytest.approx(1.0 / pooled)

    def test_shifted_distribution_detected(self):
        rng = np.random.default_rng(6)
        legacy = make_records(rng.standard_normal(10_000))
        new = make_records(rng.standard_normal(10_000) + 0.5, prefix="n")
        entry = balance_report(legacy, new, ["age"]).entries[0]
        assert entry.test_p < 0.001

    def test_sign_flips_when_groups_swap(self):
        rng = np.random.default_rng(7)
        a = make_records(rng.standard_normal(500))
        b = make_records(rng.standard_normal(500) + 0.3, prefix="n")
        forward = balance_report(a, b, ["age"]).entries[0]
        backward = balance_report(b, a, ["age"]).entries[0]
        assert forward.smd == pytest.approx(-backward.smd)

    def test_ks_invariant_under_monotone_transform(self):
        rng = np.random.default_rng(8)
        x = rng.standard_normal(800)
        y = rng.standard_normal(800) * 1.4
        p_raw = balance_report(make_records(x), make_records(y, prefix="n"),
                               ["age"]).entries[0].test_p
        p_exp = balance_report(make_records(np.exp(x)), make_records(np.exp(y), prefix="n"),
                               ["age"]).entries[0].test_p
        assert p_raw == pytest.approx(p_exp, rel=1e-12)

    def test_zero_spread_unequal_means(self):
        legacy = make_records([1.0, 1.0, 1.0])
        new = make_records([2.0, 2.0, 2.0], prefix="n")
        with pytest.warns(UserWarning, match="zero pooled spread"):
            entry = balance_report(legacy, new, ["age"]).entries[0]
        assert math.isinf(entry.smd)

    def test_empty_group_rejected(self):
        with pytest.raises(ValidationError, match="empty"):
            balance_report([], make_records([1.0]), ["age"])

    def test_missing_covariate_named(self):
        with pytest.raises(ValidationError, match="height"):
            balance_report(make_records([1.0]), make_records([1.0], prefix="n"),
                           ["height"])

    def test_categorical_rejected(self):
        recs = [RiskRecord(unit_id="u0", scores={"m": 0.0}, covariates={"site": "ucsf"})]
        with pytest.raises(ValidationError, match="one-hot"):
            balance_report(recs, recs, ["site"])


class TestRenderChecklist:
    def test_all_met_positive_verdict(self):
        items = [dataclasses.replace(i, status="met") for i in checklist_catalog()]
        report = render_checklist(items)
        assert report["verdict"] == "reuse defensible"

    def test_one_unmet_negative_and_cited(self):
        items = [dataclasses.replace(i, status="met") for i in checklist_catalog()]
        items[3] = dataclasses.replace(items[3], status="unmet")
        report = render_checklist(items)
        assert report["verdict"] == "reuse not defensible"
        assert report["unmet_criteria"] == [items[3].criterion]

    def test_unknowns_conservative(self):
        items = [dataclasses.replace(i, status="met") for i in checklist_catalog()[:-1]]
        report = render_checklist(items)
        assert report["verdict"] == "insufficient evidence"

    def test_text_rendering_flags_large_smd(self):
        items = [dataclasses.replace(i, status="met") for i in checklist_catalog()]
        legacy = make_records([0.0, 1.0, 2.0, 3.0])
        new = make_records([2.0, 3.0, 4.0, 5.0], prefix="n")
        report = render_checklist(items, balance_report(legacy, new, ["age"]))
        text = render_checklist_text(report)
        assert "Reuse verdict" in text
        assert "|SMD| > 0.1" in text
