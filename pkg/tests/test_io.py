import dataclasses
import json

import pytest

from bridge_trials import io
from bridge_trials.design import data_reuse_plan
from bridge_trials.errors import DataFormatError, ValidationError
from conftest import breast_cancer_spec


SCORES_CSV = """unit_id,patient_id,mirai,legacy_dl,outcome,arm,age
m1,p1,0.91,0.85,1,1,62
m2,p1,0.40,0.55,0,0,62
m3,p2,0.13,0.22,0,1,47
"""


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadScores:
    def test_well_formed(self, tmp_path):
        records = io.load_scores(write(tmp_path, "s.csv", SCORES_CSV),
                                 covariates=["age"])
        assert len(records) == 3
        assert records[0].scores == {"mirai": 0.91, "legacy_dl": 0.85}
        assert records[0].covariates == {"age": 62.0}
        assert records[0].outcome == 1 and records[0].arm == 1
        assert records[2].patient_id == "p2"

    def test_duplicate_unit_id_names_rows(self, tmp_path):
        text = "unit_id,m\na,1\nb,2\na,3\n"
        with pytest.raises(DataFormatError, match="rows 2 and 4"):
            io.load_scores(write(tmp_path, "dup.csv", text))

    def test_bad_outcome_cell_named(self, tmp_path):
        text = "unit_id,m,outcome\na,1,2\n"
        with pytest.raises(DataFormatError, match="row 2.*outcome"):
            io.load_scores(write(tmp_path, "bad.csv", text))

    def test_unparseable_score_cell(self, tmp_path):
        text = "unit_id,m\na,oops\n"
        with pytest.raises(DataFormatError, match="row 2.*'m'"):
            io.load_scores(write(tmp_path, "bad.csv", text))

    def test_missing_required_column(self, tmp_path):
        with pytest.raises(DataFormatError, match="unit_id"):
            io.load_scores(write(tmp_path, "noid.csv", "id,m\na,1\n"))

    def test_models_hint_restricts(self, tmp_path):
        records = io.load_scores(write(tmp_path, "s.csv", SCORES_CSV), models=["mirai"])
        assert set(records[0].scores) == {"mirai"}
        assert "legacy_dl" in records[0].covariates

    def test_missing_model_column(self, tmp_path):
        with pytest.raises(DataFormatError, match="nope"):
            io.load_scores(write(tmp_path, "s.csv", SCORES_CSV), models=["nope"])


class TestLoadTrialRecords:
    def test_split_by_source(self, tmp_path):
        text = ("unit_id,stratum,arm,outcome,source\n"
                "a,C,1,1,legacy\nb,C,0,0,legacy\nc,D,1,0,new\n")
        reused, fresh = io.load_trial_records(write(tmp_path, "t.csv", text))
        assert [r.unit_id for r in reused] == ["a", "b"]
        assert fresh[0].stratum == "D"

    def test_bad_stratum(self, tmp_path):
        text = "unit_id,stratum,arm,outcome,source\na,X,1,1,new\n"
        with pytest.raises(DataFormatError, match="stratum"):
            io.load_trial_records(write(tmp_path, "t.csv", text))

    def test_bad_source(self, tmp_path):
        text = "unit_id,stratum,arm,outcome,source\na,C,1,1,old\n"
        with pytest.raises(DataFormatError, match="source"):
            io.load_trial_records(write(tmp_path, "t.csv", text))


class TestDesignSpecJson:
    def test_reference_spec_loads(self, tmp_path, breast_spec_dict):
        path = write(tmp_path, "spec.json", json.dumps(breast_spec_dict))
        spec = io.load_design_spec(path)
        assert spec.alpha == 0.025
        assert spec.k2 == 0.25
        assert spec.legacy.n1 == 20392
        assert spec == breast_cancer_spec()

    def test_roundtrip_identity(self, tmp_path):
        spec = breast_cancer_spec(completion=0.5)
        path = tmp_path / "spec.json"
        io.write_report(io.to_document(spec), path)
        assert io.load_design_spec(path) == spec

    def test_k2_zero_rejected(self, breast_spec_dict):
        breast_spec_dict["k2"] = 0
        with pytest.raises(ValidationError, match="k2"):
            io.design_spec_from_dict(breast_spec_dict)

    def test_unknown_field_rejected(self, breast_spec_dict):
        breast_spec_dict["typo_field"] = 1
        with pytest.raises(ValidationError, match="typo_field"):
            io.design_spec_from_dict(breast_spec_dict)

    def test_malformed_json_is_data_error(self, tmp_path):
        path = write(tmp_path, "bad.json", "{not json")
        with pytest.raises(DataFormatError, match="malformed"):
            io.load_design_spec(path)

    def test_document_roundtrip_bytes(self, breast_spec_dict):
        result = data_reuse_plan(io.design_spec_from_dict(breast_spec_dict))
        doc = io.to_document(result)
        once = io.canonical_json(doc)
        again = io.canonical_json(json.loads(once))
        assert once == again


class TestCanonicalJson:
    def test_byte_stable(self):
        doc = {"b": 0.1 + 0.2, "a": [1, 2.5, True, None]}
        assert io.canonical_json(doc) == io.canonical_json(dict(doc))

    def test_sorted_keys_and_version(self):
        text = io.canonical_json(io.to_document({"zz": 1, "aa": 2}))
        assert text.index('"aa"') < text.index('"schema_version"') < text.index('"zz"')

    def test_ten_significant_digits(self):
        text = io.canonical_json({"x": 1.2345678901234567})
        assert "1.23456789" in text and "1.2345678901" not in text

    def test_nan_rejected(self):
        with pytest.raises(ValidationError):
            io.canonical_json({"x": float("nan")})

    def test_infinity_sentinel(self):
        assert '"inf"' in io.canonical_json({"x": float("inf")})


class TestScenarioJson:
    def test_roundtrip(self, tmp_path):
        from conftest import CONFIG_DIR
        scenario = io.load_scenario(CONFIG_DIR / "power_scenario.json")
        assert scenario.replicates == 10000
        assert scenario.design.z_alpha == 1.96
        out = tmp_path / "scenario.json"
        io.write_report(io.to_document(scenario), out)
        assert io.load_scenario(out) == scenario

    def test_unknown_field(self):
        with pytest.raises(ValidationError, match="bogus"):
            io.scenario_from_dict({"bogus": 1})


class TestChecklistJson:
    def test_load_and_validate(self, tmp_path):
        from bridge_trials.diagnostics import checklist_catalog
        items = [dataclasses.asdict(i) for i in checklist_catalog()]
        items[0]["status"] = "met"
        path = write(tmp_path, "items.json", json.dumps({"items": items}))
        loaded = io.load_checklist_items(path)
        assert loaded[0].status == "met"
        assert len(loaded) == 7

    def test_bad_status(self, tmp_path):
        from bridge_trials.diagnostics import checklist_catalog
        items = [dataclasses.asdict(checklist_catalog()[0])]
        items[0]["status"] = "maybe"
        path = write(tmp_path, "items.json", json.dumps(items))
        with pytest.raises(ValidationError, match="status"):
            io.load_checklist_items(path)
