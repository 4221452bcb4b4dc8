"""Dataset and configuration ingestion plus byte-stable serialization.

CSV inputs are comma-separated UTF-8 with a mandatory header row; loading
rejects malformed cells with their row and column rather than coercing.
JSON documents carry a top-level schema_version, sorted keys, and floats
rendered at 10 significant digits, so identical objects always serialize
to identical bytes.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, is_dataclass
from pathlib import Path
from typing import Any, Optional, Sequence

from .concordance import ConcordanceEstimate, RiskRecord
from .design import DesignResult, DesignSpec, LegacyTrial, StrataRates
from .diagnostics import ChecklistItem
from .errors import DataFormatError, ValidationError
from .estimation import DeltaEstimate, TrialRecord
from .numeric import RoundingPolicy
from .simulator import OperatingCharacteristics, ReplicateResult, SimScenario

__all__ = [
    "SCHEMA_VERSION",
    "canonical_json",
    "to_document",
    "write_report",
    "write_trace_csv",
    "load_scores",
    "load_trial_records",
    "load_design_spec",
    "design_spec_from_dict",
    "load_scenario",
    "scenario_from_dict",
    "load_checklist_items",
]

SCHEMA_VERSION = "1"

_RESERVED_COLUMNS = ("unit_id", "patient_id", "outcome", "arm", "trial_tag")


# ---------------------------------------------------------------------------
# canonical JSON


def _normalize(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _normalize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_normalize(v) for v in value]
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        if math.isnan(value):
            raise ValidationError("cannot serialize NaN")
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if value == int(value) and abs(value) < 1e15:
            return value
        return float(f"{value:.10g}")
    if isinstance(value, RoundingPolicy):
        return value.value
    raise ValidationError(f"cannot serialize value of type {type(value).__name__}")


def canonical_json(document: dict | list) -> str:
    """Stable rendering: sorted keys, 10-significant-digit floats."""
    return json.dumps(_normalize(document), sort_keys=True, indent=2,
                      allow_nan=False) + "\n"


def to_document(obj: Any) -> dict:
    """A JSON-ready dict (with schema_version) for any toolkit result type."""
    if isinstance(obj, dict):
        doc = dict(obj)
    elif isinstance(obj, DesignResult):
        doc = {k: v for k, v in asdict(obj).items() if not k.startswith("_")}
    elif isinstance(obj, (DesignSpec, SimScenario, ConcordanceEstimate,
                          OperatingCharacteristics, DeltaEstimate)):
        doc = asdict(obj)
    elif is_dataclass(obj):
        doc = asdict(obj)
    else:
        raise ValidationError(f"cannot serialize object of type {type(obj).__name__}")
    doc.setdefault("schema_version", SCHEMA_VERSION)
    return doc


def write_report(obj: Any, path: str | Path) -> None:
    Path(path).write_text(canonical_json(to_document(obj)), encoding="utf-8")


def write_trace_csv(rows: Sequence[ReplicateResult], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["replicate", "delta_hat", "variance", "rejected",
                         "reused", "recruited"])
        for r in rows:
            writer.writerow([r.replicate, f"{r.delta_hat:.10g}", f"{r.variance:.10g}",
                             int(r.rejected), r.reused, r.recruited])


# ---------------------------------------------------------------------------
# CSV ingestion


def _read_rows(path: str | Path) -> tuple[list[str], list[tuple[int, list[str]]]]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: file is empty (header row required)") from None
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise DataFormatError(
                    f"{path}, row {lineno}: expected {len(header)} fields, got {len(row)}")
            rows.append((lineno, row))
    return [h.strip() for h in header], rows


def _parse_binary(raw: str, path, lineno: int, column: str) -> int:
    if raw not in ("0", "1"):
        raise DataFormatError(
            f"{path}, row {lineno}, column {column!r}: expected 0 or 1, got {raw!r}")
    return int(raw)


def _parse_score(raw: str, path, lineno: int, column: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise DataFormatError(
            f"{path}, row {lineno}, column {column!r}: not a number: {raw!r}") from None
    if not math.isfinite(value):
        raise DataFormatError(
            f"{path}, row {lineno}, column {column!r}: non-finite score {raw!r}")
    return value


def load_scores(path: str | Path, models: Optional[Sequence[str]] = None,
                covariates: Optional[Sequence[str]] = None) -> list[RiskRecord]:
    """Load a risk-score table into records.

    Non-reserved columns are model scores unless listed in ``covariates``;
    passing ``models`` restricts score parsing to those columns and treats
    the rest as covariates.
    """
    header, rows = _read_rows(path)
    if "unit_id" not in header:
        raise DataFormatError(f"{path}: missing required column 'unit_id'")
    if len(set(header)) != len(header):
        raise DataFormatError(f"{path}: duplicate column names in header")
    covariates = list(covariates or [])
    extra = [c for c in header if c not in _RESERVED_COLUMNS and c not in covariates]
    if models is None:
        score_columns = extra
    else:
        missing = [m for m in models if m not in header]
        if missing:
            raise DataFormatError(f"{path}: missing score columns {missing}")
        score_columns = list(models)
        covariates = covariates + [c for c in extra if c not in score_columns]
    if not score_columns:
        raise DataFormatError(f"{path}: no score columns found")

    col = {name: header.index(name) for name in header}
    records: list[RiskRecord] = []
    seen: dict[str, int] = {}
    for lineno, row in rows:
        unit_id = row[col["unit_id"]].strip()
        if not unit_id:
            raise DataFormatError(f"{path}, row {lineno}: empty unit_id")
        if unit_id in seen:
            raise DataFormatError(
                f"{path}: duplicate unit_id {unit_id!r} on rows {seen[unit_id]} and {lineno}")
        seen[unit_id] = lineno

        scores = {name: _parse_score(row[col[name]].strip(), path, lineno, name)
                  for name in score_columns}
        covs: dict[str, Any] = {}
        for name in covariates:
            raw = row[col[name]].strip()
            if raw == "":
                continue
            try:
                covs[name] = float(raw)
            except ValueError:
                covs[name] = raw

        def optional(name: str) -> Optional[str]:
            if name not in col:
                return None
            raw = row[col[name]].strip()
            return raw or None

        outcome_raw = optional("outcome")
        arm_raw = optional("arm")
        records.append(RiskRecord(
            unit_id=unit_id,
            scores=scores,
            patient_id=optional("patient_id"),
            covariates=covs or None,
            outcome=None if outcome_raw is None else _parse_binary(outcome_raw, path, lineno, "outcome"),
            arm=None if arm_raw is None else _parse_binary(arm_raw, path, lineno, "arm"),
            trial_tag=optional("trial_tag"),
        ))
    if not records:
        raise DataFormatError(f"{path}: no data rows")
    return records


def load_trial_records(path: str | Path) -> tuple[list[TrialRecord], list[TrialRecord]]:
    """Load analysis rows, split into (reused, fresh) by the source column."""
    header, rows = _read_rows(path)
    required = ["unit_id", "stratum", "arm", "outcome", "source"]
    missing = [c for c in required if c not in header]
    if missing:
        raise DataFormatError(f"{path}: missing required columns {missing}")
    col = {name: header.index(name) for name in header}
    reused, fresh = [], []
    seen: dict[str, int] = {}
    for lineno, row in rows:
        unit_id = row[col["unit_id"]].strip()
        if unit_id in seen:
            raise DataFormatError(
                f"{path}: duplicate unit_id {unit_id!r} on rows {seen[unit_id]} and {lineno}")
        seen[unit_id] = lineno
        stratum = row[col["stratum"]].strip()
        if stratum not in ("C", "D"):
            raise DataFormatError(
                f"{path}, row {lineno}, column 'stratum': expected C or D, got {stratum!r}")
        source = row[col["source"]].strip()
        if source not in ("legacy", "new"):
            raise DataFormatError(
                f"{path}, row {lineno}, column 'source': expected legacy or new, got {source!r}")
        record = TrialRecord(
            unit_id=unit_id,
            arm=_parse_binary(row[col["arm"]].strip(), path, lineno, "arm"),
            outcome=_parse_binary(row[col["outcome"]].strip(), path, lineno, "outcome"),
            source=source,
            stratum=stratum,
        )
        (reused if source == "legacy" else fresh).append(record)
    return reused, fresh


# ---------------------------------------------------------------------------
# JSON configuration documents


def _require_keys(data: dict, known: set[str], context: str) -> None:
    unknown = sorted(set(data) - known - {"schema_version"})
    if unknown:
        raise ValidationError(f"{context}: unknown fields {unknown}")


def _get_number(data: dict, name: str, context: str, required: bool = True) -> Optional[float]:
    if name not in data or data[name] is None:
        if required:
            raise ValidationError(f"{context}: missing required field {name!r}", field=name)
        return None
    value = data[name]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{context}: field {name!r} must be a number, got {value!r}",
                              field=name)
    return float(value)


def _strata_rates_from_dict(data: Any) -> StrataRates:
    if not isinstance(data, dict):
        raise ValidationError("rates must be an object", field="rates")
    _require_keys(data, {"p_c1", "p_c0", "p_d1", "p_d0"}, "rates")
    return StrataRates(
        p_c1=_get_number(data, "p_c1", "rates"),
        p_c0=_get_number(data, "p_c0", "rates"),
        p_d1=_get_number(data, "p_d1", "rates"),
        p_d0=_get_number(data, "p_d0", "rates"),
    )


def design_spec_from_dict(data: Any) -> DesignSpec:
    if not isinstance(data, dict):
        raise ValidationError("design spec must be a JSON object")
    known = {"alpha", "power", "delta_margin", "cr12", "cr21", "rates", "k2",
             "legacy", "unit_cost", "rounding", "direction", "delta_effect",
             "z_alpha", "z_beta"}
    _require_keys(data, known, "design spec")
    legacy = None
    if data.get("legacy") is not None:
        ldata = data["legacy"]
        if not isinstance(ldata, dict):
            raise ValidationError("legacy must be an object", field="legacy")
        _require_keys(ldata, {"n1", "k1", "completion"}, "legacy")
        completion = _get_number(ldata, "completion", "legacy", required=False)
        legacy = LegacyTrial(
            n1=_get_number(ldata, "n1", "legacy"),
            k1=_get_number(ldata, "k1", "legacy"),
            completion=1.0 if completion is None else completion,
        )
    rounding = data.get("rounding", RoundingPolicy.CEIL_PER_ARM.value)
    try:
        policy = RoundingPolicy(rounding)
    except ValueError:
        raise ValidationError(f"unknown rounding policy {rounding!r}", field="rounding") from None
    return DesignSpec(
        alpha=_get_number(data, "alpha", "design spec"),
        power=_get_number(data, "power", "design spec"),
        delta_margin=_get_number(data, "delta_margin", "design spec"),
        cr12=_get_number(data, "cr12", "design spec"),
        cr21=_get_number(data, "cr21", "design spec"),
        rates=_strata_rates_from_dict(data.get("rates")),
        k2=_get_number(data, "k2", "design spec"),
        legacy=legacy,
        unit_cost=_get_number(data, "unit_cost", "design spec", required=False),
        rounding=policy,
        direction=data.get("direction", "increase"),
        delta_effect=_get_number(data, "delta_effect", "design spec", required=False),
        z_alpha=_get_number(data, "z_alpha", "design spec", required=False),
        z_beta=_get_number(data, "z_beta", "design spec", required=False),
    )


def _load_json(path: str | Path) -> Any:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: malformed JSON ({exc})") from None


def load_design_spec(path: str | Path) -> DesignSpec:
    return design_spec_from_dict(_load_json(path))


def scenario_from_dict(data: Any) -> SimScenario:
    if not isinstance(data, dict):
        raise ValidationError("scenario must be a JSON object")
    known = {"population_size", "q", "cr12", "cr21", "rates", "design", "replicates",
             "master_seed", "p_e1", "p_e0", "legacy_shift", "allocation"}
    _require_keys(data, known, "scenario")
    if "design" not in data:
        raise ValidationError("scenario: missing required field 'design'", field="design")
    shift = _get_number(data, "legacy_shift", "scenario", required=False)
    return SimScenario(
        population_size=int(_get_number(data, "population_size", "scenario")),
        q=_get_number(data, "q", "scenario"),
        cr12=_get_number(data, "cr12", "scenario"),
        cr21=_get_number(data, "cr21", "scenario"),
        rates=_strata_rates_from_dict(data.get("rates")),
        design=design_spec_from_dict(data["design"]),
        replicates=int(_get_number(data, "replicates", "scenario")),
        master_seed=int(_get_number(data, "master_seed", "scenario")),
        p_e1=_get_number(data, "p_e1", "scenario", required=False),
        p_e0=_get_number(data, "p_e0", "scenario", required=False),
        legacy_shift=0.0 if shift is None else shift,
        allocation=data.get("allocation", "bernoulli"),
    )


def load_scenario(path: str | Path) -> SimScenario:
    return scenario_from_dict(_load_json(path))


def load_checklist_items(path: str | Path) -> list[ChecklistItem]:
    data = _load_json(path)
    if isinstance(data, dict):
        data = data.get("items")
    if not isinstance(data, list):
        raise ValidationError(f"{path}: expected a list of checklist items")
    items = []
    for i, entry in enumerate(data):
        if not isinstance(entry, dict):
            raise ValidationError(f"{path}: item {i} is not an object")
        _require_keys(entry, {"category", "criterion", "evidence", "status"},
                      f"checklist item {i}")
        items.append(ChecklistItem(
            category=entry.get("category", ""),
            criterion=entry.get("criterion", ""),
            evidence=entry.get("evidence", ""),
            status=entry.get("status", "unknown"),
        ))
    return items
