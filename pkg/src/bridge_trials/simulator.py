"""Monte Carlo verification of the trial design's operating characteristics.

Generates synthetic populations with a controlled joint law of the two
models' high-risk flags and per-stratum potential outcomes, executes the
legacy trial followed by the data-reuse trial, and aggregates power,
type-I error, bias, and variance over replicates.

Populations are stored columnwise (numpy arrays over the flagged units;
never-flagged units are only counted) so a designed-scale replicate costs
a few vector operations.  Replicate r draws everything from the keyed
stream (master_seed, r) with fixed substreams for population, legacy
randomization, and recruitment, so results are independent of worker
count and execution order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .design import DesignSpec, DesignResult, StrataRates, design_report
from .errors import ValidationError
from .estimation import DeltaEstimate, StratumArmData, estimate_delta, superiority_test
from .numeric import RngStream, check_probability

__all__ = [
    "SimScenario",
    "SimUnit",
    "Population",
    "LegacyData",
    "OperatingCharacteristics",
    "ReplicateResult",
    "generate_population",
    "run_legacy_trial",
    "run_bridge_trial",
    "operating_characteristics",
    "simulate_with_trace",
]

# Stratum codes for flagged units.
STRATUM_C = 0   # flagged by both models
STRATUM_D = 1   # flagged only by the new model
STRATUM_E = 2   # flagged only by the legacy model

SUB_POPULATION = 0
SUB_LEGACY = 1
SUB_RECRUIT = 2


@dataclass(frozen=True)
class SimScenario:
    """Generative parameters plus the design under test.

    The top-level q/cr/rates describe the true population; the nested
    design carries the planning assumptions (usually identical, except in
    null or drift experiments).  ``legacy_shift`` is added to the
    concordant-stratum event probabilities of the legacy trial only.
    """

    population_size: int
    q: float
    cr12: float
    cr21: float
    rates: StrataRates
    design: DesignSpec
    replicates: int
    master_seed: int
    p_e1: Optional[float] = None
    p_e0: Optional[float] = None
    legacy_shift: float = 0.0
    allocation: str = "bernoulli"

    def __post_init__(self):
        if self.population_size < 1:
            raise ValidationError("population_size must be >= 1", field="population_size")
        if self.replicates < 1:
            raise ValidationError("replicates must be >= 1", field="replicates")
        if not 0.0 < self.q <= 1.0:
            raise ValidationError(f"q must lie in (0, 1], got {self.q!r}", field="q")
        check_probability(self.cr12, "cr12")
        check_probability(self.cr21, "cr21")
        if self.allocation not in ("bernoulli", "exact"):
            raise ValidationError(f"allocation must be 'bernoulli' or 'exact', "
                                  f"got {self.allocation!r}", field="allocation")
        for name in ("p_e1", "p_e0"):
            v = getattr(self, name)
            if v is not None:
                check_probability(v, name)
        self.joint_probabilities()
        for p in self._legacy_c_rates():
            check_probability(p, "legacy_shift-adjusted concordant rate")

    def joint_probabilities(self) -> tuple[float, float, float, float]:
        """(P(C), P(D), P(E), P(neither)); raises when inconsistent."""
        p_c = self.q * self.cr12
        p_d = self.q * (1.0 - self.cr12)
        if self.cr12 == 0.0:
            p_e = 0.0
        elif self.cr21 == 0.0:
            raise ValidationError("inconsistent concordance/prevalence configuration: "
                                  "cr12 > 0 requires cr21 > 0")
        else:
            p_e = self.q * self.cr12 * (1.0 / self.cr21 - 1.0)
        p_none = 1.0 - p_c - p_d - p_e
        if p_none < -1e-12:
            raise ValidationError(
                "inconsistent concordance/prevalence configuration: "
                f"implied P(legacy high risk) = {self.q * self.cr12 / self.cr21:.6g} > 1")
        return p_c, p_d, p_e, max(0.0, p_none)

    def stratum_rates(self, code: int) -> tuple[float, float]:
        """(treated, control) event rates for a stratum code."""
        r = self.rates
        if code == STRATUM_C:
            return r.p_c1, r.p_c0
        if code == STRATUM_D:
            return r.p_d1, r.p_d0
        return (self.p_e1 if self.p_e1 is not None else r.p_c1,
                self.p_e0 if self.p_e0 is not None else r.p_c0)

    def _legacy_c_rates(self) -> tuple[float, float]:
        return (self.rates.p_c1 + self.legacy_shift,
                self.rates.p_c0 + self.legacy_shift)


@dataclass(frozen=True)
class SimUnit:
    """One synthetic unit with both potential outcomes stored."""

    r1: int
    r2: int
    y0: int
    y1: int


class Population:
    """Column-oriented synthetic population.

    Units flagged by either model are materialized (stratum code plus both
    potential outcomes); the remainder are only counted, since they can
    never enter a trial.
    """

    def __init__(self, stratum: np.ndarray, y0: np.ndarray, y1: np.ndarray, n_unflagged: int):
        self.stratum = stratum
        self.y0 = y0
        self.y1 = y1
        self.n_unflagged = n_unflagged

    def __len__(self) -> int:
        return self.stratum.size + self.n_unflagged

    def joint_counts(self) -> dict[tuple[int, int], int]:
        """Counts of the (R1, R2) cells over the whole population."""
        return {
            (1, 1): int(np.sum(self.stratum == STRATUM_C)),
            (0, 1): int(np.sum(self.stratum == STRATUM_D)),
            (1, 0): int(np.sum(self.stratum == STRATUM_E)),
            (0, 0): self.n_unflagged,
        }

    def unit(self, i: int) -> SimUnit:
        """Materialize one flagged unit (diagnostics/tests only)."""
        code = int(self.stratum[i])
        return SimUnit(r1=int(code in (STRATUM_C, STRATUM_E)),
                       r2=int(code in (STRATUM_C, STRATUM_D)),
                       y0=int(self.y0[i]), y1=int(self.y1[i]))


@dataclass
class LegacyData:
    """Realized legacy-trial records, in randomization order."""

    stratum: np.ndarray   # STRATUM_C or STRATUM_E
    arm: np.ndarray
    outcome: np.ndarray
    unit_index: np.ndarray  # positions into the population's flagged arrays

    def __len__(self) -> int:
        return self.stratum.size


@dataclass(frozen=True)
class OperatingCharacteristics:
    rejection_rate: float
    mean_delta_hat: float
    empirical_variance: float
    mean_analytic_variance: float
    mean_n2_prime: float
    mean_reused: float
    mc_standard_error: float


@dataclass(frozen=True)
class ReplicateResult:
    replicate: int
    delta_hat: float
    variance: float
    rejected: bool
    reused: int
    recruited: int


def _bernoulli(rng: np.random.Generator, p: float, size: int) -> np.ndarray:
    return (rng.random(size) < p).astype(np.uint8)


def generate_population(scenario: SimScenario, stream: RngStream) -> Population:
    """Draw one synthetic population under the scenario's joint law."""
    rng = stream.generator(SUB_POPULATION)
    probs = scenario.joint_probabilities()
    n_c, n_d, n_e, n_none = (int(v) for v in rng.multinomial(scenario.population_size, probs))
    blocks = [(STRATUM_C, n_c), (STRATUM_D, n_d), (STRATUM_E, n_e)]
    stratum = np.concatenate([np.full(n, code, dtype=np.int8) for code, n in blocks]) \
        if n_c + n_d + n_e else np.empty(0, dtype=np.int8)
    y0 = np.empty(stratum.size, dtype=np.uint8)
    y1 = np.empty(stratum.size, dtype=np.uint8)
    offset = 0
    for code, n in blocks:
        p1, p0 = scenario.stratum_rates(code)
        y1[offset:offset + n] = _bernoulli(rng, p1, n)
        y0[offset:offset + n] = _bernoulli(rng, p0, n)
        offset += n
    return Population(stratum, y0, y1, n_none)


def _assign_arms(rng: np.random.Generator, n: int, k: float, allocation: str) -> np.ndarray:
    if allocation == "exact":
        n_treat = math.floor(n * k / (k + 1.0) + 0.5)
        arms = np.zeros(n, dtype=np.uint8)
        arms[:n_treat] = 1
        return arms
    return _bernoulli(rng, k / (k + 1.0), n)


def run_legacy_trial(population: Population, scenario: SimScenario,
                     stream: RngStream) -> LegacyData:
    """Enroll and randomize the legacy trial on units the legacy model flags.

    Realized outcomes are the stored potential outcomes, except that a
    nonzero ``legacy_shift`` redraws concordant-stratum outcomes at the
    shifted rates (the drift experiment).
    """
    design = scenario.design
    n1 = int(round(design.legacy.n1)) if design.legacy is not None else 0
    if n1 == 0:
        empty = np.empty(0, dtype=np.uint8)
        return LegacyData(np.empty(0, dtype=np.int8), empty, empty,
                          np.empty(0, dtype=np.int64))
    rng = stream.generator(SUB_LEGACY)
    eligible = np.flatnonzero((population.stratum == STRATUM_C)
                              | (population.stratum == STRATUM_E))
    if eligible.size < n1:
        raise ValidationError(
            f"population has {eligible.size} legacy-eligible units; {n1} required")
    enrolled = eligible[rng.permutation(eligible.size)[:n1]]
    k1 = design.legacy.k1
    arms = _assign_arms(rng, n1, k1, scenario.allocation)
    outcome = np.where(arms == 1, population.y1[enrolled],
                       population.y0[enrolled]).astype(np.uint8)
    stratum = population.stratum[enrolled]
    if scenario.legacy_shift != 0.0:
        p1, p0 = scenario._legacy_c_rates()
        in_c = stratum == STRATUM_C
        n_c = int(np.sum(in_c))
        shifted = np.where(arms[in_c] == 1, _bernoulli(rng, p1, n_c),
                           _bernoulli(rng, p0, n_c)).astype(np.uint8)
        outcome[in_c] = shifted
    return LegacyData(stratum=stratum, arm=arms, outcome=outcome, unit_index=enrolled)


def _take_fresh(rng: np.random.Generator, pool: np.ndarray, needed: int,
                label: str) -> np.ndarray:
    if pool.size < needed:
        raise ValidationError(
            f"population exhausted: {label} recruitment needs {needed}, "
            f"only {pool.size} available")
    return pool[rng.permutation(pool.size)[:needed]]


def _cell_counts(arms: np.ndarray, outcomes: np.ndarray) -> dict[int, tuple[int, int]]:
    out = {}
    for arm in (1, 0):
        m = arms == arm
        out[arm] = (int(np.sum(m)), int(np.sum(outcomes[m])))
    return out


def run_bridge_trial(legacy: LegacyData, population: Population, scenario: SimScenario,
                     stream: RngStream,
                     plan: Optional[DesignResult] = None) -> tuple[DeltaEstimate, int, int]:
    """Execute the data-reuse trial and test the effect against the margin.

    Consumes concordant legacy records in randomization order up to the
    plan's per-arm reuse counts, tops up any concordant deficit with fresh
    units, recruits the discordant stratum fresh, and runs the stratified
    test.  Returns (estimate, records_reused, records_recruited).
    """
    design = scenario.design
    if plan is None:
        plan = design_report(design)
    rng = stream.generator(SUB_RECRUIT)
    cells = plan.cells

    # Reuse: concordant legacy records by arm, in their recorded order.
    reused_counts: dict[int, tuple[int, int]] = {}
    for arm, planned in ((1, plan.reuse_treat), (0, plan.reuse_control)):
        idx = np.flatnonzero((legacy.stratum == STRATUM_C) & (legacy.arm == arm))[:planned]
        reused_counts[arm] = (idx.size, int(np.sum(legacy.outcome[idx])))

    fresh_c_needed = {arm: cells[key] - reused_counts[arm][0]
                      for arm, key in ((1, "c_treat"), (0, "c_control"))}
    d_needed = {1: cells["d_treat"], 0: cells["d_control"]}

    in_legacy = np.zeros(population.stratum.size, dtype=bool)
    if len(legacy):
        in_legacy[legacy.unit_index] = True
    c_pool = np.flatnonzero((population.stratum == STRATUM_C) & ~in_legacy)
    d_pool = np.flatnonzero(population.stratum == STRATUM_D)

    def recruit(pool: np.ndarray, needed: dict[int, int], label: str) -> dict[int, tuple[int, int]]:
        total = needed[0] + needed[1]
        if scenario.allocation == "exact":
            chosen = _take_fresh(rng, pool, total, label)
            arms = np.zeros(total, dtype=np.uint8)
            arms[:needed[1]] = 1
        else:
            chosen = _take_fresh(rng, pool, total, label)
            arms = _assign_arms(rng, total, design.k2, "bernoulli")
        outcomes = np.where(arms == 1, population.y1[chosen],
                            population.y0[chosen]).astype(np.uint8)
        return _cell_counts(arms, outcomes)

    fresh_c = recruit(c_pool, fresh_c_needed, "concordant stratum") \
        if (fresh_c_needed[0] + fresh_c_needed[1]) > 0 else {1: (0, 0), 0: (0, 0)}
    fresh_d = recruit(d_pool, d_needed, "discordant stratum") \
        if (d_needed[0] + d_needed[1]) > 0 else {1: (0, 0), 0: (0, 0)}

    data = []
    for arm in (1, 0):
        n_c = reused_counts[arm][0] + fresh_c[arm][0]
        e_c = reused_counts[arm][1] + fresh_c[arm][1]
        if n_c or design.cr12 > 0.0:
            data.append(StratumArmData(stratum="C", arm=arm, n=n_c, events=e_c))
        if fresh_d[arm][0] or design.cr12 < 1.0:
            data.append(StratumArmData(stratum="D", arm=arm, n=fresh_d[arm][0],
                                       events=fresh_d[arm][1]))

    delta_raw, variance = estimate_delta(data, design.cr12)
    sign = 1.0 if design.direction == "increase" else -1.0
    estimate = superiority_test(sign * delta_raw, variance, design.delta_margin,
                                design.alpha, design.cr12)
    reused_total = reused_counts[1][0] + reused_counts[0][0]
    recruited_total = (fresh_c[1][0] + fresh_c[0][0] + fresh_d[1][0] + fresh_d[0][0])
    return estimate, reused_total, recruited_total


def _run_replicate(scenario: SimScenario, replicate: int,
                   plan: DesignResult) -> ReplicateResult:
    stream = RngStream(scenario.master_seed, replicate)
    population = generate_population(scenario, stream)
    if scenario.design.legacy is not None and plan.reuse_total > 0:
        legacy = run_legacy_trial(population, scenario, stream)
    else:
        empty = np.empty(0, dtype=np.uint8)
        legacy = LegacyData(np.empty(0, dtype=np.int8), empty, empty,
                            np.empty(0, dtype=np.int64))
    estimate, reused, recruited = run_bridge_trial(legacy, population, scenario,
                                                   stream, plan)
    return ReplicateResult(replicate=replicate, delta_hat=estimate.delta_hat,
                           variance=estimate.variance, rejected=estimate.rejected,
                           reused=reused, recruited=recruited)


def _run_block(args: tuple[SimScenario, int, int]) -> list[ReplicateResult]:
    scenario, start, stop = args
    plan = design_report(scenario.design)
    return [_run_replicate(scenario, r, plan) for r in range(start, stop)]


def simulate_with_trace(scenario: SimScenario, workers: int = 1) -> tuple[OperatingCharacteristics, list[ReplicateResult]]:
    """Run every replicate and return aggregates plus the per-replicate trace."""
    if workers < 1:
        raise ValidationError("workers must be >= 1", field="workers")
    n = scenario.replicates
    if workers == 1 or n < 4 * workers:
        rows = _run_block((scenario, 0, n))
    else:
        bounds = np.linspace(0, n, workers + 1).astype(int)
        blocks = [(scenario, int(a), int(b)) for a, b in zip(bounds, bounds[1:]) if a < b]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = [row for block in pool.map(_run_block, blocks) for row in block]
    rows.sort(key=lambda r: r.replicate)

    delta = np.array([r.delta_hat for r in rows])
    var = np.array([r.variance for r in rows])
    rejected = np.array([r.rejected for r in rows])
    rate = float(np.mean(rejected))
    return OperatingCharacteristics(
        rejection_rate=rate,
        mean_delta_hat=float(np.mean(delta)),
        empirical_variance=float(np.var(delta, ddof=1)) if n > 1 else 0.0,
        mean_analytic_variance=float(np.mean(var)),
        mean_n2_prime=float(np.mean([r.recruited for r in rows])),
        mean_reused=float(np.mean([r.reused for r in rows])),
        mc_standard_error=math.sqrt(rate * (1.0 - rate) / n),
    ), rows


def operating_characteristics(scenario: SimScenario, workers: int = 1) -> OperatingCharacteristics:
    """Aggregate operating characteristics over all replicates."""
    oc, _ = simulate_with_trace(scenario, workers=workers)
    return oc
