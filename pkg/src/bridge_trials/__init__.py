"""Trial design toolkit for data-reuse randomized evaluation of AI risk models."""

from .concordance import (
    ConcordanceEstimate,
    HighRiskLabeling,
    RiskRecord,
    bootstrap_ci,
    classify_top_fraction,
    concordance_rates,
    mcnemar_test,
    overlap_curve,
    paired_discordance,
    union_concordance,
)
from .design import (
    DesignResult,
    DesignSpec,
    LegacyTrial,
    StrataRates,
    data_reuse_plan,
    design_report,
    implied_effect,
    required_sample_size,
    simplified_reuse_size,
)
from .diagnostics import (
    BalanceReport,
    ChecklistItem,
    balance_report,
    checklist_catalog,
    render_checklist,
    render_checklist_text,
)
from .errors import BridgeError, DataFormatError, ValidationError
from .estimation import (
    DeltaEstimate,
    StratumArmData,
    TrialRecord,
    estimate_delta,
    pool_reused_and_new,
    superiority_test,
)
from .numeric import (
    RngStream,
    RoundingPolicy,
    chi_square1_sf,
    exact_binomial_two_sided,
    normal_cdf,
    normal_quantile,
)
from .simulator import (
    OperatingCharacteristics,
    Population,
    SimScenario,
    generate_population,
    operating_characteristics,
    run_bridge_trial,
    run_legacy_trial,
    simulate_with_trace,
)

__version__ = "0.1.0"
