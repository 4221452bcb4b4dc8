import json
from pathlib import Path

import pytest

from bridge_trials.design import DesignSpec, LegacyTrial, StrataRates

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"


def breast_cancer_spec(completion: float = 1.0, n1: float = 20392) -> DesignSpec:
    """The reference design: 2% control incidence, 30% relative risk
    reduction, 1:4 allocation, legacy trial of equal size.

    z_alpha is pinned to the conventional 1.96 used by the published
    calculator; the exact 0.975 quantile lands two patients lower.
    """
    rates = StrataRates(p_c1=0.014, p_c0=0.02, p_d1=0.014, p_d0=0.02)
    return DesignSpec(
        alpha=0.025, power=0.8, delta_margin=0.0,
        cr12=0.466, cr21=0.466, rates=rates, k2=0.25,
        legacy=LegacyTrial(n1=n1, k1=0.25, completion=completion),
        unit_cost=1500.0, direction="decrease", z_alpha=1.96,
    )


@pytest.fixture
def breast_spec() -> DesignSpec:
    return breast_cancer_spec()


@pytest.fixture
def breast_spec_dict() -> dict:
    return json.loads((CONFIG_DIR / "breast_cancer_design.json").read_text())
