"""Click-counting statistics for multiplexed on-off photodetector arrays.

The package computes the exact click-number distribution of N on-off
detectors for a catalog of quantum light states, evaluates the sub-binomial
parameter Q_B next to Mandel's Q_M, simulates the detector array by seeded
Monte Carlo, and estimates both parameters with bootstrap uncertainty from
empirical click records.
"""

from . import errors
from .click_kernel import (
    ClickDistribution,
    DetectorConfig,
    NonclassicalityReport,
    binomial_reference,
    click_distribution,
    click_moments,
    mandel_q,
    nonclassicality_report,
    occupancy_distribution,
    qb_parameter,
)
from .estimators import (
    BootstrapInterval,
    EstimateReport,
    bootstrap_ci,
    empirical_frequencies,
    mandel_q_estimate,
    qb_estimate,
)
from .simulator import ClickSampleSet, sample_photon_number, simulate
from .states import (
    PhotonNumberDistribution,
    StateSpec,
    generating_function,
    make_distribution,
    photon_moments,
    state_from_dict,
)

__version__ = "0.1.0"

__all__ = [
    "BootstrapInterval",
    "ClickDistribution",
    "ClickSampleSet",
    "DetectorConfig",
    "EstimateReport",
    "NonclassicalityReport",
    "PhotonNumberDistribution",
    "StateSpec",
    "binomial_reference",
    "bootstrap_ci",
    "click_distribution",
    "click_moments",
    "empirical_frequencies",
    "errors",
    "generating_function",
    "make_distribution",
    "mandel_q",
    "mandel_q_estimate",
    "nonclassicality_report",
    "occupancy_distribution",
    "photon_moments",
    "qb_estimate",
    "qb_parameter",
    "sample_photon_number",
    "simulate",
    "state_from_dict",
]
