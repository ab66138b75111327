"""Coverage probability of finite 3-D networks uniformly deployed in a cylinder.

Exact analytic pipeline (pair-distance distribution -> serving-link order
statistics -> interference Laplace transform -> coverage integral), a
seedable Monte Carlo oracle, and an infinite-field Poisson baseline.
"""

__version__ = "0.1.0"

from .coverage import CoverageResult, conditional_coverage, coverage_probability
from .distance import (
    DEFAULT_GRID_SIZE,
    TabulatedDistribution,
    build_cdf,
    cylinder_pair_pdf_closed,
    cylinder_pair_pdf_numeric,
    disk_pair_pdf,
    segment_pair_pdf,
)
from .errors import (
    DegenerateConditionError,
    DomainError,
    ScenarioFormatError,
    StaleCacheError,
    UnsupportedParameterError,
)
from .geometry import CylinderGeometry
from .interference import LaplaceEvaluation, inner_integral, laplace_with_derivatives
from .network import (
    ChannelModel,
    NetworkScenario,
    conditional_interferer_pdf,
    serving_distance_cdf,
    serving_distance_pdf,
)
from .ppp import PppModel, ppp_coverage, ppp_model_from_scenario
from .simulation import (
    SimulationEstimate,
    empirical_distance_histogram,
    sample_conditional_interferer_distances,
    sample_fading_gain,
    sample_pair_distances,
    sample_point,
    simulate_coverage,
    simulate_ppp_coverage,
)
from .special import (
    complete_E,
    complete_K,
    gamma_tail_series,
    incomplete_E,
    incomplete_F,
)

__all__ = [
    "CoverageResult",
    "CylinderGeometry",
    "ChannelModel",
    "DEFAULT_GRID_SIZE",
    "DegenerateConditionError",
    "DomainError",
    "LaplaceEvaluation",
    "NetworkScenario",
    "PppModel",
    "ScenarioFormatError",
    "SimulationEstimate",
    "StaleCacheError",
    "TabulatedDistribution",
    "UnsupportedParameterError",
    "build_cdf",
    "complete_E",
    "complete_K",
    "conditional_coverage",
    "conditional_interferer_pdf",
    "coverage_probability",
    "cylinder_pair_pdf_closed",
    "cylinder_pair_pdf_numeric",
    "disk_pair_pdf",
    "empirical_distance_histogram",
    "gamma_tail_series",
    "incomplete_E",
    "incomplete_F",
    "inner_integral",
    "laplace_with_derivatives",
    "ppp_coverage",
    "ppp_model_from_scenario",
    "sample_conditional_interferer_distances",
    "sample_fading_gain",
    "sample_pair_distances",
    "sample_point",
    "segment_pair_pdf",
    "serving_distance_cdf",
    "serving_distance_pdf",
    "simulate_coverage",
    "simulate_ppp_coverage",
]
