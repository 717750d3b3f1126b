"""Prior-aware differentially private perturbation of 1D locations.

Discrete noise distributions over a 1D grid that bias perturbed locations
toward known points of interest, a symmetric geometric baseline to compare
against, verification of the privacy each construction actually delivers,
analytic utility metrics, and an end-to-end simulation harness.
"""

from .distributions import (
    KIND_GEOMETRIC,
    KIND_QUERY1,
    KIND_QUERY2,
    DiscretePmf,
    build_geometric_pmf,
    build_query1_pmf,
    build_query2_pmf,
    closed_form_p_q1,
    closed_form_p_q2_approx,
    sample,
    shift_to_absolute,
)
from .errors import (
    AmbiguousRankingError,
    ContractError,
    DegeneratePriorError,
    LocPerturbError,
    NumericError,
    ParameterError,
    UnsupportedConfigurationError,
)
from .harness import Scenario, SimulationReport, compare_mechanisms, lbs_oracle, run_scenario
from .mechanisms import GeometricMechanism, Query1Mechanism, Query2Mechanism
from .metrics import (
    ToleranceRegion,
    compute_tolerance_limits,
    directional_mass_ratio,
    expected_displacement,
    expected_distance_error,
    ranking_preservation_mass,
)
from .params import GridSpec, PoiPrior, PrivacyParams
from .verify import (
    CheckResult,
    VerificationReport,
    check_pmf_validity,
    check_shape,
    measure_empirical_epsilon,
    oracle_normalizer,
    verify_pmf,
)

__version__ = "0.1.0"

__all__ = [
    "AmbiguousRankingError",
    "CheckResult",
    "ContractError",
    "DegeneratePriorError",
    "DiscretePmf",
    "GeometricMechanism",
    "GridSpec",
    "KIND_GEOMETRIC",
    "KIND_QUERY1",
    "KIND_QUERY2",
    "LocPerturbError",
    "NumericError",
    "ParameterError",
    "PoiPrior",
    "PrivacyParams",
    "Query1Mechanism",
    "Query2Mechanism",
    "Scenario",
    "SimulationReport",
    "ToleranceRegion",
    "UnsupportedConfigurationError",
    "VerificationReport",
    "build_geometric_pmf",
    "build_query1_pmf",
    "build_query2_pmf",
    "check_pmf_validity",
    "check_shape",
    "closed_form_p_q1",
    "closed_form_p_q2_approx",
    "compare_mechanisms",
    "compute_tolerance_limits",
    "directional_mass_ratio",
    "expected_displacement",
    "expected_distance_error",
    "lbs_oracle",
    "measure_empirical_epsilon",
    "oracle_normalizer",
    "ranking_preservation_mass",
    "run_scenario",
    "sample",
    "shift_to_absolute",
    "verify_pmf",
]
