"""Independent checks of the identities behind the closed-form coefficients."""
from .exact import (
    check_cramer,
    check_darboux,
    check_eigen,
    check_goursat,
    check_series,
    check_transport_symbolic,
    check_unity,
    check_vanishing,
)
from .oracle import ORACLE_TOLERANCES, check_transport_oracle, sample_admissible_rays, transport_oracle_numeric
from .report import EXACT_PASS, FAIL, NUMERIC_PASS, VerifyReport
from .residual import ba_eigen_probe, check_heat_residual
from .suite import SUITES, resolve_suites, run_suite

__all__ = [
    "VerifyReport",
    "EXACT_PASS",
    "NUMERIC_PASS",
    "FAIL",
    "check_unity",
    "check_eigen",
    "check_darboux",
    "check_cramer",
    "check_transport_symbolic",
    "check_vanishing",
    "check_goursat",
    "check_series",
    "ORACLE_TOLERANCES",
    "transport_oracle_numeric",
    "check_transport_oracle",
    "sample_admissible_rays",
    "check_heat_residual",
    "ba_eigen_probe",
    "SUITES",
    "resolve_suites",
    "run_suite",
]
