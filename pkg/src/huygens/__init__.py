"""Two-dimensional Huygens potentials with exact, finite heat kernels.

Integers ``0 = k_0 < ... < k_m`` and phases define basis functions
``cos(k_i p + phi_i)``; their Wronskian ``W`` gives the potential
``V = -2 (log W)'' / r**2``.  The heat-kernel coefficients of ``-Laplace + V``
are available in closed form and vanish beyond ``k_m``.
"""
from .errors import (
    DegenerateWronskianError,
    DivisionByZeroFunctionError,
    HuygensError,
    InvalidKDataError,
    ModeMismatchError,
    NearSingularEvaluation,
    NonPositiveTimeError,
    OriginError,
    QuadratureFailure,
    SingularRayError,
)
from .hadamard import (
    HadamardTable,
    SeparatedFunction,
    ba_eval,
    hadamard_table,
    heat_kernel_eval,
    log_term,
    log_term_series,
    u_eval,
)
from .scalars import EXACT, Mode, float_mode
from .spectral import angular_potential, apply_L, c_const, potential_eval, psi
from .trig import TrigPoly, TrigPoly2, TrigRational
from .wronskian import KData, full_wronskian, reduced_wronskian, wronskian

__all__ = [
    "HuygensError",
    "ModeMismatchError",
    "InvalidKDataError",
    "DegenerateWronskianError",
    "DivisionByZeroFunctionError",
    "NearSingularEvaluation",
    "OriginError",
    "NonPositiveTimeError",
    "SingularRayError",
    "QuadratureFailure",
    "Mode",
    "EXACT",
    "float_mode",
    "TrigPoly",
    "TrigPoly2",
    "TrigRational",
    "KData",
    "wronskian",
    "reduced_wronskian",
    "full_wronskian",
    "angular_potential",
    "apply_L",
    "psi",
    "c_const",
    "potential_eval",
    "HadamardTable",
    "SeparatedFunction",
    "hadamard_table",
    "u_eval",
    "heat_kernel_eval",
    "ba_eval",
    "log_term",
    "log_term_series",
]
