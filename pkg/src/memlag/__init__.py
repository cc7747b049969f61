"""Lagrangian compilation and analysis of memory-element circuits.

The package turns a netlist of memristors, meminductors, memcapacitors,
and linear R/L/C elements into a Lagrangian over integrated loop charges
or integrated node fluxes, checks whether a given second-order form is
derivable from such a Lagrangian, integrates the equations of motion, and
reconstructs per-element waveforms with their hysteresis signatures.
"""

from .constitutive import (
    ALLOWED_MODULATIONS,
    Element,
    ElementKind,
    Modulation,
    ScalarCurve,
    SourceWaveform,
    curve_antideriv,
    curve_deriv,
    curve_eval,
    curve_inverse,
    format_curve_literal,
    format_domain_literal,
    incremental_value,
    legendre_residual,
    parse_curve_literal,
    parse_domain_literal,
)
from .errors import (
    AlgebraicSolveError,
    CircuitValidationError,
    CurveDomainError,
    CurveError,
    CurveRangeError,
    DegenerateInertiaError,
    DomainExitError,
    MemlagError,
    NetlistError,
    NetlistSyntaxError,
    NumericError,
    StepUnderflowError,
)
from .lagrangian import (
    ABDecomposition,
    FirstOrderSystem,
    LagrangianSystem,
    build_loop_system,
    build_node_system,
    el_residual,
    extract_AB,
    naive_path_lagrangian,
    to_first_order,
)
from .netlist import Circuit, Diagnostic, Diagnostics, parse, serialize, validate
from .selfadjoint import (
    CONDITION_NAMES,
    ConditionResult,
    SAReport,
    check_self_adjoint,
    default_region,
)
from .sim import (
    ElementRecord,
    ElementWaveforms,
    PinchReport,
    Trajectory,
    branch_waveforms,
    drive_csv,
    drive_element,
    ikvl_residual,
    integrate,
    pinch_check,
    traversed_gain_bound,
    waveforms_csv,
)

__version__ = "0.1.0"

__all__ = [
    "ALLOWED_MODULATIONS",
    "ABDecomposition",
    "AlgebraicSolveError",
    "Circuit",
    "CircuitValidationError",
    "CONDITION_NAMES",
    "ConditionResult",
    "CurveDomainError",
    "CurveError",
    "CurveRangeError",
    "DegenerateInertiaError",
    "Diagnostic",
    "Diagnostics",
    "DomainExitError",
    "Element",
    "ElementKind",
    "ElementRecord",
    "ElementWaveforms",
    "FirstOrderSystem",
    "LagrangianSystem",
    "MemlagError",
    "Modulation",
    "NetlistError",
    "NetlistSyntaxError",
    "NumericError",
    "PinchReport",
    "SAReport",
    "ScalarCurve",
    "SourceWaveform",
    "StepUnderflowError",
    "Trajectory",
    "branch_waveforms",
    "build_loop_system",
    "build_node_system",
    "check_self_adjoint",
    "curve_antideriv",
    "curve_deriv",
    "curve_eval",
    "curve_inverse",
    "default_region",
    "drive_csv",
    "drive_element",
    "el_residual",
    "extract_AB",
    "format_curve_literal",
    "format_domain_literal",
    "ikvl_residual",
    "incremental_value",
    "integrate",
    "legendre_residual",
    "naive_path_lagrangian",
    "parse",
    "parse_curve_literal",
    "parse_domain_literal",
    "pinch_check",
    "serialize",
    "to_first_order",
    "traversed_gain_bound",
    "validate",
    "waveforms_csv",
    "__version__",
]
