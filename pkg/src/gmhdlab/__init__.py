"""Numerical laboratory for a nonlocal 1-D MHD-type model.

The package bundles a spectral/finite-difference solver for the coupled
slope-field system, a Lagrangian trajectory tracker, closed-form evaluators
for the balanced parameter line, reduced companion ODEs, and a verification
harness that turns the model's structural claims into named, tolerance-bearing
assertions.
"""

__version__ = "0.1.0"

from .closedform import (
    ClosedFormContext,
    Lbar,
    Lbar0_quadratic,
    Lbar1_quadratic,
    TauMap,
    TStarResult,
    ZeroParamsSolution,
    jac_along,
    jac_origin_lam1_asymptote,
    make_context,
    omega_ode_residual,
    omega_solution,
    t_of_tau,
    tstar,
    ux_along,
    ux_norm_sq,
    zero_params_solution,
)
from .dynamics import (
    FieldState,
    Params,
    RunRecord,
    SERIES_COLUMNS,
    StepControl,
    Verdict,
    compute_I,
    energy,
    make_initial_state,
    rhs,
    run,
    step_rk4,
)
from .errors import (
    ConfigError,
    ConsistencyError,
    DomainError,
    Fault,
    NonFiniteError,
    PreconditionError,
    RegimeError,
    StepFault,
    TrajectoryFault,
)
from .grid import BC, Field, GridSpec, antiderivative, derivative, quadrature
from .lagrangian import (
    ConcavityResult,
    JacOrderResult,
    TrajectorySet,
    TrajectoryTracker,
    concavity_check,
    default_labels,
    jacorder_residual,
)
from .presets import (
    InitialData,
    PolyData,
    ZeroData,
    parse_preset,
    validate_zero_order,
)
from .reduced_ode import (
    ComparisonResult,
    RiccatiBoundResult,
    SuppressionResult,
    comparison_scenario,
    integrate_suppression,
    riccati_bound_check,
)
from .verify import (
    Check,
    Report,
    SCENARIO_IDS,
    SweepRow,
    run_scenario,
    scenario_defaults,
    sweep,
)

__all__ = [
    "__version__",
    "BC",
    "Check",
    "ClosedFormContext",
    "ComparisonResult",
    "ConcavityResult",
    "ConfigError",
    "ConsistencyError",
    "DomainError",
    "Fault",
    "Field",
    "FieldState",
    "GridSpec",
    "InitialData",
    "JacOrderResult",
    "Lbar",
    "Lbar0_quadratic",
    "Lbar1_quadratic",
    "NonFiniteError",
    "Params",
    "PolyData",
    "PreconditionError",
    "RegimeError",
    "Report",
    "RiccatiBoundResult",
    "RunRecord",
    "SCENARIO_IDS",
    "SERIES_COLUMNS",
    "StepControl",
    "StepFault",
    "SuppressionResult",
    "SweepRow",
    "TStarResult",
    "TauMap",
    "TrajectoryFault",
    "TrajectorySet",
    "TrajectoryTracker",
    "Verdict",
    "ZeroData",
    "ZeroParamsSolution",
    "antiderivative",
    "comparison_scenario",
    "compute_I",
    "concavity_check",
    "default_labels",
    "derivative",
    "energy",
    "jac_along",
    "jac_origin_lam1_asymptote",
    "jacorder_residual",
    "make_context",
    "make_initial_state",
    "omega_ode_residual",
    "omega_solution",
    "parse_preset",
    "quadrature",
    "rhs",
    "riccati_bound_check",
    "run",
    "run_scenario",
    "scenario_defaults",
    "step_rk4",
    "sweep",
    "t_of_tau",
    "tstar",
    "ux_along",
    "ux_norm_sq",
    "validate_zero_order",
    "zero_params_solution",
]
