"""Exact reduced dynamics of a pulse-controlled oscillator mode in an
Ornstein-Uhlenbeck bath, with cross-validating solvers, closed forms, and a
scenario catalog."""
from __future__ import annotations

from ._backend import backend_name
from .analytic import (
    SLOPE_FRAMES,
    DegenerateRootsError,
    PropagatorChain,
    SegmentCoefficients,
    analytic_no_control,
    analytic_rectangular,
    analytic_trajectory,
    mixing_weights,
    quadratic_roots,
    rectangular_chain,
    rectangular_log_magnitude,
)
from .experiments import (
    Assertion,
    Catalog,
    ComparisonReport,
    CurveSpec,
    FigureGroup,
    GroupReport,
    Scenario,
    export_csv,
    load_catalog,
    run_group,
    run_scenario,
    sup_distance,
    sweep,
)
from .model import (
    BathKernel,
    NoiseSpec,
    PulseProgram,
    RectangularPulse,
    SimulationConfig,
    SinePulse,
    Trajectory,
    ValidationError,
    ZeroEnergyPulse,
    kernel_eval,
    phase_integral,
    pulse_integral,
    pulse_value,
)
from .solver import (
    Grid,
    OdeState,
    SolverError,
    StiffnessWarning,
    build_grid,
    default_dt,
    markovian_limit,
    simulate,
    simulate_ode,
    simulate_quadrature,
    state_derivative,
)
from .validation import CheckResult, ValidationReport, check_names, run_validation

__version__ = "0.1.0"

__all__ = [
    "Assertion",
    "BathKernel",
    "Catalog",
    "CheckResult",
    "ComparisonReport",
    "CurveSpec",
    "DegenerateRootsError",
    "FigureGroup",
    "Grid",
    "GroupReport",
    "NoiseSpec",
    "OdeState",
    "PropagatorChain",
    "PulseProgram",
    "RectangularPulse",
    "SLOPE_FRAMES",
    "Scenario",
    "SegmentCoefficients",
    "SimulationConfig",
    "SinePulse",
    "SolverError",
    "StiffnessWarning",
    "Trajectory",
    "ValidationError",
    "ValidationReport",
    "ZeroEnergyPulse",
    "analytic_no_control",
    "analytic_rectangular",
    "analytic_trajectory",
    "backend_name",
    "build_grid",
    "check_names",
    "default_dt",
    "export_csv",
    "kernel_eval",
    "load_catalog",
    "markovian_limit",
    "mixing_weights",
    "phase_integral",
    "pulse_integral",
    "pulse_value",
    "quadratic_roots",
    "rectangular_chain",
    "rectangular_log_magnitude",
    "run_group",
    "run_scenario",
    "run_validation",
    "simulate",
    "simulate_ode",
    "simulate_quadrature",
    "state_derivative",
    "sup_distance",
    "sweep",
    "__version__",
]
