"""Classical and Hamilton-Jacobi actions for a non-relativistic particle,
computed by closed form, shooting, direct path minimisation, minimisation over
launch points, and a grid solver for the Hamilton-Jacobi equation."""

from .errors import (
    BoundaryMinimumWarning,
    DivergenceError,
    DomainError,
    InvalidInputError,
    NoConvergenceError,
    NonSmoothFieldWarning,
    PartialTrajectoryError,
    StallWarning,
    UnsupportedOracleError,
)
from .euler_lagrange import (
    BvpSolution,
    DirectActionResult,
    Trajectory,
    el_action_direct,
    initial_velocity,
    solve_bvp_shooting,
    trajectory_family,
)
from .hj_pde import ActionField, SpatialGrid, pde_residual, sample_initial_action, solve_hj_pde
from .hopf_lax import (
    HopfLaxResult,
    LinearForm,
    SingularAt,
    Tabulated,
    hj_action_hopf_lax,
    hj_action_nested,
    minimizing_trajectory,
)
from .model import (
    Free,
    Harmonic,
    Linear,
    ModelSpec,
    analytic_el_action_linear,
    analytic_hj_action_linear,
    analytic_optimal_trajectory_linear,
    eval_lagrangian,
    eval_potential,
    linear_model,
)
from .pilot import (
    VelocityFieldView,
    analytic_view,
    field_constancy_report,
    field_view,
    integrate_pilot_trajectory,
    velocity_field,
)

__version__ = "0.1.0"

__all__ = [
    "ActionField",
    "BoundaryMinimumWarning",
    "BvpSolution",
    "DirectActionResult",
    "DivergenceError",
    "DomainError",
    "Free",
    "Harmonic",
    "HopfLaxResult",
    "InvalidInputError",
    "Linear",
    "LinearForm",
    "ModelSpec",
    "NoConvergenceError",
    "NonSmoothFieldWarning",
    "PartialTrajectoryError",
    "SingularAt",
    "SpatialGrid",
    "StallWarning",
    "Tabulated",
    "Trajectory",
    "UnsupportedOracleError",
    "VelocityFieldView",
    "analytic_el_action_linear",
    "analytic_hj_action_linear",
    "analytic_optimal_trajectory_linear",
    "analytic_view",
    "el_action_direct",
    "eval_lagrangian",
    "eval_potential",
    "field_constancy_report",
    "field_view",
    "hj_action_hopf_lax",
    "hj_action_nested",
    "initial_velocity",
    "integrate_pilot_trajectory",
    "linear_model",
    "minimizing_trajectory",
    "pde_residual",
    "sample_initial_action",
    "solve_bvp_shooting",
    "solve_hj_pde",
    "trajectory_family",
    "velocity_field",
]
