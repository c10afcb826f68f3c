"""Two-player planar target-defense game with a compact convex target set.

Classifies states via the barrier surface, solves the capture and escape
subgames for saddle-point feedback strategies and values, simulates
closed-loop play, and verifies the solutions numerically (HJI residuals,
finite differences, brute-force oracles).
"""

from .apollonius import (ApolloniusDisk, Dominance, GameState, SpeedRatio,
                         apollonius_disk, membership, verify_meeting_point)
from .degree_capture import (CaptureSolution, capture_point, capture_strategies,
                             capture_time, grad_value_capture,
                             hji_residual_capture, value_capture)
from .degree_escape import (DcSolverConfig, EscapeSolution,
                            brute_force_escape_point, certify_with_oracle,
                            escape_feasible, grad_value_escape,
                            hji_residual_escape, solve_escape_point, value_escape)
from .errors import (BracketingFailure, DegeneratePoint, DegenerateState,
                     GameError, Infeasible, NonConvergence, SchemaError,
                     SolverFailure, WrongSubspace)
from .geometry import (Circle, ConvexTarget, Ellipse, ImplicitSmooth, Point2,
                       contains, distance, project)
from .kind import (BarrierCurve, Classification, GameSpace, barrier_value,
                   circular_barrier_quartic, circular_barrier_value, classify,
                   trace_barrier_curve, validate_quartic_zero_set)
from .scenario import Scenario, load_scenario, parse_scenario
from .sim import (Captured, Custom, Escaped, FixedHeading, Optimal, Outcome,
                  SimConfig, Strategy, Timeout, TrajectoryRecord, run, step)

__version__ = "0.1.0"

__all__ = [
    "ApolloniusDisk", "BarrierCurve", "BracketingFailure", "Captured",
    "CaptureSolution", "Circle", "Classification", "ConvexTarget", "Custom",
    "DcSolverConfig", "DegeneratePoint", "DegenerateState", "Dominance",
    "Ellipse", "Escaped", "EscapeSolution", "FixedHeading", "GameError",
    "GameSpace", "GameState", "ImplicitSmooth", "Infeasible", "NonConvergence",
    "Optimal", "Outcome", "Point2", "Scenario", "SchemaError", "SimConfig",
    "SolverFailure", "SpeedRatio", "Strategy", "Timeout", "TrajectoryRecord",
    "WrongSubspace", "apollonius_disk", "barrier_value",
    "brute_force_escape_point", "capture_point", "capture_strategies",
    "capture_time", "certify_with_oracle", "circular_barrier_quartic",
    "circular_barrier_value", "classify", "contains", "distance",
    "escape_feasible", "grad_value_capture", "grad_value_escape",
    "hji_residual_capture", "hji_residual_escape", "load_scenario",
    "membership", "parse_scenario", "project", "run", "solve_escape_point",
    "step", "trace_barrier_curve", "validate_quartic_zero_set", "value_capture",
    "value_escape", "verify_meeting_point",
]
