"""Spinal-flexion balance model for a trotting quadruped.

Kinematics of a circular-arc spine, the support line of the stance diagonal,
the balancing flexion root, a phase-warped spine controller, a linear tilt
proxy and an experiment driver.
"""

from .balance import ComPosition, SupportLine, balance_distance, balance_state, dis_trace, signed_distance, support_line
from .errors import (
    ConfigError,
    ControllerParameterError,
    DegenerateSupportError,
    DomainError,
    FlexionRangeError,
    NoRootError,
    SpineBalanceError,
    SteppingError,
    TraceFormatError,
    TraceIOError,
)
from .experiment import ExperimentConfig, compare, run_cell, run_sweep, solve_for_config
from .gait import Diagonal, GaitParams, stance_schedule, stride_at
from .kinematics import DEFAULT_GEOMETRY, FlexionState, Footholds, RobotGeometry, StrideState, footholds, hind_displacement
from .solver import BalanceProblem, SolveResult, monotonicity_probe, solve_balance_flexion
from .spine_controller import (
    ControllerKind,
    Segment,
    SpineControllerParams,
    WarpState,
    flexion_at,
    flexion_trajectory,
    initial_state,
    run_controller,
    warp_factor,
)
from .tilt import BalanceMetrics, TiltParams, half_stride_metrics, simulate_tilt
from .trace_io import COLUMNS, SCHEMA_VERSION, ExperimentRecord, read_trace, write_trace

__version__ = "0.1.0"
