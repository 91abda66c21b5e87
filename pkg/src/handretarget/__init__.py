"""Real-time hand motion retargeting: differential-IK QP with barrier-based
collision constraints, plus a nonlinear reference solver and evaluation
metrics."""

from .baseline import NlpParams, NlpResult, nonlinear_objective, solve_nonlinear
from .collision import (
    DistanceJacobianRow,
    DistanceResult,
    capsule_distance,
    distance_jacobian,
    segment_closest_points,
)
from .kinematics import (
    FkResult,
    LinkPose,
    forward_kinematics,
    keypoint_jacobian,
    point_jacobian,
    stacked_keypoint_jacobian,
)
from .metrics import (
    LatencyStats,
    MotionPreservationConfig,
    SafetyConfig,
    SafetyResult,
    build_report,
    cumulative_gain,
    default_anchors,
    latency_stats,
    motion_preservation,
    safety_score,
)
from .model import (
    CapsuleSpec,
    HandModel,
    JointSpec,
    KeypointSpec,
    ModelError,
    ModelSyntaxError,
    ModelValidationError,
    auto_collision_pairs,
    clamp,
    load_model,
    parse_model,
    serialize_model,
)
from .qp import QpError, QpProblem, QpSolution, QpStatus, solve, warm_start_solve
from .retarget import (
    KeypointFrame,
    RetargetParams,
    RetargetSession,
    StepResult,
    assemble_cbf_rows,
    assemble_joint_limit_rows,
    assemble_objective,
    run_session,
)
from .traces import (
    TRACE_KINDS,
    fixture_model,
    generate_trace,
    joint_trajectory,
    read_trace,
    write_trace,
)

__version__ = "0.1.0"
