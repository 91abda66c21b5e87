"""Per-step QP assembly and the closed-loop retargeting session.

Each control step linearizes keypoint tracking around the previous
configuration and solves

    min  0.5 dq' H dq + g' dq      H = 2 (alpha J'J + beta I)
    s.t. A dq <= b                 g = -2 alpha J' (v - f(q))

with joint-limit rows [I; -I] bounded by the remaining travel to each limit,
plus one barrier row per monitored capsule pair whose clearance has fallen
below the activation distance:

    -J_dist dq <= gamma*dt * (h - D_safe)

The barrier protects the shifted set {h >= D_safe}; setting D_safe = 0
recovers the raw no-penetration condition. The integrated configuration is
clamped defensively; sessions record the correction so tests can assert it
stays within solver tolerance.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass

import numpy as np

from . import qp
from .collision import all_pair_distances, distance_jacobian
from .kinematics import forward_kinematics, stacked_keypoint_jacobian
from .model import HandModel, clamp


@dataclass(frozen=True)
class RetargetParams:
    """Weights, rates, and safety thresholds for the control loop."""

    alpha: float = 1.0
    beta: float = 0.01
    dt: float = 0.01
    cbf_enabled: bool = True
    gamma: float = 5.0
    safety_threshold: float = 0.01     # D_safe (m): protected clearance
    activation_distance: float = 0.011  # d_act (m): rows emitted below this
    keypoint_scale: float = 1.0

    def __post_init__(self):
        if self.alpha <= 0.0 or self.beta <= 0.0:
            raise ValueError("alpha and beta must be > 0")
        if self.dt <= 0.0 or self.gamma <= 0.0:
            raise ValueError("dt and gamma must be > 0")
        if self.keypoint_scale <= 0.0:
            raise ValueError("keypoint_scale must be > 0")
        if self.activation_distance < self.safety_threshold:
            raise ValueError(
                "activation_distance must be >= safety_threshold "
                f"({self.activation_distance} < {self.safety_threshold})"
            )
        if self.gamma * self.dt > 1.0:
            warnings.warn(
                f"gamma*dt = {self.gamma * self.dt:.3f} > 1 overshoots the "
                "linear decay condition",
                stacklevel=2,
            )

    @property
    def gamma_dt(self) -> float:
        return self.gamma * self.dt


@dataclass(frozen=True, eq=False)
class KeypointFrame:
    """One human-hand observation, expressed in the model base frame."""

    timestamp: float
    keypoints: np.ndarray  # (N, 3) meters

    def __post_init__(self):
        kp = np.asarray(self.keypoints, dtype=float)
        if kp.ndim != 2 or kp.shape[1] != 3:
            raise ValueError(f"keypoints have shape {kp.shape}, expected (N, 3)")
        if not np.all(np.isfinite(kp)):
            raise ValueError("keypoints contain non-finite values")
        object.__setattr__(self, "keypoints", kp)


@dataclass(frozen=True, eq=False)
class StepResult:
    """Outcome of one control step (post-integration state and diagnostics).

    ``pair_clearances`` follows the model's monitored-pair order and
    ``robot_keypoints`` carries the post-step keypoint positions, so report
    assembly and the streaming service never re-run forward kinematics.
    """

    q: np.ndarray
    dq: np.ndarray
    solve_latency: float          # assembly + solve wall time (s)
    h_min: float                  # min raw clearance at the new q (m)
    active_cbf_pairs: tuple
    qp_status: str
    tracking_error: float         # RMS keypoint error at the new q (m)
    normal_fallback: bool = False
    clamp_correction: float = 0.0
    pair_clearances: tuple = ()
    robot_keypoints: np.ndarray | None = None


def assemble_objective(model: HandModel, fk, frame: KeypointFrame, params: RetargetParams):
    """Quadratic tracking objective (H, g); frame keypoints must be pre-scaled."""
    if frame.keypoints.shape[0] != len(model.keypoints):
        raise ValueError(
            f"frame has {frame.keypoints.shape[0]} keypoints, model expects "
            f"{len(model.keypoints)}"
        )
    jac = stacked_keypoint_jacobian(model, fk)
    dv = (frame.keypoints - fk.keypoint_positions).ravel()
    h_mat = 2.0 * (params.alpha * jac.T @ jac + params.beta * np.eye(model.n_q))
    g_vec = -2.0 * params.alpha * jac.T @ dv
    return h_mat, g_vec


def assemble_joint_limit_rows(model: HandModel, q):
    """Box rows [I; -I] dq <= [q_u - q; q - q_l]."""
    q = np.asarray(q, dtype=float)
    eye = np.eye(model.n_q)
    a_mat = np.vstack([eye, -eye])
    b_vec = np.concatenate([model.upper_limits - q, q - model.lower_limits])
    return a_mat, b_vec


def assemble_cbf_rows(model: HandModel, fk, params: RetargetParams, prev_normals=None):
    """Barrier rows for every monitored pair at or below the activation gate."""
    a_mat, b_vec, pairs, _ = _assemble_cbf_rows_detailed(
        model, fk, params, prev_normals
    )
    return a_mat, b_vec, pairs


def _assemble_cbf_rows_detailed(model, fk, params, prev_normals=None):
    rows, bounds, pairs = [], [], []
    results = all_pair_distances(model, fk, fallback_normals=prev_normals)
    for d in results:
        if d.h > params.activation_distance:
            continue
        jrow = distance_jacobian(model, fk, d)
        rows.append(-jrow.row)
        bounds.append(params.gamma_dt * (d.h - params.safety_threshold))
        pairs.append(d.pair)
    a_mat = np.array(rows).reshape(len(rows), model.n_q)
    return a_mat, np.array(bounds), tuple(pairs), results


class RetargetSession:
    """Owns one closed-loop state: configuration, warm start, normal memory.

    Sessions are single-threaded; multiple sessions over the same immutable
    model may run concurrently. ``step`` never blocks on I/O.
    """

    def __init__(self, model: HandModel, params: RetargetParams, q0=None):
        self.model = model
        self.params = params
        self.q = clamp(model, np.zeros(model.n_q) if q0 is None else np.asarray(q0, dtype=float))
        self._initial_q = self.q.copy()
        self._warm_tokens: tuple = ()
        self._prev_normals: dict = {}
        self._fk = None  # FK at self.q, carried over from the previous step

    def reset(self, q0=None):
        self.q = self._initial_q.copy() if q0 is None else clamp(self.model, q0)
        self._warm_tokens = ()
        self._prev_normals = {}
        self._fk = None

    def set_params(self, params: RetargetParams):
        """Swap parameters between steps (never mid-solve)."""
        self.params = params
        self._warm_tokens = ()

    def step(self, frame: KeypointFrame) -> StepResult:
        model, params = self.model, self.params
        q_prev = self.q

        t_start = time.perf_counter()
        fk = self._fk if self._fk is not None else forward_kinematics(model, q_prev)
        scaled = KeypointFrame(frame.timestamp, frame.keypoints * params.keypoint_scale)
        h_mat, g_vec = assemble_objective(model, fk, scaled, params)
        a_jl, b_jl = assemble_joint_limit_rows(model, q_prev)
        n_jl = a_jl.shape[0]
        if params.cbf_enabled:
            a_cbf, b_cbf, pairs, dists = _assemble_cbf_rows_detailed(
                model, fk, params, self._prev_normals
            )
            a_mat = np.vstack([a_jl, a_cbf])
            b_vec = np.concatenate([b_jl, b_cbf])
            fallback = any(d.degenerate for d in dists if d.pair in pairs)
        else:
            a_mat, b_vec, pairs, fallback = a_jl, b_jl, (), False

        problem = qp.QpProblem(H=h_mat, g=g_vec, A=a_mat, b=b_vec)
        hint = self._hint_rows(pairs, n_jl)
        sol = qp.warm_start_solve(problem, hint)
        dq = np.zeros(model.n_q) if sol.status is qp.QpStatus.INFEASIBLE else sol.x
        q_new = clamp(model, q_prev + dq)
        latency = time.perf_counter() - t_start

        clamp_corr = float(np.max(np.abs(q_new - (q_prev + dq)))) if model.n_q else 0.0
        fk_new = forward_kinematics(model, q_new)
        err = scaled.keypoints - fk_new.keypoint_positions
        tracking = float(np.sqrt(np.mean(np.sum(err * err, axis=1)))) if len(err) else 0.0

        clearances = []
        h_min = np.inf
        for d in all_pair_distances(model, fk_new):
            clearances.append(d.h)
            h_min = min(h_min, d.h)
            if not d.degenerate:
                self._prev_normals[d.pair] = d.normal

        self.q = q_new
        self._fk = fk_new
        self._warm_tokens = tuple(
            ("jl", idx) if idx < n_jl else ("cbf", pairs[idx - n_jl])
            for idx in sol.active_set
        )
        return StepResult(
            q=q_new,
            dq=dq,
            solve_latency=latency,
            h_min=float(h_min),
            active_cbf_pairs=pairs,
            qp_status=sol.status.value,
            tracking_error=tracking,
            normal_fallback=fallback,
            clamp_correction=clamp_corr,
            pair_clearances=tuple(clearances),
            robot_keypoints=fk_new.keypoint_positions,
        )

    def _hint_rows(self, pairs: tuple, n_jl: int) -> tuple:
        pair_row = {pair: n_jl + k for k, pair in enumerate(pairs)}
        hint = []
        for token in self._warm_tokens:
            kind, key = token
            if kind == "jl":
                hint.append(key)
            elif key in pair_row:
                hint.append(pair_row[key])
        return tuple(hint)


def run_session(model: HandModel, params: RetargetParams, frames, q0=None):
    """Step through a timestamp-ordered frame stream, yielding one result each."""
    session = RetargetSession(model, params, q0=q0)
    last_t = None
    for frame in frames:
        if last_t is not None and frame.timestamp <= last_t:
            raise ValueError(
                f"non-monotone timestamps: {frame.timestamp} after {last_t}"
            )
        last_t = frame.timestamp
        yield session.step(frame)
