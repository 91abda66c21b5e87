"""Reference solver for the original nonlinear tracking objective.

Minimizes  alpha * sum_i ||v_i - f_i(q)||^2 + beta * ||q - q_prev||^2  over
the joint-limit box with projected Gauss-Newton and a backtracking line
search. Serves as the fidelity oracle and the latency comparison counterpart
for the per-step QP path; it carries no collision terms.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .kinematics import forward_kinematics, stacked_keypoint_jacobian
from .model import HandModel, clamp
from .retarget import KeypointFrame

_ARMIJO = 1e-4
_MIN_STEP = 1e-12


@dataclass(frozen=True)
class NlpParams:
    alpha: float = 1.0
    beta: float = 0.01
    max_iterations: int = 100
    gradient_tolerance: float = 1e-7
    line_search_shrink: float = 0.5

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.gradient_tolerance <= 0.0:
            raise ValueError("gradient_tolerance must be > 0")
        if not 0.0 < self.line_search_shrink < 1.0:
            raise ValueError("line_search_shrink must be in (0, 1)")


@dataclass(frozen=True, eq=False)
class NlpResult:
    q: np.ndarray
    iterations: int
    latency_s: float


def nonlinear_objective(model: HandModel, q, q_prev, keypoints, alpha: float, beta: float) -> float:
    """Tracking-plus-smoothness cost at configuration ``q``."""
    fk = forward_kinematics(model, q)
    r = np.asarray(keypoints, dtype=float) - fk.keypoint_positions
    dq = np.asarray(q, dtype=float) - np.asarray(q_prev, dtype=float)
    return alpha * float(np.sum(r * r)) + beta * float(dq @ dq)


def run_baseline_session(model: HandModel, params: NlpParams, frames, q0=None, keypoint_scale: float = 1.0):
    """Closed-loop replay through the nonlinear solver, one result per frame.

    Yields per-step records shaped like the QP path's step results (joint
    state, latency, fresh-FK clearance and tracking error) so the two paths
    share logging and report assembly.
    """
    from .collision import capsule_distance  # local import avoids a cycle

    q = clamp(model, np.zeros(model.n_q) if q0 is None else np.asarray(q0, dtype=float))
    for frame in frames:
        scaled = KeypointFrame(frame.timestamp, frame.keypoints * keypoint_scale)
        res = solve_nonlinear(model, q, scaled, params)
        dq = res.q - q
        q = res.q
        fk = forward_kinematics(model, q)
        err = scaled.keypoints - fk.keypoint_positions
        tracking = float(np.sqrt(np.mean(np.sum(err * err, axis=1)))) if len(err) else 0.0
        clearances = tuple(
            capsule_distance(model, fk, pair).h for pair in model.collision_pairs
        )
        yield BaselineStep(
            q=q.copy(),
            dq=dq,
            solve_latency=res.latency_s,
            h_min=float(min(clearances)) if clearances else float("inf"),
            tracking_error=tracking,
            iterations=res.iterations,
            pair_clearances=clearances,
            robot_keypoints=fk.keypoint_positions,
        )


@dataclass(frozen=True, eq=False)
class BaselineStep:
    q: np.ndarray
    dq: np.ndarray
    solve_latency: float
    h_min: float
    tracking_error: float
    iterations: int
    pair_clearances: tuple
    robot_keypoints: np.ndarray


def solve_nonlinear(
    model: HandModel, q_prev, frame: KeypointFrame, params: NlpParams
) -> NlpResult:
    """Projected Gauss-Newton descent; always returns the best iterate.

    Terminates when the projected gradient falls below the tolerance or the
    iteration cap is hit (reported via ``iterations == max_iterations``).
    Every returned configuration satisfies the limits exactly.
    """
    q_prev = np.asarray(q_prev, dtype=float)
    targets = frame.keypoints
    alpha, beta = params.alpha, params.beta

    t_start = time.perf_counter()
    q = clamp(model, q_prev)
    f_cur = nonlinear_objective(model, q, q_prev, targets, alpha, beta)
    iterations = 0
    for _ in range(params.max_iterations):
        iterations += 1
        fk = forward_kinematics(model, q)
        jac = stacked_keypoint_jacobian(model, fk)
        r = (targets - fk.keypoint_positions).ravel()
        grad = -2.0 * alpha * jac.T @ r + 2.0 * beta * (q - q_prev)

        projected = q - clamp(model, q - grad)
        if np.max(np.abs(projected)) < params.gradient_tolerance:
            break

        gn = alpha * jac.T @ jac + beta * np.eye(model.n_q)
        direction = np.linalg.solve(gn, alpha * jac.T @ r - beta * (q - q_prev))

        step = 1.0
        while step >= _MIN_STEP:
            trial = clamp(model, q + step * direction)
            move = trial - q
            f_trial = nonlinear_objective(model, trial, q_prev, targets, alpha, beta)
            if f_trial <= f_cur + _ARMIJO * float(grad @ move):
                q, f_cur = trial, f_trial
                break
            step *= params.line_search_shrink
        else:
            break  # no acceptable step: numerically stationary

    return NlpResult(q=q, iterations=iterations, latency_s=time.perf_counter() - t_start)
