import numpy as np
import pytest

from handretarget import (
    KeypointFrame,
    NlpParams,
    RetargetParams,
    forward_kinematics,
    nonlinear_objective,
    solve_nonlinear,
)

RNG = np.random.default_rng(4242)


def frame_at(model, q, t=0.0):
    fk = forward_kinematics(model, q)
    return KeypointFrame(timestamp=t, keypoints=fk.keypoint_positions.copy())


def test_params_validation():
    with pytest.raises(ValueError):
        NlpParams(max_iterations=0)
    with pytest.raises(ValueError):
        NlpParams(gradient_tolerance=0.0)
    with pytest.raises(ValueError):
        NlpParams(line_search_shrink=1.0)


def test_stationary_at_current_pose(hand16):
    q = RNG.uniform(hand16.lower_limits, hand16.upper_limits)
    res = solve_nonlinear(hand16, q, frame_at(hand16, q), NlpParams())
    assert np.max(np.abs(res.q - q)) < 1e-9
    assert res.iterations <= 2


def test_single_joint_matches_analytic_inverse(single_joint_model):
    """Keypoint at radius 0.2 about z: the reachable circle has a closed form."""
    for target_angle in [-1.2, -0.3, 0.7, 2.0]:
        target = np.array(
            [
                [
                    0.1 + 0.2 * np.cos(target_angle),
                    0.2 * np.sin(target_angle),
                    0.0,
                ]
            ]
        )
        res = solve_nonlinear(
            single_joint_model,
            np.zeros(1),
            KeypointFrame(0.0, target),
            NlpParams(beta=1e-9, gradient_tolerance=1e-12, max_iterations=200),
        )
        assert abs(res.q[0] - target_angle) < 1e-6


def test_monotone_descent_and_box_feasibility(hand16):
    params = NlpParams(max_iterations=60)
    q_prev = np.zeros(16)
    target = frame_at(hand16, RNG.uniform(hand16.lower_limits, hand16.upper_limits))

    # instrument descent via the public objective on the solver's own path:
    # run with increasing iteration caps and check monotone objective values
    objs = []
    for cap in range(1, 12):
        res = solve_nonlinear(
            hand16, q_prev, target, NlpParams(max_iterations=cap)
        )
        assert np.all(res.q >= hand16.lower_limits)
        assert np.all(res.q <= hand16.upper_limits)
        objs.append(
            nonlinear_objective(hand16, res.q, q_prev, target.keypoints, 1.0, 0.01)
        )
    assert all(b <= a + 1e-12 for a, b in zip(objs, objs[1:]))
    _ = params


def iterated_qp_minimize(model, q0, targets, alpha, beta, iters=300):
    """Minimize the fixed-anchor tracking objective by repeated QP steps.

    Same objective the nonlinear baseline descends: the linearized subproblem
    keeps the smoothness term anchored at q0, so each QP step is a
    Gauss-Newton step taken through the constrained solver.
    """
    from handretarget import QpProblem, RetargetParams, solve
    from handretarget.retarget import assemble_joint_limit_rows, assemble_objective

    params = RetargetParams(alpha=alpha, beta=beta, cbf_enabled=False)
    q = np.asarray(q0, dtype=float)
    for k in range(iters):
        fk = forward_kinematics(model, q)
        H, g = assemble_objective(
            model, fk, KeypointFrame(float(k), targets), params
        )
        g = g + 2.0 * beta * (q - q0)  # re-anchor smoothness at q0
        a_mat, b_vec = assemble_joint_limit_rows(model, q)
        sol = solve(QpProblem(H=H, g=g, A=a_mat, b=b_vec))
        if np.max(np.abs(sol.x)) < 1e-12:
            break
        # damped acceptance keeps the Gauss-Newton iteration monotone
        step = 1.0
        f_cur = nonlinear_objective(model, q, q0, targets, alpha, beta)
        while step > 1e-8:
            trial = q + step * sol.x
            if nonlinear_objective(model, trial, q0, targets, alpha, beta) <= f_cur:
                q = trial
                break
            step *= 0.5
        else:
            break
    return q


def test_iterated_qp_agrees_with_nonlinear_solver(hand16):
    """Shared-minimizer check: both descend the same static-frame objective."""
    alpha, beta = 1.0, 0.01
    for _ in range(5):
        q0 = np.zeros(16)
        target = frame_at(
            hand16, RNG.uniform(0.3 * hand16.lower_limits, 0.3 * hand16.upper_limits)
        )
        nlp = solve_nonlinear(
            hand16,
            q0,
            target,
            NlpParams(alpha=alpha, beta=beta, max_iterations=400,
                      gradient_tolerance=1e-10),
        )
        obj_nlp = nonlinear_objective(hand16, nlp.q, q0, target.keypoints, alpha, beta)

        q_qp = iterated_qp_minimize(hand16, q0, target.keypoints, alpha, beta)
        obj_qp = nonlinear_objective(hand16, q_qp, q0, target.keypoints, alpha, beta)
        assert abs(obj_qp - obj_nlp) < 1e-4
