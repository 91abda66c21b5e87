"""Forward kinematics and analytic point Jacobians over the joint tree.

All math is double precision. Joint rotations compose as
``pose(child) = pose(parent) * origin * rot(axis, q)``, so the world-frame
joint axis and origin captured during the forward pass are exactly the
quantities each geometric Jacobian column needs:
``column_j = axis_j x (p - origin_j)`` for every joint j on the root-to-point
chain, zero elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import HandModel


@dataclass(frozen=True, eq=False)
class LinkPose:
    """World-from-link rigid transform."""

    rotation: np.ndarray     # 3x3 orthonormal, det +1
    translation: np.ndarray  # 3-vector (m)

    def transform(self, local_point) -> np.ndarray:
        return self.rotation @ np.asarray(local_point, dtype=float) + self.translation


@dataclass(frozen=True, eq=False)
class FkResult:
    """Poses and keypoint positions for one configuration.

    ``joint_axes_world`` / ``joint_origins_world`` carry the per-joint world
    axis direction and a point on that axis, indexed by joint, for Jacobian
    assembly without a second traversal.
    """

    poses: dict
    keypoint_positions: np.ndarray   # (N, 3)
    evaluated_at: np.ndarray         # (n_q,)
    joint_axes_world: np.ndarray     # (n_q, 3)
    joint_origins_world: np.ndarray  # (n_q, 3)


def axis_angle_matrix(axis, angle: float) -> np.ndarray:
    """Rodrigues rotation about a unit axis."""
    x, y, z = float(axis[0]), float(axis[1]), float(axis[2])
    c, s = math.cos(angle), math.sin(angle)
    t = 1.0 - c
    return np.array(
        [
            [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
            [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
            [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
        ]
    )


def forward_kinematics(model: HandModel, q) -> FkResult:
    """Compute every link pose and keypoint position at configuration ``q``."""
    q = np.asarray(q, dtype=float)
    if q.shape != (model.n_q,):
        raise ValueError(f"configuration has shape {q.shape}, expected ({model.n_q},)")
    if not np.all(np.isfinite(q)):
        raise ValueError("configuration contains non-finite values")

    poses = {model.base_link: LinkPose(np.eye(3), np.zeros(3))}
    axes = np.zeros((model.n_q, 3))
    origins = np.zeros((model.n_q, 3))
    for j in model.joint_order:
        spec = model.joints[j]
        parent = poses[spec.parent]
        r_pre = parent.rotation @ model.origin_rotations[j]
        t_pre = parent.rotation @ spec.origin_xyz + parent.translation
        axes[j] = r_pre @ spec.axis
        origins[j] = t_pre
        poses[spec.child] = LinkPose(
            r_pre @ axis_angle_matrix(spec.axis, q[j]), t_pre
        )

    kp = np.zeros((len(model.keypoints), 3))
    for i, spec in enumerate(model.keypoints):
        kp[i] = poses[spec.link].transform(spec.offset)
    return FkResult(
        poses=poses,
        keypoint_positions=kp,
        evaluated_at=q.copy(),
        joint_axes_world=axes,
        joint_origins_world=origins,
    )


def point_jacobian(model: HandModel, fk: FkResult, link: str, world_point) -> np.ndarray:
    """3 x n_q positional Jacobian of a point rigidly attached to ``link``."""
    if link not in fk.poses:
        raise KeyError(f"unknown link '{link}'")
    p = np.asarray(world_point, dtype=float)
    jac = np.zeros((3, model.n_q))
    chain = list(model.chains[link])
    if not chain:
        return jac
    # axis x (p - origin), vectorized over the chain (hot path at step rate)
    a = fk.joint_axes_world[chain]
    r = p[None, :] - fk.joint_origins_world[chain]
    cols = np.empty((len(chain), 3))
    cols[:, 0] = a[:, 1] * r[:, 2] - a[:, 2] * r[:, 1]
    cols[:, 1] = a[:, 2] * r[:, 0] - a[:, 0] * r[:, 2]
    cols[:, 2] = a[:, 0] * r[:, 1] - a[:, 1] * r[:, 0]
    jac[:, chain] = cols.T
    return jac


def keypoint_jacobian(model: HandModel, fk: FkResult, i: int) -> np.ndarray:
    """3 x n_q Jacobian of keypoint ``i`` (0-based position in the model list)."""
    if not 0 <= i < len(model.keypoints):
        raise IndexError(f"keypoint index {i} out of range")
    spec = model.keypoints[i]
    return point_jacobian(model, fk, spec.link, fk.keypoint_positions[i])


def stacked_keypoint_jacobian(model: HandModel, fk: FkResult) -> np.ndarray:
    """All keypoint Jacobians stacked row-wise into a 3N x n_q matrix."""
    n = len(model.keypoints)
    jac = np.zeros((3 * n, model.n_q))
    for i in range(n):
        jac[3 * i : 3 * i + 3] = keypoint_jacobian(model, fk, i)
    return jac
