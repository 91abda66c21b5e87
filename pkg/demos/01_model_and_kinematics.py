"""Load the bundled hand, inspect its structure, and sanity-check Jacobians.

Run:  python demos/01_model_and_kinematics.py
"""

import numpy as np

from handretarget import forward_kinematics, keypoint_jacobian
from handretarget.traces import fixture_model

model = fixture_model()
print(f"model: {model.n_q} joints, {len(model.links)} links, "
      f"{len(model.capsules)} capsules, {len(model.keypoints)} keypoints, "
      f"{len(model.collision_pairs)} monitored pairs")
print("joints:", ", ".join(j.name for j in model.joints))

# forward kinematics at a half-curled pose
rng = np.random.default_rng(1)
q = 0.5 * (model.lower_limits + model.upper_limits) * 0.4
fk = forward_kinematics(model, q)
print("\nkeypoint positions (m) at the half-curled pose:")
for spec, p in zip(model.keypoints, fk.keypoint_positions):
    print(f"  {spec.id:2d} {spec.link:12s} [{p[0]:+.4f} {p[1]:+.4f} {p[2]:+.4f}]")

# analytic Jacobian vs a quick central-difference probe for one keypoint
i = 3  # index fingertip
jac = keypoint_jacobian(model, fk, i)
step = 1e-6
fd = np.zeros_like(jac)
for k in range(model.n_q):
    dq = np.zeros(model.n_q)
    dq[k] = step
    hi = forward_kinematics(model, q + dq).keypoint_positions[i]
    lo = forward_kinematics(model, q - dq).keypoint_positions[i]
    fd[:, k] = (hi - lo) / (2 * step)
err = np.max(np.abs(fd - jac))
print(f"\nkeypoint {i} Jacobian: nonzero columns = "
      f"{sorted(int(c) for c in np.flatnonzero(np.any(jac != 0, axis=0)))}")
print(f"max |finite-difference - analytic| = {err:.2e}  (expect ~1e-10)")
