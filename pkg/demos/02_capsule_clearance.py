"""Watch capsule clearances shrink along the raw pinch gesture.

The pinch trajectory deliberately drives the thumb tip through the index
fingertip; this demo evaluates raw clearances (no controller involved) and
marks where the barrier activation and safety thresholds sit.

Run:  python demos/02_capsule_clearance.py
"""

import numpy as np

from handretarget import capsule_distance, forward_kinematics
from handretarget.traces import fixture_model, joint_trajectory

ACTIVATION = 0.011
THRESHOLD = 0.010

model = fixture_model()
qs = joint_trajectory(model, "pinch", n_frames=100, dt=0.01)

print("step   h_min(mm)  worst pair            regime")
for k in range(0, 100, 5):
    fk = forward_kinematics(model, qs[k])
    hs = {pair: capsule_distance(model, fk, pair).h for pair in model.collision_pairs}
    pair = min(hs, key=hs.get)
    h = hs[pair]
    if h < 0:
        regime = "PENETRATION"
    elif h < THRESHOLD:
        regime = "inside protected band"
    elif h <= ACTIVATION:
        regime = "barrier rows active"
    else:
        regime = "free"
    links = f"{model.capsules[pair[0]].link}/{model.capsules[pair[1]].link}"
    print(f"{k:4d}   {h * 1e3:+8.2f}  {links:20s}  {regime}")

fk = forward_kinematics(model, qs[-1])
d = capsule_distance(model, fk, (2, 5))
print(f"\nfinal thumb-tip vs index-tip: h = {d.h * 1e3:+.2f} mm, "
      f"witness points {np.round(d.p_a, 4)} / {np.round(d.p_b, 4)}")
print("a correct controller must never let the closed-loop hand reach here")
