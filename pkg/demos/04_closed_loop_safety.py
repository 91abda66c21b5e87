"""The safety ablation: replay the pinch with and without barrier rows.

With the barrier enabled the minimum clearance brakes at the protected
threshold; without it the hand tracks the raw gesture straight into
penetration. Saves a clearance plot next to this script.

Run:  python demos/04_closed_loop_safety.py
"""

from pathlib import Path

import numpy as np

from handretarget import RetargetParams, run_session
from handretarget.metrics import SafetyConfig, safety_score
from handretarget.traces import fixture_model, generate_trace

model = fixture_model()
frames = generate_trace(model, "pinch", n_frames=500, rate=100.0)

runs = {}
for label, enabled in (("barrier on", True), ("barrier off", False)):
    params = RetargetParams(cbf_enabled=enabled)
    results = list(run_session(model, params, frames))
    h = np.array([r.h_min for r in results])
    runs[label] = h
    scores = safety_score(h, SafetyConfig(d_safe=0.01))
    active = sum(1 for r in results if r.active_cbf_pairs)
    print(f"{label:12s} min h = {h.min() * 1e3:+6.2f} mm   "
          f"safety score >= 0.8 on {np.mean(scores.per_step >= 0.8) * 100:5.1f}% of steps   "
          f"steps with active rows: {active}")

print("\nthe barrier turns a -6 mm penetration into a parked approach at ~10 mm")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(8, 4))
    t = np.arange(len(frames)) * 0.01
    for label, h in runs.items():
        ax.plot(t, h * 1e3, label=label)
    ax.axhline(10.0, color="k", ls="--", lw=0.8, label="protected threshold")
    ax.axhline(11.0, color="gray", ls=":", lw=0.8, label="activation")
    ax.axhline(0.0, color="r", lw=0.8)
    ax.set_xlabel("time (s)")
    ax.set_ylabel("min clearance (mm)")
    ax.legend()
    out = Path(__file__).with_name("clearance_ablation.png")
    fig.savefig(out, dpi=120, bbox_inches="tight")
    print(f"plot written to {out}")
except ImportError:
    print("matplotlib not installed; skipping the plot")
