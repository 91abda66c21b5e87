"""Latency and motion-preservation comparison of the two solver paths.

Run:  python demos/05_metrics_and_benchmark.py
"""

import numpy as np

from handretarget import NlpParams, RetargetParams, run_session
from handretarget.baseline import run_baseline_session
from handretarget.metrics import (
    cumulative_gain,
    default_anchors,
    latency_stats,
    motion_preservation,
)
from handretarget.traces import fixture_model, generate_trace

model = fixture_model()
frames = generate_trace(model, "pinch", n_frames=300, rate=100.0)
anchors = default_anchors(model)
period = 0.01

qp = list(run_session(model, RetargetParams(), frames))
base = list(run_baseline_session(model, NlpParams(), frames))

print(f"{'method':<10}{'mean_ms':>9}{'std_ms':>8}{'p99_ms':>8}{'rt@100Hz_%':>12}")
for name, results in (("qp", qp), ("baseline", base)):
    s = latency_stats([r.solve_latency for r in results], period)
    print(f"{name:<10}{s.mean * 1e3:>9.3f}{s.std * 1e3:>8.3f}"
          f"{s.p99 * 1e3:>8.3f}{s.rt_fraction * 100:>12.1f}")

mp_qp = [motion_preservation(f.keypoints, r.robot_keypoints, anchors)
         for f, r in zip(frames, qp)]
mp_base = [motion_preservation(f.keypoints, r.robot_keypoints, anchors)
           for f, r in zip(frames, base)]
gain = cumulative_gain(mp_qp, mp_base)
print(f"\nmean directional error: qp {np.mean(mp_qp):.5f}  "
      f"baseline {np.mean(mp_base):.5f}")
finite = gain[np.isfinite(gain)]
if finite.size:
    print(f"cumulative gain vs baseline at the horizon: {finite[-1]:+.3f} "
          "(positive = less accumulated deviation)")
print("\nnote: the baseline here carries no collision constraints, so on the "
      "penetrating pinch its tracking is unconstrained while the qp path "
      "trades a little alignment for clearance")
