"""Keypoint trace I/O and synthetic trace generation.

Trace files are UTF-8 JSON lines: ``{"t": seconds, "kp": [[x,y,z], ...]}``.
Synthetic traces come from parametric joint trajectories of the bundled hand
fixture, converted to keypoint frames through forward kinematics, so targets
are kinematically consistent by construction. The pinch and grasp families
deliberately drive the raw trajectory into penetration; they exist to
exercise the barrier constraints.
"""

from __future__ import annotations

import json
from importlib import resources

import numpy as np

from .kinematics import forward_kinematics
from .model import HandModel, parse_model
from .retarget import KeypointFrame

TRACE_KINDS = ("pinch", "cross", "grasp", "smooth")

# Peak joint angles for the scripted gestures, keyed by fixture joint name.
_PINCH_PEAK = {
    "th_cmc_abd": 0.65, "th_cmc_flex": 0.58, "th_mcp": 0.73, "th_ip": 0.55,
    "index_mcp": 1.65, "index_pip": 0.80,
}
_CROSS_PEAK = {
    "index_abd": -0.35, "middle_abd": 0.35,
    "index_mcp": 0.90, "index_pip": 0.50,
    "middle_mcp": 0.25, "middle_pip": 0.15,
}
_GRASP_PEAK = {
    "index_mcp": 1.1, "index_pip": 0.9, "middle_mcp": 1.1, "middle_pip": 0.9,
    "ring_mcp": 1.1, "ring_pip": 0.9, "pinky_mcp": 1.1, "pinky_pip": 0.9,
    "th_cmc_abd": 0.5, "th_cmc_flex": 0.45, "th_mcp": 0.55, "th_ip": 0.4,
}
_RAMP_FRACTION = 0.7  # gesture reaches its peak at this fraction of the trace


def fixture_model() -> HandModel:
    """The bundled 16-joint five-finger hand."""
    text = resources.files("handretarget.data").joinpath("hand16.json").read_text()
    return parse_model(text)


def read_trace(path) -> list[KeypointFrame]:
    frames = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                doc = json.loads(line)
                frames.append(
                    KeypointFrame(
                        timestamp=float(doc["t"]),
                        keypoints=np.array(doc["kp"], dtype=float),
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
                raise ValueError(f"{path}:{lineno}: bad trace line: {e}") from e
    return frames


def write_trace(path, frames) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for frame in frames:
            f.write(
                json.dumps({"t": frame.timestamp, "kp": frame.keypoints.tolist()})
                + "\n"
            )


def _ease(u: float) -> float:
    u = min(max(u, 0.0), 1.0)
    return 0.5 - 0.5 * np.cos(np.pi * u)


def _scripted_q(model: HandModel, peaks: dict, u: float) -> np.ndarray:
    s = _ease(u)
    q = np.zeros(model.n_q)
    index = {j.name: k for k, j in enumerate(model.joints)}
    for name, peak in peaks.items():
        if name not in index:
            raise ValueError(f"model lacks joint '{name}' required by this gesture")
        q[index[name]] = peak * s
    return q


def _smooth_q(model: HandModel, t: float, phases: np.ndarray) -> np.ndarray:
    """Contact-free multi-sine wander; amplitudes tuned to stay clear of
    activation range on the bundled fixture."""
    q = np.zeros(model.n_q)
    mid = 0.5 * (model.lower_limits + model.upper_limits)
    for k, joint in enumerate(model.joints):
        half = 0.5 * (joint.upper - joint.lower)
        if joint.name.startswith("th_"):
            base, amp = 0.0, 0.03 * half
        elif "abd" in joint.name:
            base, amp = 0.0, 0.02 * half
        else:
            base, amp = 0.22 * mid[k], 0.075 * half
        q[k] = base + amp * np.sin(2.0 * np.pi * (0.3 + 0.03 * k) * t + phases[k])
    return q


def joint_trajectory(
    model: HandModel, kind: str, n_frames: int, dt: float, seed: int = 0
) -> np.ndarray:
    """(n_frames, n_q) raw joint trajectory for one gesture family."""
    if kind not in TRACE_KINDS:
        raise ValueError(f"unknown trace kind '{kind}' (choose from {TRACE_KINDS})")
    if n_frames < 1:
        raise ValueError("n_frames must be >= 1")
    qs = np.zeros((n_frames, model.n_q))
    if kind == "smooth":
        phases = np.random.default_rng(seed).uniform(0.0, 2.0 * np.pi, model.n_q)
        for k in range(n_frames):
            qs[k] = _smooth_q(model, k * dt, phases)
        return qs
    peaks = {"pinch": _PINCH_PEAK, "cross": _CROSS_PEAK, "grasp": _GRASP_PEAK}[kind]
    ramp_len = max(int(_RAMP_FRACTION * (n_frames - 1)), 1)
    for k in range(n_frames):
        qs[k] = _scripted_q(model, peaks, k / ramp_len)
    return qs


def generate_trace(
    model: HandModel, kind: str, n_frames: int = 500, rate: float = 100.0, seed: int = 0
) -> list[KeypointFrame]:
    """Synthesize a keypoint trace by running FK along a gesture trajectory."""
    dt = 1.0 / rate
    qs = joint_trajectory(model, kind, n_frames, dt, seed)
    frames = []
    for k in range(n_frames):
        fk = forward_kinematics(model, qs[k])
        frames.append(KeypointFrame(timestamp=k * dt, keypoints=fk.keypoint_positions))
    return frames
