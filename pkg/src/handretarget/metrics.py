"""Evaluation metrics: latency statistics, motion preservation, safety score.

All operations are pure and deterministic. Percentiles use the nearest-rank
method; standard deviations are population (ddof=0).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .model import HandModel

log = logging.getLogger(__name__)

_DEGENERATE_ANCHOR = 1e-9


@dataclass(frozen=True)
class LatencyStats:
    mean: float
    std: float
    p99: float
    rt_fraction: float  # fraction of steps completing within the control period


def latency_stats(latencies, period: float) -> LatencyStats:
    """Mean / population std / nearest-rank p99 / real-time fraction."""
    lat = np.asarray(list(latencies), dtype=float)
    if lat.size == 0:
        raise ValueError("empty latency sequence")
    rank = max(int(math.ceil(0.99 * lat.size)), 1)
    return LatencyStats(
        mean=float(np.mean(lat)),
        std=float(np.std(lat)),
        p99=float(np.sort(lat)[rank - 1]),
        rt_fraction=float(np.count_nonzero(lat < period)) / lat.size,
    )


@dataclass(frozen=True, eq=False)
class MotionPreservationConfig:
    """Directional anchors (keypoint index pairs) and their weights."""

    anchors: tuple          # ((i, j), ...) 0-based keypoint indices
    weights: np.ndarray     # nonnegative, sum 1

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if len(self.anchors) != w.shape[0]:
            raise ValueError("one weight per anchor required")
        if np.any(w < 0.0):
            raise ValueError("weights must be nonnegative")
        if abs(float(np.sum(w)) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {np.sum(w)}")
        object.__setattr__(self, "anchors", tuple((int(a), int(b)) for a, b in self.anchors))
        object.__setattr__(self, "weights", w)


def default_anchors(model: HandModel) -> MotionPreservationConfig:
    """One direction per finger: shallowest to deepest keypoint on each leaf chain.

    Fingers are the root-to-leaf chains of the kinematic tree; keypoints on
    links exclusive to one chain are grouped, and chains with at least two
    keypoints contribute the (closest-to-base, farthest) pair. Weights are
    uniform.
    """
    child_links = {j.child for j in model.joints}
    parent_links = {j.parent for j in model.joints}
    leaves = [l for l in child_links if l not in parent_links]

    anchors = []
    for leaf in sorted(leaves, key=lambda l: model.links.index(l)):
        chain_links = {model.joints[j].child for j in model.chains[leaf]}
        indexed = [
            (len(model.chains[k.link]), i)
            for i, k in enumerate(model.keypoints)
            if k.link in chain_links
        ]
        if len(indexed) >= 2:
            indexed.sort()
            anchors.append((indexed[0][1], indexed[-1][1]))
    if not anchors:
        raise ValueError("model yields no usable anchors (need 2 keypoints on a finger)")
    n = len(anchors)
    return MotionPreservationConfig(anchors=tuple(anchors), weights=np.full(n, 1.0 / n))


def motion_preservation(human_kp, robot_kp, cfg: MotionPreservationConfig) -> float:
    """Weighted mean of directional dissimilarities 1 - d_h . d_r, over 1/N.

    Anchors whose human or robot vector degenerates to zero length are
    skipped with the remaining weights renormalized.
    """
    human_kp = np.asarray(human_kp, dtype=float)
    robot_kp = np.asarray(robot_kp, dtype=float)
    if human_kp.shape != robot_kp.shape:
        raise ValueError(
            f"keypoint sets differ in shape: {human_kp.shape} vs {robot_kp.shape}"
        )
    n = len(cfg.anchors)
    eps_terms, weights = [], []
    for (i, j), w in zip(cfg.anchors, cfg.weights):
        d_h = human_kp[j] - human_kp[i]
        d_r = robot_kp[j] - robot_kp[i]
        nh, nr = np.linalg.norm(d_h), np.linalg.norm(d_r)
        if nh <= _DEGENERATE_ANCHOR or nr <= _DEGENERATE_ANCHOR:
            log.warning("anchor (%d, %d) degenerate; skipped", i, j)
            continue
        eps_terms.append(1.0 - float(d_h @ d_r) / (nh * nr))
        weights.append(w)
    if not eps_terms:
        raise ValueError("all anchors degenerate")
    w = np.asarray(weights)
    w = w / np.sum(w)
    return float(np.sum(w * np.asarray(eps_terms))) / n


def cumulative_gain(series_ours, series_baseline) -> np.ndarray:
    """Running relative gain (cum(baseline) - cum(ours)) / cum(baseline).

    Entries where the baseline cumulative is zero are NaN (emitted as absent
    in reports). Positive values mean less accumulated deviation than the
    baseline.
    """
    ours = np.asarray(list(series_ours), dtype=float)
    base = np.asarray(list(series_baseline), dtype=float)
    if ours.shape != base.shape:
        raise ValueError("series lengths differ")
    cum_ours = np.cumsum(ours)
    cum_base = np.cumsum(base)
    out = np.full(ours.shape, np.nan)
    nz = cum_base != 0.0
    out[nz] = (cum_base[nz] - cum_ours[nz]) / cum_base[nz]
    return out


@dataclass(frozen=True)
class SafetyConfig:
    d_safe: float  # clearance threshold normalizing the score (m)

    def __post_init__(self):
        if self.d_safe <= 0.0:
            raise ValueError("d_safe must be > 0")


@dataclass(frozen=True, eq=False)
class SafetyResult:
    d_self: float            # worst clearance over the trial (m)
    per_step: np.ndarray     # clip(h_t / d_safe, 0, 1)
    overall: float           # clip(d_self / d_safe, 0, 1)


def safety_score(h_min_per_step, cfg: SafetyConfig) -> SafetyResult:
    """Normalized clearance scores from the per-step minimum raw distances."""
    h = np.asarray(list(h_min_per_step), dtype=float)
    if h.size == 0:
        raise ValueError("empty clearance series")
    per_step = np.clip(h / cfg.d_safe, 0.0, 1.0)
    d_self = float(np.min(h))
    return SafetyResult(
        d_self=d_self,
        per_step=per_step,
        overall=float(np.clip(d_self / cfg.d_safe, 0.0, 1.0)),
    )


def build_report(
    latencies,
    period: float,
    motion_series,
    h_min_series,
    safety_cfg: SafetyConfig,
    gain_series=None,
) -> dict:
    """Machine-readable report; schema shared by the CLI and the service."""
    lat = latency_stats(latencies, period)
    safety = safety_score(h_min_series, safety_cfg)
    motion = np.asarray(list(motion_series), dtype=float)
    report = {
        "latency": {
            "mean_s": lat.mean,
            "std_s": lat.std,
            "p99_s": lat.p99,
            "rt_fraction": lat.rt_fraction,
            "period_s": period,
        },
        "motion_preservation": {
            "per_step": motion.tolist(),
            "mean": float(np.mean(motion)) if motion.size else None,
        },
        "safety": {
            "per_step_score": safety.per_step.tolist(),
            "d_self_m": safety.d_self,
            "overall_score": safety.overall,
            "fraction_above_0.8": float(np.mean(safety.per_step >= 0.8)),
        },
    }
    if gain_series is not None:
        report["gain_vs_baseline"] = [
            None if not np.isfinite(v) else float(v) for v in gain_series
        ]
    return report
