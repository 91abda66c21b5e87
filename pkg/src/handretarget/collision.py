"""Capsule-pair clearance: witness points, safety value, and distance Jacobian.

Clearance between two capsules is the segment-segment distance minus the
radius sum; negative values mean penetration. The clearance gradient row uses
only the witness-point Jacobians and the separation normal (envelope theorem:
the dependence of the witness parameters on q contributes nothing at a unique
minimizer, and a valid subgradient element elsewhere).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kinematics import FkResult, point_jacobian
from .model import HandModel

# Separations below this are treated as coincident witness points; the normal
# is then taken from the caller-provided fallback.
DEGENERATE_SEPARATION = 1e-9

_PARALLEL_EPS = 1e-12


def _clamp01(v: float) -> float:
    return 0.0 if v < 0.0 else (1.0 if v > 1.0 else v)


def segment_closest_points(a0, a1, b0, b1):
    """Globally closest points between segments [a0,a1] and [b0,b1].

    Returns ``(p_a, p_b, s, t)`` with ``p_a = a0 + s*(a1-a0)`` and
    ``p_b = b0 + t*(b1-b0)``, ``s, t`` clamped to [0, 1]. Solves the
    unconstrained 2x2 system and re-solves the clamped boundary cases.
    Parallel ties resolve to the smallest s, then smallest t, attaining the
    minimum, so repeated evaluation yields identical rows.
    """
    a0 = np.asarray(a0, dtype=float)
    a1 = np.asarray(a1, dtype=float)
    b0 = np.asarray(b0, dtype=float)
    b1 = np.asarray(b1, dtype=float)
    d1 = a1 - a0
    d2 = b1 - b0
    r = a0 - b0
    a = float(d1 @ d1)
    e = float(d2 @ d2)
    f = float(d2 @ r)

    if a <= _PARALLEL_EPS and e <= _PARALLEL_EPS:
        s, t = 0.0, 0.0
    elif a <= _PARALLEL_EPS:
        s = 0.0
        t = _clamp01(f / e)
    else:
        c = float(d1 @ r)
        if e <= _PARALLEL_EPS:
            t = 0.0
            s = _clamp01(-c / a)
        else:
            b = float(d1 @ d2)
            denom = a * e - b * b
            # Parallel lines: seed s at 0 (canonical tie-break), the t pass
            # below then picks the matching minimizer.
            s = _clamp01((b * f - c * e) / denom) if denom > _PARALLEL_EPS * a * e else 0.0
            t = (b * s + f) / e
            if t < 0.0:
                t = 0.0
                s = _clamp01(-c / a)
            elif t > 1.0:
                t = 1.0
                s = _clamp01((b - c) / a)
    return a0 + s * d1, b0 + t * d2, s, t


@dataclass(frozen=True, eq=False)
class DistanceResult:
    """Clearance for one monitored capsule pair at one configuration."""

    pair: tuple[int, int]
    h: float                 # surface clearance (m); < 0 means penetration
    p_a: np.ndarray          # witness point on capsule A's segment (world, m)
    p_b: np.ndarray
    normal: np.ndarray       # unit vector from B toward A
    s: float
    t: float
    degenerate: bool         # witness points coincided; normal is a fallback


@dataclass(frozen=True, eq=False)
class DistanceJacobianRow:
    """Row mapping joint velocity to clearance rate for one pair."""

    pair: tuple[int, int]
    row: np.ndarray          # (n_q,) m/rad
    h: float


def capsule_distance(
    model: HandModel, fk: FkResult, pair, fallback_normal=None
) -> DistanceResult:
    """Clearance between the capsules of ``pair`` at the configuration of ``fk``.

    ``fallback_normal`` replaces the separation direction when the witness
    points coincide (deep penetration); it defaults to world +z. The caller
    owning temporal state should pass the previous step's normal instead.

    Computation always runs in canonical (low index, high index) order and the
    result is re-labeled for reversed callers, so swapping the pair swaps the
    witness points and negates the normal bit-exactly.
    """
    i, j = int(pair[0]), int(pair[1])
    if not (0 <= i < len(model.capsules) and 0 <= j < len(model.capsules)):
        raise IndexError(f"capsule pair ({i}, {j}) out of range")
    if i > j:
        d = capsule_distance(
            model,
            fk,
            (j, i),
            fallback_normal=None
            if fallback_normal is None
            else -np.asarray(fallback_normal, dtype=float),
        )
        return DistanceResult(
            pair=(i, j), h=d.h, p_a=d.p_b, p_b=d.p_a, normal=-d.normal,
            s=d.t, t=d.s, degenerate=d.degenerate,
        )
    ca, cb = model.capsules[i], model.capsules[j]
    pose_a, pose_b = fk.poses[ca.link], fk.poses[cb.link]
    p_a, p_b, s, t = segment_closest_points(
        pose_a.transform(ca.a),
        pose_a.transform(ca.b),
        pose_b.transform(cb.a),
        pose_b.transform(cb.b),
    )
    diff = p_a - p_b
    dist = float(np.linalg.norm(diff))
    h = dist - (ca.radius + cb.radius)
    if dist > DEGENERATE_SEPARATION:
        normal = diff / dist
        degenerate = False
    else:
        normal = (
            np.array([0.0, 0.0, 1.0])
            if fallback_normal is None
            else np.asarray(fallback_normal, dtype=float)
        )
        degenerate = True
    return DistanceResult(
        pair=(i, j), h=h, p_a=p_a, p_b=p_b, normal=normal, s=s, t=t,
        degenerate=degenerate,
    )


def _closest_points_batch(a0, a1, b0, b1):
    """Vectorized clamped segment-segment closest points over N pairs.

    Same branch structure as :func:`segment_closest_points`, expressed with
    masks; agrees with the scalar path to the last bit on non-branch-boundary
    inputs and within roundoff elsewhere.
    """
    d1 = a1 - a0
    d2 = b1 - b0
    r = a0 - b0
    a = np.einsum("ij,ij->i", d1, d1)
    e = np.einsum("ij,ij->i", d2, d2)
    f = np.einsum("ij,ij->i", d2, r)
    c = np.einsum("ij,ij->i", d1, r)
    b = np.einsum("ij,ij->i", d1, d2)

    tiny_a = a <= _PARALLEL_EPS
    tiny_e = e <= _PARALLEL_EPS
    safe_a = np.where(tiny_a, 1.0, a)
    safe_e = np.where(tiny_e, 1.0, e)

    denom = a * e - b * b
    parallel = denom <= _PARALLEL_EPS * a * e
    s = np.where(parallel, 0.0, (b * f - c * e) / np.where(parallel, 1.0, denom))
    s = np.clip(s, 0.0, 1.0)
    t = (b * s + f) / safe_e
    t_lo = t < 0.0
    t_hi = t > 1.0
    s = np.where(t_lo, np.clip(-c / safe_a, 0.0, 1.0), s)
    s = np.where(t_hi, np.clip((b - c) / safe_a, 0.0, 1.0), s)
    t = np.clip(t, 0.0, 1.0)

    # degenerate segments override the general path
    s = np.where(tiny_a, 0.0, s)
    t = np.where(tiny_a & ~tiny_e, np.clip(f / safe_e, 0.0, 1.0), t)
    t = np.where(tiny_e & ~tiny_a, 0.0, t)
    s = np.where(tiny_e & ~tiny_a, np.clip(-c / safe_a, 0.0, 1.0), s)
    s = np.where(tiny_a & tiny_e, 0.0, s)
    t = np.where(tiny_a & tiny_e, 0.0, t)

    p_a = a0 + s[:, None] * d1
    p_b = b0 + t[:, None] * d2
    return p_a, p_b, s, t


def all_pair_distances(model: HandModel, fk: FkResult, fallback_normals=None):
    """Clearances for every monitored pair in one vectorized sweep.

    Equivalent to calling :func:`capsule_distance` per pair (the per-pair
    function remains the reference; tests hold the two together) but batches
    the segment geometry, which matters at control rates.
    """
    pairs = model.collision_pairs
    if not pairs:
        return []
    fallback_normals = fallback_normals or {}
    ends_a = np.empty((len(model.capsules), 3))
    ends_b = np.empty((len(model.capsules), 3))
    for k, cap in enumerate(model.capsules):
        pose = fk.poses[cap.link]
        ends_a[k] = pose.rotation @ cap.a + pose.translation
        ends_b[k] = pose.rotation @ cap.b + pose.translation

    idx_i = np.fromiter((p[0] for p in pairs), dtype=int, count=len(pairs))
    idx_j = np.fromiter((p[1] for p in pairs), dtype=int, count=len(pairs))
    p_a, p_b, s, t = _closest_points_batch(
        ends_a[idx_i], ends_b[idx_i], ends_a[idx_j], ends_b[idx_j]
    )
    diff = p_a - p_b
    dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    radii = np.array(
        [model.capsules[i].radius + model.capsules[j].radius for i, j in pairs]
    )
    results = []
    for k, pair in enumerate(pairs):
        if dist[k] > DEGENERATE_SEPARATION:
            normal = diff[k] / dist[k]
            degenerate = False
        else:
            fb = fallback_normals.get(pair)
            normal = np.array([0.0, 0.0, 1.0]) if fb is None else np.asarray(fb, float)
            degenerate = True
        results.append(
            DistanceResult(
                pair=pair, h=float(dist[k] - radii[k]), p_a=p_a[k], p_b=p_b[k],
                normal=normal, s=float(s[k]), t=float(t[k]), degenerate=degenerate,
            )
        )
    return results


def distance_jacobian(
    model: HandModel, fk: FkResult, d: DistanceResult
) -> DistanceJacobianRow:
    """Clearance-rate row ``n^T (J_A - J_B)`` at the witness points of ``d``."""
    nrm = float(np.linalg.norm(d.normal))
    if not np.isfinite(nrm) or abs(nrm - 1.0) > 1e-6:
        raise ValueError(
            f"pair {d.pair}: normal is not unit length (deep penetration "
            "without a usable fallback)"
        )
    jac_a = point_jacobian(model, fk, model.capsules[d.pair[0]].link, d.p_a)
    jac_b = point_jacobian(model, fk, model.capsules[d.pair[1]].link, d.p_b)
    return DistanceJacobianRow(pair=d.pair, row=d.normal @ (jac_a - jac_b), h=d.h)
