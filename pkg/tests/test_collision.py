import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from handretarget import (
    capsule_distance,
    distance_jacobian,
    forward_kinematics,
    parse_model,
    segment_closest_points,
)

from oracles import (
    central_difference_jacobian,
    grid_segment_distance,
    grid_segment_distance_literal,
)

RNG = np.random.default_rng(999)


def test_parallel_overlap_tie_break():
    p_a, p_b, s, t = segment_closest_points(
        [0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]
    )
    assert np.linalg.norm(p_a - p_b) == pytest.approx(1.0)
    assert s == 0.0 and t == 0.0  # smallest s, then smallest t


def test_perpendicular_crossing():
    p_a, p_b, s, t = segment_closest_points(
        [-1, 0, 0], [1, 0, 0], [0, -1, 0.5], [0, 1, 0.5]
    )
    assert s == pytest.approx(0.5) and t == pytest.approx(0.5)
    assert np.linalg.norm(p_a - p_b) == pytest.approx(0.5)


def test_degenerate_segments_are_points():
    p_a, p_b, s, t = segment_closest_points(
        [0, 0, 0], [0, 0, 0], [1, 1, 1], [1, 1, 1]
    )
    assert np.linalg.norm(p_a - p_b) == pytest.approx(np.sqrt(3.0))


def test_fast_grid_oracle_equals_literal_scan():
    """Meta-check: the per-line vertex-bracketing grid min is the full scan."""
    for _ in range(200):
        seg = RNG.uniform(-1, 1, (4, 3))
        fast = grid_segment_distance(*seg, n=101)
        literal = grid_segment_distance_literal(*seg, n=101)
        assert fast == pytest.approx(literal, abs=0.0)


def test_random_pairs_match_grid_oracle():
    """Sampled spot-check mirroring the acceptance criterion (full run there)."""
    for _ in range(300):
        seg = RNG.uniform(-1, 1, (4, 3))
        p_a, p_b, _, _ = segment_closest_points(*seg)
        analytic = float(np.linalg.norm(p_a - p_b))
        grid = grid_segment_distance(*seg, n=1001)
        assert analytic <= grid + 1e-12
        assert grid - analytic < 1e-4


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-1, 1, allow_nan=False), min_size=12, max_size=12))
def test_segment_distance_symmetry(flat):
    seg = np.array(flat).reshape(4, 3)
    p_a, p_b, _, _ = segment_closest_points(seg[0], seg[1], seg[2], seg[3])
    q_b, q_a, _, _ = segment_closest_points(seg[2], seg[3], seg[0], seg[1])
    assert np.linalg.norm(p_a - p_b) == pytest.approx(
        np.linalg.norm(q_a - q_b), abs=1e-12
    )


def sphere_pair_model(gap):
    """Two degenerate capsules (spheres) on separate branches, gap apart."""
    doc = {
        "links": ["root", "left", "right"],
        "joints": [
            {"name": "jl", "parent": "root", "child": "left", "axis": [0, 0, 1],
             "origin_xyz": [0, 0, 0], "origin_rpy": [0, 0, 0],
             "limit": {"lower": -1, "upper": 1}},
            {"name": "jr", "parent": "root", "child": "right", "axis": [0, 0, 1],
             "origin_xyz": [gap, 0, 0], "origin_rpy": [0, 0, 0],
             "limit": {"lower": -1, "upper": 1}},
        ],
        "capsules": [
            {"link": "left", "a": [0, 0, 0], "b": [0, 0, 0], "radius": 0.01},
            {"link": "right", "a": [0, 0, 0], "b": [0, 0, 0], "radius": 0.01},
        ],
        "keypoints": [{"id": 1, "link": "left", "offset": [0, 0, 0]}],
        "collision_pairs": [[0, 1]],
    }
    return parse_model(json.dumps(doc))


def test_sphere_pair_arithmetic():
    model = sphere_pair_model(0.05)
    fk = forward_kinematics(model, np.zeros(2))
    d = capsule_distance(model, fk, (0, 1))
    assert d.h == pytest.approx(0.03)
    np.testing.assert_allclose(d.normal, [-1.0, 0.0, 0.0], atol=1e-15)


def test_coincident_witness_points_fallback():
    model = sphere_pair_model(0.0)
    fk = forward_kinematics(model, np.zeros(2))
    d = capsule_distance(model, fk, (0, 1))
    assert d.h == pytest.approx(-0.02)
    assert d.degenerate
    np.testing.assert_allclose(d.normal, [0.0, 0.0, 1.0])
    d2 = capsule_distance(model, fk, (0, 1), fallback_normal=[0.0, 1.0, 0.0])
    np.testing.assert_allclose(d2.normal, [0.0, 1.0, 0.0])


def test_capsule_pair_out_of_range(single_joint_model):
    fk = forward_kinematics(single_joint_model, [0.0])
    with pytest.raises(IndexError):
        capsule_distance(single_joint_model, fk, (0, 3))


def test_swap_symmetry(hand16):
    q = RNG.uniform(hand16.lower_limits, hand16.upper_limits)
    fk = forward_kinematics(hand16, q)
    for i, j in hand16.collision_pairs:
        d_ij = capsule_distance(hand16, fk, (i, j))
        d_ji = capsule_distance(hand16, fk, (j, i))
        assert d_ij.h == d_ji.h
        np.testing.assert_array_equal(d_ij.p_a, d_ji.p_b)
        np.testing.assert_array_equal(d_ij.p_b, d_ji.p_a)
        if not d_ij.degenerate:
            np.testing.assert_array_equal(d_ij.normal, -d_ji.normal)


def test_fixture_h_matches_grid_oracle(hand16):
    """Pinch-like pose: analytic clearance vs grid oracle plus radii."""
    from handretarget.traces import joint_trajectory

    qs = joint_trajectory(hand16, "pinch", 11, 0.01)
    for q in qs[::2]:
        fk = forward_kinematics(hand16, q)
        for pair in hand16.collision_pairs:
            ca, cb = hand16.capsules[pair[0]], hand16.capsules[pair[1]]
            d = capsule_distance(hand16, fk, pair)
            grid = grid_segment_distance(
                fk.poses[ca.link].transform(ca.a),
                fk.poses[ca.link].transform(ca.b),
                fk.poses[cb.link].transform(cb.a),
                fk.poses[cb.link].transform(cb.b),
                n=1001,
            )
            oracle_h = grid - (ca.radius + cb.radius)
            assert d.h <= oracle_h + 1e-12
            assert oracle_h - d.h < 1e-4


def test_base_link_pair_zero_row():
    doc = {
        "links": ["root", "stub"],
        "joints": [
            {"name": "j", "parent": "root", "child": "stub", "axis": [0, 0, 1],
             "origin_xyz": [1, 0, 0], "origin_rpy": [0, 0, 0],
             "limit": {"lower": -1, "upper": 1}},
        ],
        "capsules": [
            {"link": "root", "a": [0, 0, 0], "b": [0.1, 0, 0], "radius": 0.01},
            {"link": "root", "a": [0, 0.3, 0], "b": [0.1, 0.3, 0], "radius": 0.01},
        ],
        "keypoints": [{"id": 1, "link": "stub", "offset": [0, 0, 0]}],
        "collision_pairs": [],
    }
    model = parse_model(json.dumps(doc))
    fk = forward_kinematics(model, [0.2])
    d = capsule_distance(model, fk, (0, 1))
    row = distance_jacobian(model, fk, d)
    assert np.all(row.row == 0.0)


def test_single_joint_row_matches_hand_computation(single_joint_text):
    """One joint rotates capsule A relative to a sibling-link capsule B."""
    doc = json.loads(single_joint_text)
    doc["links"].append("post")
    doc["joints"].append(
        {"name": "j1", "parent": "base", "child": "post", "axis": [0, 0, 1],
         "origin_xyz": [0.1, -0.4, 0], "origin_rpy": [0, 0, 0],
         "limit": {"lower": -1, "upper": 1}}
    )
    doc["capsules"].append(
        {"link": "post", "a": [0, 0, 0], "b": [0.2, 0, 0], "radius": 0.01}
    )
    doc["collision_pairs"] = [[0, 1]]
    model = parse_model(json.dumps(doc))
    fk = forward_kinematics(model, [0.0, 0.0])
    d = capsule_distance(model, fk, (0, 1))
    row = distance_jacobian(model, fk, d)
    # dh/dq_0 = n . (axis x (p_A - o_0)); dh/dq_1 = -n . (axis x (p_B - o_1))
    exp0 = np.cross([0.0, 0.0, 1.0], d.p_a - np.array([0.1, 0.0, 0.0])) @ d.normal
    exp1 = -np.cross([0.0, 0.0, 1.0], d.p_b - np.array([0.1, -0.4, 0.0])) @ d.normal
    assert row.row[0] == pytest.approx(exp0, abs=1e-12)
    assert row.row[1] == pytest.approx(exp1, abs=1e-12)


def test_batch_distances_agree_with_scalar(hand16):
    """The vectorized all-pairs sweep and the per-pair reference coincide."""
    from handretarget.collision import all_pair_distances

    for _ in range(30):
        q = RNG.uniform(hand16.lower_limits, hand16.upper_limits)
        fk = forward_kinematics(hand16, q)
        batch = all_pair_distances(hand16, fk)
        assert len(batch) == len(hand16.collision_pairs)
        for d in batch:
            ref = capsule_distance(hand16, fk, d.pair)
            assert d.h == pytest.approx(ref.h, abs=1e-14)
            assert np.max(np.abs(d.p_a - ref.p_a)) < 1e-14
            assert np.max(np.abs(d.p_b - ref.p_b)) < 1e-14
            assert d.degenerate == ref.degenerate


def near_contact_samples(model, count, lo=0.0, hi=0.02):
    """Random configurations with some monitored pair in the (lo, hi) band."""
    found = []
    while len(found) < count:
        q = RNG.uniform(model.lower_limits, model.upper_limits)
        fk = forward_kinematics(model, q)
        for pair in model.collision_pairs:
            d = capsule_distance(model, fk, pair)
            if lo < d.h < hi:
                found.append((q, pair))
                break
    return found


def segments_near_parallel(model, fk, pair, tol=1e-6):
    ca, cb = model.capsules[pair[0]], model.capsules[pair[1]]
    u = fk.poses[ca.link].transform(ca.b) - fk.poses[ca.link].transform(ca.a)
    v = fk.poses[cb.link].transform(cb.b) - fk.poses[cb.link].transform(cb.a)
    cr = np.linalg.norm(np.cross(u, v))
    return cr * cr <= tol * (u @ u) * (v @ v)


def test_distance_jacobian_matches_finite_differences(hand16):
    checked = 0
    for q, pair in near_contact_samples(hand16, 1000):
        fk = forward_kinematics(hand16, q)
        if segments_near_parallel(hand16, fk, pair):
            continue  # excluded: witness points not unique
        d = capsule_distance(hand16, fk, pair)
        analytic = distance_jacobian(hand16, fk, d).row

        def h_of(qq):
            return np.array(
                [capsule_distance(hand16, forward_kinematics(hand16, qq), pair).h]
            )

        fd = central_difference_jacobian(h_of, q)
        assert np.max(np.abs(fd[0] - analytic)) < 1e-4
        checked += 1
    assert checked >= 900
