import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from handretarget import (
    ModelSyntaxError,
    ModelValidationError,
    auto_collision_pairs,
    clamp,
    parse_model,
    serialize_model,
)

from conftest import SINGLE_JOINT_DOC


def test_parse_single_joint(single_joint_model):
    m = single_joint_model
    assert m.n_q == 1
    assert m.base_link == "base"
    assert len(m.capsules) == 1
    assert len(m.keypoints) == 1
    assert m.collision_pairs == ()


def test_parse_rejects_undeclared_child_link(single_joint_text):
    doc = json.loads(single_joint_text)
    doc["joints"][0]["child"] = "phantom"
    doc["links"] = ["base", "arm", "phantom"]
    doc["capsules"] = []
    doc["keypoints"] = []
    # 'arm' is now disconnected -> two roots
    with pytest.raises(ModelValidationError):
        parse_model(json.dumps(doc))

    doc2 = json.loads(single_joint_text)
    doc2["joints"][0]["child"] = "phantom"
    with pytest.raises(ModelValidationError, match="phantom"):
        parse_model(json.dumps(doc2))


def test_parse_rejects_malformed_json():
    with pytest.raises(ModelSyntaxError):
        parse_model("{not json")


def test_parse_rejects_missing_keys():
    with pytest.raises(ModelSyntaxError, match="links"):
        parse_model("{}")


def test_parse_rejects_non_unit_axis(single_joint_text):
    doc = json.loads(single_joint_text)
    doc["joints"][0]["axis"] = [0, 0, 1.001]
    with pytest.raises(ModelValidationError, match="axis"):
        parse_model(json.dumps(doc))


def test_parse_rejects_inverted_limits(single_joint_text):
    doc = json.loads(single_joint_text)
    doc["joints"][0]["limit"] = {"lower": 1.0, "upper": -1.0}
    with pytest.raises(ModelValidationError, match="limit"):
        parse_model(json.dumps(doc))


def test_parse_rejects_cycle():
    doc = {
        "links": ["a", "b", "c"],
        "joints": [
            {"name": "j1", "parent": "a", "child": "b", "axis": [0, 0, 1],
             "origin_xyz": [0, 0, 0], "origin_rpy": [0, 0, 0],
             "limit": {"lower": -1, "upper": 1}},
            {"name": "j2", "parent": "b", "child": "c", "axis": [0, 0, 1],
             "origin_xyz": [0, 0, 0], "origin_rpy": [0, 0, 0],
             "limit": {"lower": -1, "upper": 1}},
            {"name": "j3", "parent": "c", "child": "a", "axis": [0, 0, 1],
             "origin_xyz": [0, 0, 0], "origin_rpy": [0, 0, 0],
             "limit": {"lower": -1, "upper": 1}},
        ],
        "capsules": [],
        "keypoints": [],
    }
    with pytest.raises(ModelValidationError):
        parse_model(json.dumps(doc))


def test_parse_rejects_noncontiguous_keypoint_ids(single_joint_text):
    doc = json.loads(single_joint_text)
    doc["keypoints"][0]["id"] = 2
    with pytest.raises(ModelValidationError, match="contiguous"):
        parse_model(json.dumps(doc))


def test_parse_rejects_nonpositive_radius(single_joint_text):
    doc = json.loads(single_joint_text)
    doc["capsules"][0]["radius"] = 0.0
    with pytest.raises(ModelValidationError, match="radius"):
        parse_model(json.dumps(doc))


def test_parse_rejects_adjacent_collision_pair():
    doc = json.loads(json.dumps(SINGLE_JOINT_DOC))
    doc["capsules"].append(
        {"link": "base", "a": [0, 0, 0], "b": [0.05, 0, 0], "radius": 0.01}
    )
    doc["collision_pairs"] = [[0, 1]]  # arm and base are parent/child
    with pytest.raises(ModelValidationError, match="adjacent"):
        parse_model(json.dumps(doc))


def test_hand16_counts_match_document_walk(hand16, hand16_text):
    """Fixture counts checked against an independent walk of the document."""
    doc = json.loads(hand16_text)
    assert hand16.n_q == len(doc["joints"]) == 16
    assert len(hand16.capsules) == len(doc["capsules"]) == 15
    assert len(hand16.collision_pairs) == len(doc["collision_pairs"]) == 10
    assert len(hand16.keypoints) == len(doc["keypoints"]) == 10
    # every declared link is reachable from the root through the joints
    children = {j["child"] for j in doc["joints"]}
    roots = [l for l in doc["links"] if l not in children]
    assert roots == ["palm"]


def test_round_trip_identity(hand16):
    again = parse_model(serialize_model(hand16))
    assert again.links == hand16.links
    assert again.collision_pairs == hand16.collision_pairs
    for a, b in zip(again.joints, hand16.joints):
        assert a.name == b.name and a.parent == b.parent and a.child == b.child
        assert np.array_equal(a.axis, b.axis)
        assert np.array_equal(a.origin_xyz, b.origin_xyz)
        assert np.array_equal(a.origin_rpy, b.origin_rpy)
        assert a.lower == b.lower and a.upper == b.upper
    for a, b in zip(again.capsules, hand16.capsules):
        assert a.link == b.link and a.radius == b.radius
        assert np.array_equal(a.a, b.a) and np.array_equal(a.b, b.b)
    for a, b in zip(again.keypoints, hand16.keypoints):
        assert a.id == b.id and a.link == b.link
        assert np.array_equal(a.offset, b.offset)


def brute_force_pairs(model):
    out = []
    for i in range(len(model.capsules)):
        for j in range(len(model.capsules)):
            if i < j and not model.link_adjacent(
                model.capsules[i].link, model.capsules[j].link
            ):
                out.append((i, j))
    return out


def test_auto_pairs_single_capsule(single_joint_model):
    assert auto_collision_pairs(single_joint_model) == []


def test_auto_pairs_excludes_parent_child():
    doc = json.loads(json.dumps(SINGLE_JOINT_DOC))
    doc["capsules"].append(
        {"link": "base", "a": [0, 0, 0], "b": [0.05, 0, 0], "radius": 0.01}
    )
    model = parse_model(json.dumps(doc))
    assert auto_collision_pairs(model) == []


def test_auto_pairs_match_brute_force(hand16):
    pairs = auto_collision_pairs(hand16)
    assert pairs == brute_force_pairs(hand16)
    assert len(set(pairs)) == len(pairs)
    assert all(i < j for i, j in pairs)


def test_auto_pairs_used_when_field_absent(hand16_text):
    doc = json.loads(hand16_text)
    del doc["collision_pairs"]
    model = parse_model(json.dumps(doc))
    assert list(model.collision_pairs) == brute_force_pairs(model)


def test_clamp_identity_inside_limits(hand16):
    q = np.zeros(hand16.n_q)
    assert np.array_equal(clamp(hand16, q), q)


def test_clamp_projects_below_lower(single_joint_model):
    assert clamp(single_joint_model, [-10.0])[0] == -3.0


def test_clamp_dimension_mismatch(hand16):
    with pytest.raises(ValueError):
        clamp(hand16, np.zeros(3))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=16, max_size=16))
def test_clamp_matches_scalar_oracle_and_idempotent(q):
    model = fixture()
    q = np.asarray(q)
    out = clamp(model, q)
    expected = np.array(
        [min(max(v, j.lower), j.upper) for v, j in zip(q, model.joints)]
    )
    assert np.array_equal(out, expected)
    assert np.array_equal(clamp(model, out), out)


def fixture():
    from handretarget.traces import fixture_model

    return fixture_model()
