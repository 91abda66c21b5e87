import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from handretarget import parse_model
from handretarget.traces import fixture_model

SINGLE_JOINT_DOC = {
    "links": ["base", "arm"],
    "joints": [
        {
            "name": "j0",
            "parent": "base",
            "child": "arm",
            "axis": [0, 0, 1],
            "origin_xyz": [0.1, 0.0, 0.0],
            "origin_rpy": [0.0, 0.0, 0.0],
            "limit": {"lower": -3.0, "upper": 3.0},
        }
    ],
    "capsules": [
        {"link": "arm", "a": [0.02, 0.0, 0.0], "b": [0.18, 0.0, 0.0], "radius": 0.01}
    ],
    "keypoints": [{"id": 1, "link": "arm", "offset": [0.2, 0.0, 0.0]}],
}


@pytest.fixture(scope="session")
def single_joint_text() -> str:
    return json.dumps(SINGLE_JOINT_DOC)


@pytest.fixture(scope="session")
def single_joint_model(single_joint_text):
    return parse_model(single_joint_text)


@pytest.fixture(scope="session")
def hand16():
    return fixture_model()


@pytest.fixture(scope="session")
def hand16_text() -> str:
    from importlib import resources

    return resources.files("handretarget.data").joinpath("hand16.json").read_text()
