"""Robot-hand description: kinematic tree, joint limits, collision capsules, keypoints.

The on-disk format is a JSON object with top-level keys:

* ``links``: array of link name strings.
* ``joints``: array of ``{"name", "parent", "child", "axis": [x,y,z],
  "origin_xyz": [m,m,m], "origin_rpy": [rad,rad,rad],
  "limit": {"lower", "upper"}}``. All joints are revolute.
* ``capsules``: array of ``{"link", "a": [3], "b": [3], "radius"}`` with
  endpoints in the link frame (meters). ``a == b`` degenerates to a sphere.
* ``keypoints``: array of ``{"id", "link", "offset": [3]}`` with ids 1..N
  contiguous.
* ``collision_pairs`` (optional): array of ``[i, j]`` capsule index pairs to
  monitor. When absent, :func:`auto_collision_pairs` supplies all pairs on
  links that are neither identical nor parent/child.

SI units throughout; rotations are extrinsic roll-pitch-yaw.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

AXIS_UNIT_TOL = 1e-9


class ModelError(ValueError):
    """Base class for model-file problems."""


class ModelSyntaxError(ModelError):
    """Malformed document (not valid JSON / wrong shapes)."""


class ModelValidationError(ModelError):
    """Well-formed document violating a model invariant."""


def rpy_to_matrix(rpy) -> np.ndarray:
    """Rotation matrix for extrinsic X-Y-Z roll-pitch-yaw angles."""
    r, p, y = float(rpy[0]), float(rpy[1]), float(rpy[2])
    cr, sr = math.cos(r), math.sin(r)
    cp, sp = math.cos(p), math.sin(p)
    cy, sy = math.cos(y), math.sin(y)
    rx = np.array([[1.0, 0.0, 0.0], [0.0, cr, -sr], [0.0, sr, cr]])
    ry = np.array([[cp, 0.0, sp], [0.0, 1.0, 0.0], [-sp, 0.0, cp]])
    rz = np.array([[cy, -sy, 0.0], [sy, cy, 0.0], [0.0, 0.0, 1.0]])
    return rz @ ry @ rx


@dataclass(frozen=True, eq=False)
class JointSpec:
    """Revolute joint between two links."""

    name: str
    parent: str
    child: str
    axis: np.ndarray            # unit 3-vector in the joint frame
    origin_xyz: np.ndarray      # translation parent -> joint frame (m)
    origin_rpy: np.ndarray      # fixed rotation parent -> joint frame (rad)
    lower: float
    upper: float


@dataclass(frozen=True, eq=False)
class CapsuleSpec:
    """Segment-plus-radius collision primitive attached to a link."""

    link: str
    a: np.ndarray               # endpoint in link frame (m)
    b: np.ndarray
    radius: float


@dataclass(frozen=True, eq=False)
class KeypointSpec:
    """Tracking site attached to a link; ids are 1..N contiguous."""

    id: int
    link: str
    offset: np.ndarray          # position in link frame (m)


@dataclass(frozen=True, eq=False)
class HandModel:
    """Validated, immutable hand description with precomputed traversal data.

    ``joint_order`` is a topological ordering of joint indices (root first) so
    forward kinematics never looks up an unresolved parent pose. ``chains``
    maps each link to the root-to-link sequence of joint indices, which is the
    support of any point Jacobian on that link.
    """

    links: tuple[str, ...]
    joints: tuple[JointSpec, ...]
    capsules: tuple[CapsuleSpec, ...]
    keypoints: tuple[KeypointSpec, ...]
    collision_pairs: tuple[tuple[int, int], ...]
    base_link: str = field(init=False, default="")
    joint_order: tuple[int, ...] = field(init=False, default=())
    chains: dict = field(init=False, default_factory=dict)
    origin_rotations: tuple = field(init=False, default=())
    lower_limits: np.ndarray = field(init=False, default=None)
    upper_limits: np.ndarray = field(init=False, default=None)

    def __post_init__(self):
        base, order, chains = _tree_structure(self.links, self.joints)
        object.__setattr__(self, "base_link", base)
        object.__setattr__(self, "joint_order", order)
        object.__setattr__(self, "chains", chains)
        object.__setattr__(
            self,
            "origin_rotations",
            tuple(rpy_to_matrix(j.origin_rpy) for j in self.joints),
        )
        object.__setattr__(
            self, "lower_limits", np.array([j.lower for j in self.joints])
        )
        object.__setattr__(
            self, "upper_limits", np.array([j.upper for j in self.joints])
        )

    @property
    def n_q(self) -> int:
        return len(self.joints)

    def link_adjacent(self, link_a: str, link_b: str) -> bool:
        """True when the links are identical or parent/child in the tree."""
        if link_a == link_b:
            return True
        for j in self.joints:
            if {j.parent, j.child} == {link_a, link_b}:
                return True
        return False


def _tree_structure(links, joints):
    """Validate the joint graph is a rooted tree; return base, order, chains."""
    link_set = set(links)
    child_of = {}
    for j in joints:
        if j.child in child_of:
            raise ModelValidationError(
                f"link '{j.child}' has two parent joints"
            )
        child_of[j.child] = j

    roots = [l for l in links if l not in child_of]
    if len(roots) != 1:
        raise ModelValidationError(
            f"joint graph must have exactly one root link, found {roots}"
        )
    base = roots[0]

    # Walk from each link to the root; detect cycles and disconnected links.
    chains: dict[str, tuple[int, ...]] = {base: ()}
    joint_index = {j.name: i for i, j in enumerate(joints)}
    for link in links:
        if link in chains:
            continue
        path = []
        cur = link
        seen = set()
        while cur != base:
            if cur in seen:
                raise ModelValidationError(f"cycle through link '{cur}'")
            seen.add(cur)
            j = child_of.get(cur)
            if j is None:
                raise ModelValidationError(
                    f"link '{cur}' is not connected to the base"
                )
            path.append(joint_index[j.name])
            cur = j.parent
        chains[link] = tuple(reversed(path))

    # Topological order: joints sorted by chain depth of their child link.
    order = tuple(
        sorted(range(len(joints)), key=lambda i: len(chains[joints[i].child]))
    )
    _ = link_set
    return base, order, chains


def _require(cond: bool, msg: str):
    if not cond:
        raise ModelValidationError(msg)


def _vec3(obj, where: str) -> np.ndarray:
    try:
        v = np.array([float(x) for x in obj], dtype=float)
    except (TypeError, ValueError) as e:
        raise ModelSyntaxError(f"{where}: expected 3 numbers") from e
    if v.shape != (3,):
        raise ModelSyntaxError(f"{where}: expected 3 numbers, got {len(v)}")
    return v


def parse_model(text: str) -> HandModel:
    """Parse and validate a model document.

    Raises :class:`ModelSyntaxError` for malformed documents and
    :class:`ModelValidationError` for structural violations (cycles, dangling
    link references, inverted limits, non-unit axes), naming the offending
    field.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelSyntaxError(f"invalid model document: {e}") from e
    if not isinstance(doc, dict):
        raise ModelSyntaxError("model document must be a JSON object")
    for key in ("links", "joints", "capsules", "keypoints"):
        if key not in doc:
            raise ModelSyntaxError(f"missing top-level key '{key}'")

    links = tuple(str(l) for l in doc["links"])
    _require(len(set(links)) == len(links), "duplicate link names")
    link_set = set(links)

    joints = []
    for jd in doc["joints"]:
        try:
            axis = _vec3(jd["axis"], f"joint '{jd.get('name', '?')}' axis")
            spec = JointSpec(
                name=str(jd["name"]),
                parent=str(jd["parent"]),
                child=str(jd["child"]),
                axis=axis,
                origin_xyz=_vec3(jd["origin_xyz"], "origin_xyz"),
                origin_rpy=_vec3(jd["origin_rpy"], "origin_rpy"),
                lower=float(jd["limit"]["lower"]),
                upper=float(jd["limit"]["upper"]),
            )
        except (KeyError, TypeError) as e:
            raise ModelSyntaxError(f"malformed joint entry: {e}") from e
        _require(
            abs(np.linalg.norm(spec.axis) - 1.0) <= AXIS_UNIT_TOL,
            f"joint '{spec.name}': axis is not a unit vector",
        )
        _require(
            spec.lower <= spec.upper,
            f"joint '{spec.name}': lower limit exceeds upper limit",
        )
        for ref, val in (("parent", spec.parent), ("child", spec.child)):
            _require(
                val in link_set,
                f"joint '{spec.name}': {ref} references undeclared link '{val}'",
            )
        joints.append(spec)
    _require(
        len({j.name for j in joints}) == len(joints), "duplicate joint names"
    )

    capsules = []
    for cd in doc["capsules"]:
        try:
            spec = CapsuleSpec(
                link=str(cd["link"]),
                a=_vec3(cd["a"], "capsule endpoint a"),
                b=_vec3(cd["b"], "capsule endpoint b"),
                radius=float(cd["radius"]),
            )
        except (KeyError, TypeError) as e:
            raise ModelSyntaxError(f"malformed capsule entry: {e}") from e
        _require(
            spec.link in link_set,
            f"capsule references undeclared link '{spec.link}'",
        )
        _require(spec.radius > 0.0, f"capsule on '{spec.link}': radius must be > 0")
        capsules.append(spec)

    keypoints = []
    for kd in doc["keypoints"]:
        try:
            spec = KeypointSpec(
                id=int(kd["id"]),
                link=str(kd["link"]),
                offset=_vec3(kd["offset"], "keypoint offset"),
            )
        except (KeyError, TypeError) as e:
            raise ModelSyntaxError(f"malformed keypoint entry: {e}") from e
        _require(
            spec.link in link_set,
            f"keypoint {spec.id} references undeclared link '{spec.link}'",
        )
        keypoints.append(spec)
    ids = sorted(k.id for k in keypoints)
    _require(
        ids == list(range(1, len(keypoints) + 1)),
        f"keypoint ids must be 1..N contiguous, got {ids}",
    )

    model = HandModel(
        links=links,
        joints=tuple(joints),
        capsules=tuple(capsules),
        keypoints=tuple(sorted(keypoints, key=lambda k: k.id)),
        collision_pairs=(),
    )

    if "collision_pairs" in doc and doc["collision_pairs"] is not None:
        pairs = []
        for entry in doc["collision_pairs"]:
            i, j = int(entry[0]), int(entry[1])
            _require(
                0 <= i < len(capsules) and 0 <= j < len(capsules),
                f"collision pair [{i}, {j}] out of capsule range",
            )
            _require(i != j, f"collision pair [{i}, {j}] repeats a capsule")
            la, lb = capsules[i].link, capsules[j].link
            _require(
                not model.link_adjacent(la, lb),
                f"collision pair [{i}, {j}] joins adjacent links "
                f"'{la}' and '{lb}'",
            )
            pairs.append((min(i, j), max(i, j)))
        _require(
            len(set(pairs)) == len(pairs), "duplicate collision pairs"
        )
        object.__setattr__(model, "collision_pairs", tuple(pairs))
    else:
        object.__setattr__(
            model, "collision_pairs", tuple(auto_collision_pairs(model))
        )
    return model


def load_model(path) -> HandModel:
    with open(path, "r", encoding="utf-8") as f:
        return parse_model(f.read())


def serialize_model(model: HandModel) -> str:
    """Emit the document form; ``parse_model`` of the result is field-identical."""
    doc = {
        "links": list(model.links),
        "joints": [
            {
                "name": j.name,
                "parent": j.parent,
                "child": j.child,
                "axis": list(j.axis),
                "origin_xyz": list(j.origin_xyz),
                "origin_rpy": list(j.origin_rpy),
                "limit": {"lower": j.lower, "upper": j.upper},
            }
            for j in model.joints
        ],
        "capsules": [
            {"link": c.link, "a": list(c.a), "b": list(c.b), "radius": c.radius}
            for c in model.capsules
        ],
        "keypoints": [
            {"id": k.id, "link": k.link, "offset": list(k.offset)}
            for k in model.keypoints
        ],
        "collision_pairs": [list(p) for p in model.collision_pairs],
    }
    return json.dumps(doc, indent=2)


def auto_collision_pairs(model: HandModel) -> list[tuple[int, int]]:
    """All capsule pairs on non-identical, non-parent/child links.

    Ordering is lexicographic by (i, j) so monitored-pair lists are
    reproducible across runs.
    """
    pairs = []
    for i in range(len(model.capsules)):
        for j in range(i + 1, len(model.capsules)):
            if not model.link_adjacent(model.capsules[i].link, model.capsules[j].link):
                pairs.append((i, j))
    return pairs


def clamp(model: HandModel, q) -> np.ndarray:
    """Project a configuration into the joint-limit box componentwise."""
    q = np.asarray(q, dtype=float)
    if q.shape != (model.n_q,):
        raise ValueError(
            f"configuration has shape {q.shape}, expected ({model.n_q},)"
        )
    return np.minimum(np.maximum(q, model.lower_limits), model.upper_limits)
