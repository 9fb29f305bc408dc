"""Motion-primitive vocabulary, plan containers and plan-to-trace replay.

One robot, one plan: a plan of length K assigns a primitive and a target pose
to each instant 1..K.  Replaying a plan against a scene reconstructs the full
state trace (robot pose, per-object position and carried/away flags) that the
temporal specifications are evaluated on -- independently of any solver
model, so it doubles as the validation oracle for decoded plans.

Variable/proposition naming shared with the constraint generator:

==============  =====================================================
``rx ry ra``    robot pose (x, y in mm; heading in degrees)
``ox<j> oy<j>`` object j centre
``op<j>``       object j carried flag         (proposition)
``oa<j>``       object j away flag            (proposition)
``act:<P>``     the *next* primitive is P     (false at the last instant)
``done:<P>``    the primitive arriving at this instant was P
                (false at instant 0)
==============  =====================================================
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Optional, Sequence

from .cltlb import Trace
from .scene import Scene

GOTO = "GoTo"
PICKUP = "PickUp"
DROPOFF = "DropOff"
REQ = "Req"
RES = "Res"

_OBJ_KINDS = (PICKUP, DROPOFF, REQ, RES)


@dataclass(frozen=True)
class PrimitiveKind:
    kind: str
    obj: Optional[int] = None  # 1-based object index for object primitives

    def __post_init__(self) -> None:
        if self.kind == GOTO:
            if self.obj is not None:
                raise ValueError("GoTo takes no object index")
        elif self.kind in _OBJ_KINDS:
            if self.obj is None or self.obj < 1:
                raise ValueError(f"{self.kind} needs a 1-based object index")
        else:
            raise ValueError(f"unknown primitive kind {self.kind!r}")

    @property
    def name(self) -> str:
        return GOTO if self.kind == GOTO else f"{self.kind}{self.obj}"

    def __str__(self) -> str:
        return self.name


def goto() -> PrimitiveKind:
    return PrimitiveKind(GOTO)


def pickup(j: int) -> PrimitiveKind:
    return PrimitiveKind(PICKUP, j)


def dropoff(j: int) -> PrimitiveKind:
    return PrimitiveKind(DROPOFF, j)


def req(j: int) -> PrimitiveKind:
    return PrimitiveKind(REQ, j)


def res(j: int) -> PrimitiveKind:
    return PrimitiveKind(RES, j)


# -- integer codes (solver side) ----------------------------------------------


def prim_code(p: PrimitiveKind, n_objects: int) -> int:
    """GoTo is 0; object primitives occupy per-kind blocks of size n_objects."""
    if p.kind == GOTO:
        return 0
    block = _OBJ_KINDS.index(p.kind)
    if not (1 <= p.obj <= n_objects):
        raise ValueError(f"object index {p.obj} outside 1..{n_objects}")
    return 1 + block * n_objects + (p.obj - 1)


def prim_from_code(code: int, n_objects: int) -> PrimitiveKind:
    if code == 0:
        return goto()
    code -= 1
    block, off = divmod(code, n_objects)
    if not (0 <= block < len(_OBJ_KINDS)):
        raise ValueError(f"primitive code out of range: {code + 1}")
    return PrimitiveKind(_OBJ_KINDS[block], off + 1)


def max_prim_code(n_objects: int) -> int:
    return 4 * n_objects


def all_primitives(n_objects: int) -> list[PrimitiveKind]:
    out = [goto()]
    for kind in _OBJ_KINDS:
        out.extend(PrimitiveKind(kind, j) for j in range(1, n_objects + 1))
    return out


# -- trace naming ---------------------------------------------------------------

VAR_RX = "rx"
VAR_RY = "ry"
VAR_RA = "ra"


def obj_x(j: int) -> str:
    return f"ox{j}"


def obj_y(j: int) -> str:
    return f"oy{j}"


def prop_carried(j: int) -> str:
    return f"op{j}"


def prop_away(j: int) -> str:
    return f"oa{j}"


def act_prop(p: PrimitiveKind) -> str:
    return f"act:{p.name}"


def done_prop(p: PrimitiveKind) -> str:
    return f"done:{p.name}"


# -- plans ------------------------------------------------------------------------


@dataclass(frozen=True)
class PlanStep:
    primitive: PrimitiveKind
    pose: tuple[int, int, float]  # x mm, y mm, heading deg


@dataclass(frozen=True)
class Plan:
    robot: int  # 1-based
    steps: tuple[PlanStep, ...]

    @property
    def length(self) -> int:
        return len(self.steps)

    def primitives(self) -> list[PrimitiveKind]:
        return [s.primitive for s in self.steps]


def plan_to_json_dict(plan: Plan) -> dict:
    steps = []
    for s in plan.steps:
        entry: dict = {"prim": s.primitive.kind}
        if s.primitive.obj is not None:
            entry["obj"] = s.primitive.obj
        entry["pose"] = [s.pose[0], s.pose[1], s.pose[2]]
        steps.append(entry)
    return {"robot": plan.robot, "steps": steps}


def plan_from_json_dict(data: dict) -> Plan:
    steps = []
    for s in data["steps"]:
        prim = PrimitiveKind(s["prim"], s.get("obj"))
        x, y, a = s["pose"]
        steps.append(PlanStep(prim, (int(x), int(y), float(a))))
    return Plan(int(data["robot"]), tuple(steps))


def save_plan(plan: Plan, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(plan_to_json_dict(plan), fh, indent=2)
        fh.write("\n")


def load_plan(path) -> Plan:
    with open(path, "r", encoding="utf-8") as fh:
        return plan_from_json_dict(json.load(fh))


# -- replay -------------------------------------------------------------------------


def gripper_offset(robot_l: int, object_l: int) -> int:
    """Centre-to-centre distance between a docked robot and the object it
    handles (the two squares abut)."""
    return (robot_l + object_l) // 2


def build_trace(plan: Plan, scene: Scene) -> Trace:
    """Reconstruct the full state trace a plan induces on a scene.

    Object positions move only at their drop-off instant (while carried the
    trace keeps the pre-pick position, matching the carry-stasis constraint);
    flags follow the pick/drop/request effects.  No legality checking happens
    here -- illegal plans produce traces that simply fail their specification.
    """
    robot = scene.agents[plan.robot - 1]
    K = plan.length
    n_obj = len(scene.objects)

    poses = [(robot.x, robot.y, robot.alpha)]
    obj_pos = [[(b.x, b.y)] for b in scene.objects]
    carried = [[False] for _ in scene.objects]
    away = [[False] for _ in scene.objects]

    for step in plan.steps:
        poses.append(step.pose)
        p = step.primitive
        for j in range(1, n_obj + 1):
            b = j - 1
            pos = obj_pos[b][-1]
            c = carried[b][-1]
            a = away[b][-1]
            if p.obj == j:
                if p.kind == PICKUP:
                    c = True
                elif p.kind == DROPOFF:
                    c = False
                    d = gripper_offset(robot.l, scene.objects[b].l)
                    pos = (step.pose[0] + d, step.pose[1])
                elif p.kind == REQ:
                    a = True
            obj_pos[b].append(pos)
            carried[b].append(c)
            away[b].append(a)

    values: dict[str, tuple] = {
        VAR_RX: tuple(p[0] for p in poses),
        VAR_RY: tuple(p[1] for p in poses),
        VAR_RA: tuple(p[2] for p in poses),
    }
    props: dict[str, tuple] = {}
    for j in range(1, n_obj + 1):
        values[obj_x(j)] = tuple(p[0] for p in obj_pos[j - 1])
        values[obj_y(j)] = tuple(p[1] for p in obj_pos[j - 1])
        props[prop_carried(j)] = tuple(carried[j - 1])
        props[prop_away(j)] = tuple(away[j - 1])

    prims = [s.primitive for s in plan.steps]
    for p in all_primitives(n_obj):
        props[act_prop(p)] = tuple(
            (k < K and prims[k] == p) for k in range(K + 1)
        )
        props[done_prop(p)] = tuple(
            (k >= 1 and prims[k - 1] == p) for k in range(K + 1)
        )
    return Trace(K, values, props)


# -- mission event names ---------------------------------------------------------

_PICK_RE = re.compile(r"^R(\d+)pO(\d+)$")
_DROP_RE = re.compile(r"^R(\d+)dO(\d+)aW(\d+)$")
_HOME_RE = re.compile(r"^r(\d+)$")
_REQ_RE = re.compile(r"^\?O(\d+)Away$")
_RES_RE = re.compile(r"^!O(\d+)Away$")


@dataclass(frozen=True)
class MissionEvent:
    """Parsed mission event name."""

    kind: str  # pick | drop | home | request | response
    robot: Optional[int] = None
    obj: Optional[int] = None
    workspace: Optional[int] = None


def parse_event(name: str) -> MissionEvent:
    m = _PICK_RE.match(name)
    if m:
        return MissionEvent("pick", robot=int(m.group(1)), obj=int(m.group(2)))
    m = _DROP_RE.match(name)
    if m:
        return MissionEvent(
            "drop", robot=int(m.group(1)), obj=int(m.group(2)), workspace=int(m.group(3))
        )
    m = _HOME_RE.match(name)
    if m:
        return MissionEvent("home", robot=int(m.group(1)))
    m = _REQ_RE.match(name)
    if m:
        return MissionEvent("request", obj=int(m.group(1)))
    m = _RES_RE.match(name)
    if m:
        return MissionEvent("response", obj=int(m.group(1)))
    raise ValueError(f"unknown mission event {name!r}")


def pick_event(robot: int, obj: int) -> str:
    return f"R{robot}pO{obj}"


def drop_event(robot: int, obj: int, workspace: int) -> str:
    return f"R{robot}dO{obj}aW{workspace}"


def home_event(robot: int) -> str:
    return f"r{robot}"
