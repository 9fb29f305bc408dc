"""Scene description: obstacle segments, square robots, square movable objects.

Units are millimetres for all geometry and degrees for headings.  Positions
are integers; only headings may be fractional.  Robots and objects are
axis-aligned squares given by side length and centre.  The optional workspace
list names the drop windows referenced by ``R_idO_jaW_k`` mission events.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence


@dataclass(frozen=True)
class Segment:
    x_i: int
    y_i: int
    x_f: int
    y_f: int

    def __post_init__(self) -> None:
        if (self.x_i, self.y_i) == (self.x_f, self.y_f):
            raise ValueError(f"degenerate obstacle segment at ({self.x_i},{self.y_i})")


@dataclass(frozen=True)
class RobotSpec:
    l: int
    x: int
    y: int
    alpha: float

    def __post_init__(self) -> None:
        if self.l <= 0:
            raise ValueError("robot side length must be positive")

    @property
    def pose(self) -> tuple[int, int, float]:
        return (self.x, self.y, self.alpha)


@dataclass(frozen=True)
class ObjectSpec:
    l: int
    x: int
    y: int
    carried: bool = False
    away: bool = False

    def __post_init__(self) -> None:
        if self.l <= 0:
            raise ValueError("object side length must be positive")


@dataclass(frozen=True)
class Workspace:
    """Axis-aligned drop window; a point target is a zero-width window."""

    x_min: int
    x_max: int
    y_min: int
    y_max: int

    def __post_init__(self) -> None:
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValueError("workspace window has reversed bounds")

    def contains(self, x: float, y: float, tol: float = 0.0) -> bool:
        return (self.x_min - tol <= x <= self.x_max + tol
                and self.y_min - tol <= y <= self.y_max + tol)


@dataclass(frozen=True)
class Scene:
    obstacles: tuple[Segment, ...]
    agents: tuple[RobotSpec, ...]
    objects: tuple[ObjectSpec, ...]
    workspaces: tuple[Workspace, ...] = ()

    def bounding_box(self) -> tuple[int, int, int, int]:
        """(x_min, y_min, x_max, y_max) over every scene element."""
        xs: list[int] = []
        ys: list[int] = []
        for s in self.obstacles:
            xs += [s.x_i, s.x_f]
            ys += [s.y_i, s.y_f]
        for a in self.agents:
            xs += [a.x - a.l, a.x + a.l]
            ys += [a.y - a.l, a.y + a.l]
        for b in self.objects:
            xs += [b.x - b.l, b.x + b.l]
            ys += [b.y - b.l, b.y + b.l]
        for w in self.workspaces:
            xs += [w.x_min, w.x_max]
            ys += [w.y_min, w.y_max]
        if not xs:
            return (0, 0, 0, 0)
        return (min(xs), min(ys), max(xs), max(ys))


# -- geometry helpers ----------------------------------------------------------


def square_segment_intersects(cx: float, cy: float, half: float, seg: Segment) -> bool:
    """Does the axis-aligned square (centre, half-side) intersect the segment?

    Liang-Barsky clip of the segment against the square's rectangle.
    """
    x0, y0 = seg.x_i - cx, seg.y_i - cy
    dx, dy = seg.x_f - seg.x_i, seg.y_f - seg.y_i
    t0, t1 = 0.0, 1.0
    for p, q in ((-dx, x0 + half), (dx, half - x0), (-dy, y0 + half), (dy, half - y0)):
        if p == 0:
            if q < 0:
                return False
        else:
            r = q / p
            if p < 0:
                t0 = max(t0, r)
            else:
                t1 = min(t1, r)
            if t0 > t1:
                return False
    return True


def squares_overlap(c1: tuple[float, float], h1: float, c2: tuple[float, float], h2: float) -> bool:
    return max(abs(c1[0] - c2[0]), abs(c1[1] - c2[1])) < h1 + h2


# -- validation -----------------------------------------------------------------


def validate(scene: Scene) -> list[str]:
    """Invariant violations as human-readable strings (empty = valid)."""
    problems: list[str] = []
    for j, b in enumerate(scene.objects, start=1):
        if b.carried:
            problems.append(f"object {j} starts carried")
        if b.away:
            problems.append(f"object {j} starts away")
    for i, a in enumerate(scene.agents, start=1):
        half = a.l / 2
        for s_idx, seg in enumerate(scene.obstacles, start=1):
            if square_segment_intersects(a.x, a.y, half, seg):
                problems.append(f"robot {i} initial footprint intersects obstacle {s_idx}")
        for j, b in enumerate(scene.objects, start=1):
            if squares_overlap((a.x, a.y), half, (b.x, b.y), b.l / 2):
                problems.append(f"robot {i} initial footprint overlaps object {j}")
        for i2 in range(i + 1, len(scene.agents) + 1):
            other = scene.agents[i2 - 1]
            if squares_overlap((a.x, a.y), half, (other.x, other.y), other.l / 2):
                problems.append(f"robots {i} and {i2} overlap initially")
    return problems


# -- serialisation ----------------------------------------------------------------


def to_json_dict(scene: Scene) -> dict:
    out = {
        "obstacles": [[s.x_i, s.y_i, s.x_f, s.y_f] for s in scene.obstacles],
        "agents": [{"l": a.l, "pose": [a.x, a.y, a.alpha]} for a in scene.agents],
        "objects": [{"l": b.l, "pos": [b.x, b.y]} for b in scene.objects],
    }
    if scene.workspaces:
        out["workspaces"] = [[w.x_min, w.x_max, w.y_min, w.y_max] for w in scene.workspaces]
    return out


def from_json_dict(data: dict) -> Scene:
    def fail(which: str, exc: Exception):
        raise ValueError(f"scene field {which!r}: {exc}") from exc

    try:
        obstacles = tuple(Segment(*map(int, row)) for row in data["obstacles"])
    except ValueError:
        raise
    except Exception as exc:
        fail("obstacles", exc)
    try:
        agents = tuple(
            RobotSpec(int(a["l"]), int(a["pose"][0]), int(a["pose"][1]), float(a["pose"][2]))
            for a in data["agents"]
        )
    except Exception as exc:
        fail("agents", exc)
    try:
        objects = tuple(
            ObjectSpec(int(b["l"]), int(b["pos"][0]), int(b["pos"][1])) for b in data["objects"]
        )
    except Exception as exc:
        fail("objects", exc)
    workspaces: tuple[Workspace, ...] = ()
    if "workspaces" in data:
        try:
            workspaces = tuple(Workspace(*map(int, row)) for row in data["workspaces"])
        except Exception as exc:
            fail("workspaces", exc)
    return Scene(obstacles, agents, objects, workspaces)


def save(scene: Scene, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_json_dict(scene), fh, indent=2)
        fh.write("\n")


def load(path) -> Scene:
    with open(path, "r", encoding="utf-8") as fh:
        scene = from_json_dict(json.load(fh))
    problems = validate(scene)
    if problems:
        raise ValueError("invalid scene: " + "; ".join(problems))
    return scene
