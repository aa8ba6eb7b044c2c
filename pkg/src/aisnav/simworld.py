"""Fixed-timestep 2D world: geometry, pose integration, contacts and rays.

Walls are the only solid geometry. Markers, blocks and goals are visual or
task features that the robot can drive through; range sensors and contact
detection only see walls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from ._kernels import _ray_discs, _ray_segments, _segment_distance
from .platform import PlatformProfile, SpeedCommand

DT = 0.1                 # seconds per control tick
TIME_LIMIT = 900.0       # seconds before a run counts as failed
CONTACT_TOL = 1e-6       # clearance below which the body touches a wall
STRAIGHT_EPS = 1e-9      # |omega| below which motion is a straight line


class WorldError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Disc:
    x: float
    y: float
    r: float
    color: str = ""


@dataclass(frozen=True, eq=False)
class World:
    width: float
    height: float
    walls: np.ndarray                  # (k, 4) rows of x1 y1 x2 y2
    markers: tuple[Disc, ...] = ()
    goal: Optional[Disc] = None
    block: Optional[Disc] = None
    start: tuple[float, float, float] = (0.0, 0.0, 0.0)
    name: str = "world"

    def __post_init__(self):
        walls = np.asarray(self.walls, dtype=float).reshape(-1, 4)
        walls.setflags(write=False)
        object.__setattr__(self, "walls", walls)
        object.__setattr__(self, "markers", tuple(self.markers))
        if self.goal is not None and self.block is not None:
            raise WorldError("a world may define a goal or a block, not both")
        w, h = self.width, self.height
        if w <= 0 or h <= 0:
            raise WorldError("world dimensions must be positive")

        def inside(x, y):
            return -1e-9 <= x <= w + 1e-9 and -1e-9 <= y <= h + 1e-9

        for x1, y1, x2, y2 in walls:
            if not (inside(x1, y1) and inside(x2, y2)):
                raise WorldError(f"wall ({x1}, {y1}, {x2}, {y2}) outside world bounds")
        for d in self.markers + tuple(x for x in (self.goal, self.block) if x):
            if not inside(d.x, d.y):
                raise WorldError(f"feature at ({d.x}, {d.y}) outside world bounds")
        if not inside(self.start[0], self.start[1]):
            raise WorldError("start pose outside world bounds")

    @property
    def completion(self) -> Optional[Disc]:
        return self.goal if self.goal is not None else self.block


@dataclass(frozen=True)
class RobotState:
    x: float
    y: float
    theta: float
    ticks: int = 0
    t: float = 0.0
    c: int = 0
    in_contact: bool = False

    @property
    def pose(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.theta)


def initial_state(world: World, pose: tuple[float, float, float] | None = None) -> RobotState:
    x, y, theta = world.start if pose is None else pose
    return RobotState(x, y, theta)


# -- geometry -------------------------------------------------------------

def wrap_angle(a: float) -> float:
    """Wrap to [-pi, pi)."""
    return (a + math.pi) % (2.0 * math.pi) - math.pi


def wall_distance(walls: np.ndarray, x: float, y: float) -> float:
    """Distance from a point to the nearest wall segment (inf with no walls)."""
    return _segment_distance(walls, float(x), float(y))


def cast_rays(walls: np.ndarray, x: float, y: float, bearings: np.ndarray,
              max_range: float, circles: Sequence[Disc] = ()) -> np.ndarray:
    """Distances along absolute `bearings` from (x, y) to the first hit.

    Walls are always tested; `circles` adds solid discs. Each result is
    clamped to `max_range`.
    """
    bearings = np.ascontiguousarray(bearings, dtype=float)
    out = _ray_segments(walls, float(x), float(y), bearings, float(max_range))
    if circles:
        discs = np.array([[d.x, d.y, d.r] for d in circles], dtype=float)
        out = np.minimum(out, _ray_discs(discs, float(x), float(y), bearings, float(max_range)))
    return out


def cast_ray(world: World, origin: tuple[float, float], bearing: float,
             max_range: float) -> float:
    """Distance from `origin` along absolute `bearing` to the nearest wall."""
    if max_range <= 0:
        raise ValueError("max_range must be positive")
    return float(cast_rays(world.walls, origin[0], origin[1],
                           np.array([bearing]), max_range)[0])


# -- motion ---------------------------------------------------------------

def _arc_pose(x, y, theta, v, omega, tau):
    """Pose after following (v, omega) for `tau` seconds along an exact arc."""
    if abs(omega) < STRAIGHT_EPS:
        return x + v * tau * math.cos(theta), y + v * tau * math.sin(theta), theta
    th = theta + omega * tau
    k = v / omega
    return x + k * (math.sin(th) - math.sin(theta)), y - k * (math.cos(th) - math.cos(theta)), th


def step(world: World, state: RobotState, cmd: SpeedCommand, profile: PlatformProfile,
         dt: float = DT) -> RobotState:
    """Advance the robot by one tick.

    The body circle is swept along the arc in sub-steps no longer than a
    quarter of the body radius. If it would penetrate a wall the position
    stops at the contact point (found by bisection) while the heading still
    turns, since a round body can always pivot in place.

    A contact event increments the collision count once. The event lasts
    until the body has backed out of the platform's collision band, so
    grinding along a wall is a single collision.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    walls = world.walls
    radius = profile.body_radius
    x0, y0, th0 = state.x, state.y, state.theta
    v, omega = cmd.v, cmd.omega

    path = abs(v) * dt
    n_sub = max(1, math.ceil(path / (0.25 * radius)))
    start_clear = wall_distance(walls, x0, y0) - radius

    def blocked(frac):
        px, py, _ = _arc_pose(x0, y0, th0, v, omega, dt * frac)
        clear = wall_distance(walls, px, py) - radius
        # a robot already overlapping may still move outward
        return clear < min(0.0, start_clear) - 1e-12

    stop = 1.0
    if path > 0 and len(walls):
        lo = 0.0
        for k in range(1, n_sub + 1):
            hi = k / n_sub
            if blocked(hi):
                for _ in range(50):
                    mid = 0.5 * (lo + hi)
                    if blocked(mid):
                        hi = mid
                    else:
                        lo = mid
                stop = lo
                break
            lo = hi

    x, y, _ = _arc_pose(x0, y0, th0, v, omega, dt * stop)
    theta = wrap_angle(th0 + omega * dt)
    clearance = wall_distance(walls, x, y) - radius
    touching = stop < 1.0 or clearance <= CONTACT_TOL
    c = state.c + (1 if touching and not state.in_contact else 0)
    in_contact = touching or (state.in_contact and clearance <= profile.collision_distance)
    ticks = state.ticks + 1
    return RobotState(x, y, theta, ticks=ticks, t=ticks * dt, c=c, in_contact=in_contact)


# -- vision and task ------------------------------------------------------

def visible_blob(world: World, state: RobotState, profile: PlatformProfile,
                 color: str) -> Optional[tuple[float, float]]:
    """Bearing and angular width of the largest visible `color` target.

    Candidates are markers and the block. A candidate is visible when its
    centre lies within half the camera field of view of the heading and the
    line of sight to its centre does not cross a wall.
    """
    best = None
    half_fov = profile.camera_fov / 2.0
    candidates = list(world.markers)
    if world.block is not None:
        candidates.append(world.block)
    for disc in candidates:
        if disc.color != color:
            continue
        dx, dy = disc.x - state.x, disc.y - state.y
        d = math.hypot(dx, dy)
        bearing = wrap_angle(math.atan2(dy, dx) - state.theta) if d > 0 else 0.0
        if abs(bearing) > half_fov:
            continue
        if d > 0:
            hit = cast_rays(world.walls, state.x, state.y,
                            np.array([state.theta + bearing]), d)[0]
            if hit < d:
                continue
        width = 2.0 * math.asin(min(1.0, disc.r / d)) if d > 0 else math.pi
        if best is None or width > best[1]:
            best = (bearing, width)
    return best


def task_complete(world: World, state: RobotState, profile: PlatformProfile) -> bool:
    target = world.completion
    if target is None:
        raise WorldError("world defines neither a goal nor a block")
    return math.hypot(state.x - target.x, state.y - target.y) <= target.r + profile.body_radius


# -- world files ----------------------------------------------------------

def parse_world(text: str | Iterable[str], name: str = "world") -> World:
    """Parse the plain-text world format.

    Recognised lines (units metres and degrees)::

        WORLD w h
        START x y theta_deg
        WALL x1 y1 x2 y2
        MARKER x y r color
        BLOCK x y r color
        GOAL x y r
    """
    lines = text.splitlines() if isinstance(text, str) else list(text)
    size = None
    start = None
    walls, markers = [], []
    goal = block = None

    def nums(tokens, count, lineno):
        if len(tokens) != count:
            raise WorldError(f"{tokens[0] if tokens else 'line'} expects {count - 1} values",
                             lineno)
        try:
            return [float(tok) for tok in tokens[1:]]
        except ValueError:
            raise WorldError("non-numeric value", lineno) from None

    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        key = tokens[0].upper()
        if key == "WORLD":
            size = nums(tokens, 3, lineno)
        elif key == "START":
            x, y, deg = nums(tokens, 4, lineno)
            start = (x, y, math.radians(deg))
        elif key == "WALL":
            walls.append(nums(tokens, 5, lineno))
        elif key in ("MARKER", "BLOCK"):
            x, y, r = nums(tokens[:4], 4, lineno)
            if len(tokens) != 5:
                raise WorldError(f"{key} expects x y r color", lineno)
            disc = Disc(x, y, r, tokens[4].lower())
            if key == "MARKER":
                markers.append(disc)
            elif block is not None:
                raise WorldError("only one BLOCK allowed", lineno)
            else:
                block = disc
        elif key == "GOAL":
            if goal is not None:
                raise WorldError("only one GOAL allowed", lineno)
            x, y, r = nums(tokens, 4, lineno)
            goal = Disc(x, y, r)
        else:
            raise WorldError(f"unknown directive {tokens[0]!r}", lineno)
    if size is None:
        raise WorldError("missing WORLD line")
    if start is None:
        raise WorldError("missing START line")
    return World(size[0], size[1], np.array(walls, dtype=float).reshape(-1, 4),
                 tuple(markers), goal, block, start, name)


def read_world(path) -> World:
    from pathlib import Path
    p = Path(path)
    return parse_world(p.read_text(), name=p.stem)


def box_walls(x0: float, y0: float, x1: float, y1: float) -> list[list[float]]:
    """Four wall segments outlining an axis-aligned rectangle."""
    return [[x0, y0, x1, y0], [x1, y0, x1, y1], [x1, y1, x0, y1], [x0, y1, x0, y0]]


def with_start(world: World, pose: tuple[float, float, float]) -> World:
    return replace(world, start=pose)
