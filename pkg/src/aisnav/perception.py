"""Sensor simulation and antigen classification.

Antigen codes (1-based)::

    1 target unseen     2 target seen
    3 obstacle right    4 obstacle rear     5 obstacle left
    6 collision right   7 collision rear    8 collision left
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .platform import INFRARED, MAX_IS_CLOSEST, REAR, RIGHT, PlatformProfile, ir_reading
from .simworld import RobotState, World, cast_rays, visible_blob

TARGET_UNSEEN = 1
TARGET_SEEN = 2
OBSTACLE_CODES = {RIGHT: 3, REAR: 4, "left": 5}
COLLISION_CODES = {RIGHT: 6, REAR: 7, "left": 8}

BLOB_CENTRE_HALF_ANGLE = math.radians(10.0)

CENTRE = "centre"
LEFT = "left"


@dataclass(frozen=True)
class SensorFrame:
    readings: tuple[float, ...]
    blob: Optional[tuple[float, float]] = None


@dataclass(frozen=True)
class Antigen:
    code: int

    def __post_init__(self):
        if not 1 <= self.code <= 8:
            raise ValueError(f"antigen code {self.code} outside 1-8")

    @property
    def index(self) -> int:
        return self.code - 1

    @property
    def is_collision(self) -> bool:
        return self.code >= 6

    @property
    def is_obstacle(self) -> bool:
        return 3 <= self.code <= 5


def sense(world: World, state: RobotState, profile: PlatformProfile,
          color: str = "blue") -> SensorFrame:
    """Read every range sensor and the camera.

    Ranges are measured from the edge of the body circle along each sensor
    bearing. Sonar returns metres clamped to the sensor range; infrared
    returns the exponential intensity model, 0 at or beyond range.
    """
    radius = profile.body_radius
    bearings = state.theta + np.asarray(profile.sensor_bearings)
    dist = cast_rays(world.walls, state.x, state.y, bearings, profile.sensor_range + radius)
    dist = np.clip(dist - radius, 0.0, profile.sensor_range)
    if profile.sensor_kind == INFRARED:
        readings = tuple(ir_reading(float(d), profile.sensor_range) for d in dist)
    else:
        readings = tuple(float(d) for d in dist)
    return SensorFrame(readings, visible_blob(world, state, profile, color))


def closest_index(readings, profile: PlatformProfile) -> int:
    """Index of the reading that signals the nearest obstacle (lowest index on ties)."""
    arr = np.asarray(readings, dtype=float)
    return int(np.argmax(arr) if profile.proximity_comparator == MAX_IS_CLOSEST else np.argmin(arr))


def classify_antigen(frame: SensorFrame, profile: PlatformProfile) -> Antigen:
    """Map a sensor frame to one of the eight antigen codes.

    Collision beats obstacle beats target seen beats target unseen.
    """
    i = closest_index(frame.readings, profile)
    value = frame.readings[i]
    side = profile.orientation_map[i]
    if profile.proximity_comparator == MAX_IS_CLOSEST:
        collision, obstacle = value > profile.tau2, value > profile.tau1
    else:
        collision, obstacle = value < profile.tau2, value < profile.tau1
    if collision:
        return Antigen(COLLISION_CODES[side])
    if obstacle:
        return Antigen(OBSTACLE_CODES[side])
    return Antigen(TARGET_SEEN if frame.blob is not None else TARGET_UNSEEN)


def blob_zone(bearing: float, profile: PlatformProfile | None = None) -> str:
    """'left', 'centre' or 'right' for a blob at `bearing` (positive is left)."""
    if abs(bearing) <= BLOB_CENTRE_HALF_ANGLE + 1e-12:
        return CENTRE
    return LEFT if bearing > 0 else RIGHT
