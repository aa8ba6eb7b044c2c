"""Robot platform profiles and wheel-speed to unicycle conversion.

Genomes express wheel speeds in epuck speed units per second. One unit is
``PSI`` radians of wheel rotation, so wheel-speed pairs can be replayed on a
platform with different wheel radius by converting them to a linear and
angular velocity pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping

PSI = 0.00683  # radians of wheel rotation per epuck speed unit

IR_MAX = 4095.0
IR_DECAY = 0.02     # metres; reading(d) = IR_MAX * exp(-d / IR_DECAY)

INFRARED = "infrared"
SONAR = "sonar"
MAX_IS_CLOSEST = "max_is_closest"
MIN_IS_CLOSEST = "min_is_closest"

RIGHT = "right"
REAR = "rear"
LEFT = "left"


@dataclass(frozen=True)
class PlatformProfile:
    name: str
    wheel_radius: float
    axle_length: float
    body_radius: float
    sensor_kind: str
    sensor_bearings: tuple[float, ...]
    sensor_range: float
    tau1: float
    tau2: float
    proximity_comparator: str
    orientation_map: tuple[str, ...]
    camera_fov: float = math.radians(60.0)
    zeta: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "sensor_bearings", tuple(self.sensor_bearings))
        object.__setattr__(self, "orientation_map", tuple(self.orientation_map))
        if len(self.sensor_bearings) != len(self.orientation_map):
            raise ValueError("sensor_bearings and orientation_map lengths differ")
        if self.sensor_kind == INFRARED:
            if self.proximity_comparator != MAX_IS_CLOSEST or not self.tau1 < self.tau2:
                raise ValueError("infrared profiles need max_is_closest and tau1 < tau2")
        elif self.sensor_kind == SONAR:
            if self.proximity_comparator != MIN_IS_CLOSEST or not self.tau2 < self.tau1:
                raise ValueError("sonar profiles need min_is_closest and tau2 < tau1")
        else:
            raise ValueError(f"unknown sensor kind {self.sensor_kind!r}")
        if any(o not in (RIGHT, REAR, LEFT) for o in self.orientation_map):
            raise ValueError("orientation_map entries must be right, rear or left")

    @property
    def sensor_count(self) -> int:
        return len(self.sensor_bearings)

    @property
    def collision_distance(self) -> float:
        """Clearance in metres at which readings cross the collision threshold."""
        if self.sensor_kind == SONAR:
            return self.tau2
        return ir_distance(self.tau2)


@dataclass(frozen=True)
class SpeedCommand:
    v: float      # m/s
    omega: float  # rad/s, counter-clockwise positive

    def __post_init__(self):
        if not (math.isfinite(self.v) and math.isfinite(self.omega)):
            raise ValueError("speed command must be finite")


def ir_reading(d: float, sensor_range: float) -> float:
    """Infrared response for an obstacle `d` metres from the body edge."""
    if d >= sensor_range:
        return 0.0
    return float(round(IR_MAX * math.exp(-max(d, 0.0) / IR_DECAY)))


def ir_distance(reading: float) -> float:
    """Inverse of the infrared response (without rounding)."""
    return -IR_DECAY * math.log(reading / IR_MAX)


def psi_to_radians(speed: float) -> float:
    """Convert epuck speed units per second to radians per second."""
    return speed * PSI


def wheel_speeds_to_command(L: float, R: float, target: PlatformProfile,
                            reference: PlatformProfile) -> SpeedCommand:
    """Unicycle velocities on `target` for wheel speeds evolved on `reference`.

    The linear speed uses the target's wheel radius so that rotation rates,
    not ground speeds, carry over between platforms. The turn rate follows
    the reference platform's geometry scaled by the target's ``zeta``.
    """
    v = PSI * target.wheel_radius * (R + L) / 2.0
    omega = target.zeta * PSI * reference.wheel_radius * (R - L) / reference.axle_length
    return SpeedCommand(v, omega)


def _deg(values):
    return tuple(math.radians(v) for v in values)


EPUCK = PlatformProfile(
    name="epuck",
    wheel_radius=0.0205,
    axle_length=0.052,
    body_radius=0.037,
    sensor_kind=INFRARED,
    sensor_bearings=_deg([-17, -49, -90, -150, 150, 90, 49, 17]),
    sensor_range=0.06,
    tau1=250.0,
    tau2=2400.0,
    proximity_comparator=MAX_IS_CLOSEST,
    orientation_map=(RIGHT,) * 3 + (REAR,) * 2 + (LEFT,) * 3,
    zeta=1.0,
)

PIONEER = PlatformProfile(
    name="pioneer",
    wheel_radius=0.095,
    axle_length=0.33,
    body_radius=0.22,
    sensor_kind=SONAR,
    sensor_bearings=_deg([90, 50, 30, 10, -10, -30, -50, -90,
                          -90, -130, -150, -170, 170, 150, 130, 90]),
    sensor_range=5.0,
    tau1=0.15,
    tau2=0.04,
    proximity_comparator=MIN_IS_CLOSEST,
    orientation_map=(LEFT,) * 4 + (RIGHT,) * 6 + (REAR,) * 4 + (LEFT,) * 2,
    zeta=1.575,
)


def builtin_profiles() -> tuple[PlatformProfile, PlatformProfile]:
    return EPUCK, PIONEER


PROFILES: Mapping[str, PlatformProfile] = {"epuck": EPUCK, "pioneer": PIONEER}

_NUMERIC = ("wheel_radius", "axle_length", "body_radius", "sensor_range",
            "tau1", "tau2", "zeta")
_ANGLES = ("camera_fov",)


def parse_profile_overrides(text: str, base: PlatformProfile) -> PlatformProfile:
    """Apply ``key = value`` overrides to a built-in profile.

    Only scalar numeric fields may be overridden; ``camera_fov`` is given in
    degrees. Blank lines and ``#`` comments are ignored.
    """
    changes = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (part.strip() for part in line.partition("="))
        if not sep:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        if key not in _NUMERIC + _ANGLES:
            raise ValueError(f"line {lineno}: unknown or non-numeric profile key {key!r}")
        try:
            number = float(value)
        except ValueError:
            raise ValueError(f"line {lineno}: {key} needs a number, got {value!r}") from None
        changes[key] = math.radians(number) if key in _ANGLES else number
    return replace(base, **changes)
