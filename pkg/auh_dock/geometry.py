"""Frames, angles and the value records shared by every module.

Earth frame: origin at the SDS centre, x north, y east, z depth (positive
down). Yaw is measured clockwise from north. All angles are degrees and are
converted to radians only inside trigonometric calls.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

from .errors import DomainError


def _require_finite(*values: float) -> None:
    for value in values:
        if not math.isfinite(value):
            raise DomainError(f"non-finite input: {value!r}")


def wrap_angle(angle: float) -> float:
    """Wrap an angle in degrees into (-180, 180]."""

    _require_finite(angle)
    wrapped = math.fmod(angle, 360.0)
    if wrapped <= -180.0:
        wrapped += 360.0
    elif wrapped > 180.0:
        wrapped -= 360.0
    return wrapped


def rotate_body_to_earth(x_body: float, y_body: float, yaw: float) -> Tuple[float, float]:
    """Rotate a horizontal body-frame vector into the earth frame."""

    _require_finite(x_body, y_body, yaw)
    rad = math.radians(yaw)
    cos_y = math.cos(rad)
    sin_y = math.sin(rad)
    return cos_y * x_body - sin_y * y_body, sin_y * x_body + cos_y * y_body


def rotate_earth_to_body(x_earth: float, y_earth: float, yaw: float) -> Tuple[float, float]:
    """Inverse of :func:`rotate_body_to_earth`."""

    return rotate_body_to_earth(x_earth, y_earth, -yaw)


def bearing_to(x: float, y: float, target_x: float, target_y: float) -> float:
    """North-referenced bearing from (x, y) to the target, degrees."""

    return wrap_angle(math.degrees(math.atan2(target_y - y, target_x - x)))


@dataclass(frozen=True)
class Pose:
    """Earth-frame position (m) and attitude (deg) of the vehicle."""

    x: float = 0.0
    y: float = 0.0
    z: float = 0.0
    roll: float = 0.0
    pitch: float = 0.0
    yaw: float = 0.0

    def horizontal_distance(self, x: float = 0.0, y: float = 0.0) -> float:
        return math.hypot(self.x - x, self.y - y)

    def altitude_above(self, reference_depth: float) -> float:
        """Height above a horizontal surface lying at ``reference_depth``."""

        return reference_depth - self.z

    def is_finite(self) -> bool:
        return all(
            math.isfinite(v) for v in (self.x, self.y, self.z, self.roll, self.pitch, self.yaw)
        )


@dataclass(frozen=True)
class BodyVelocity:
    """Surge and heave (m/s) through the water, yaw rate (deg/s)."""

    u: float = 0.0
    w: float = 0.0
    r_yaw: float = 0.0

    def is_finite(self) -> bool:
        return all(math.isfinite(v) for v in (self.u, self.w, self.r_yaw))


def _clamp_unit(value: float) -> float:
    return max(-1.0, min(1.0, value))


@dataclass(frozen=True)
class ActuatorCommand:
    """Normalised horizontal thrust, vertical thrust and yaw torque."""

    f_x: float = 0.0
    f_z: float = 0.0
    t_z: float = 0.0

    def __post_init__(self) -> None:
        for name in ("f_x", "f_z", "t_z"):
            object.__setattr__(self, name, _clamp_unit(getattr(self, name)))


@dataclass(frozen=True)
class SdsParams:
    """Docking station placement.

    ``depth`` is the depth of the docking panel (the light sits at its
    centre), ``yaw`` the orientation the vehicle must adopt to dock.
    """

    depth: float = 20.0
    seafloor_depth: float = 22.0
    yaw: float = 0.0
    footprint_half_width: float = 1.5

    def in_footprint(self, x: float, y: float) -> bool:
        """Boundary inclusive square footprint aligned with the panel yaw."""

        along, across = rotate_earth_to_body(x, y, self.yaw)
        half = self.footprint_half_width
        return abs(along) <= half and abs(across) <= half
