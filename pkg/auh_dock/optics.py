"""Monocular light-spot guidance.

The station light sits at the panel centre. The camera is mounted looking
straight down, offset ``L`` from the vehicle centre so that a light at
body coordinates (x_B, y_B) appears at camera coordinates (x_B, y_B + L).
The inverse chain (pixels -> angles -> camera -> body -> earth) recovers
the vehicle position in the earth frame.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import DomainError
from .geometry import Pose, rotate_body_to_earth, rotate_earth_to_body


@dataclass(frozen=True)
class CameraParams:
    """Image size (px), field half-angles and light divergence (deg), offset (m)."""

    width: int = 1920
    height: int = 1080
    alpha0: float = 35.0
    beta0: float = 35.0
    divergence: float = 70.0
    offset: float = 0.5
    period: float = 0.1


@dataclass(frozen=True)
class SpotObservation:
    """Spot centre in pixels relative to the optic centre."""

    u_bar: float
    v_bar: float
    visible: bool
    h: float

    @classmethod
    def hidden(cls, h: float) -> "SpotObservation":
        return cls(u_bar=0.0, v_bar=0.0, visible=False, h=h)


def effective_radius(h: float, divergence: float) -> float:
    """Horizontal radius of the illumination cone ``h`` metres above the light."""

    return math.tan(math.radians(divergence) / 2.0) * h


def _in_sensor(u_bar: float, v_bar: float, cam: CameraParams) -> bool:
    return abs(u_bar) <= cam.width / 2.0 and abs(v_bar) <= cam.height / 2.0


def project_spot(vehicle: Pose, light: Tuple[float, float, float], cam: CameraParams) -> SpotObservation:
    """Forward camera model, the exact inverse of :func:`optical_fix`."""

    h = light[2] - vehicle.z
    if h <= 0.0:
        return SpotObservation.hidden(h)

    # earth_position: (x, y) - light = -R(yaw) (x_B, y_B)
    x_body, y_body = rotate_earth_to_body(light[0] - vehicle.x, light[1] - vehicle.y, vehicle.yaw)
    x_cam = x_body
    y_cam = y_body + cam.offset
    if math.hypot(x_cam, y_cam) > effective_radius(h, cam.divergence):
        return SpotObservation.hidden(h)

    u_bar = (cam.width / 2.0) * (y_cam / h) / math.tan(math.radians(cam.alpha0))
    v_bar = (cam.height / 2.0) * (x_cam / h) / math.tan(math.radians(cam.beta0))
    if not _in_sensor(u_bar, v_bar, cam):
        return SpotObservation.hidden(h)
    return SpotObservation(u_bar=u_bar, v_bar=v_bar, visible=True, h=h)


def observe_light(
    vehicle: Pose,
    light: Tuple[float, float, float],
    cam: CameraParams,
    pixel_sigma: float,
    rng: np.random.Generator,
) -> SpotObservation:
    """One camera frame: projection plus pixel noise on the detected centre."""

    spot = project_spot(vehicle, light, cam)
    if not spot.visible or pixel_sigma <= 0.0:
        return spot

    jitter = rng.normal(0.0, pixel_sigma, size=2)
    u_bar = spot.u_bar + float(jitter[0])
    v_bar = spot.v_bar + float(jitter[1])
    if not _in_sensor(u_bar, v_bar, cam):
        return SpotObservation.hidden(spot.h)
    return SpotObservation(u_bar=u_bar, v_bar=v_bar, visible=True, h=spot.h)


def deviation_angles(u_bar: float, v_bar: float, cam: CameraParams) -> Tuple[float, float]:
    """Horizontal and vertical deviation angles (deg) of the spot centre."""

    if not _in_sensor(u_bar, v_bar, cam):
        raise DomainError(f"spot ({u_bar}, {v_bar}) outside a {cam.width}x{cam.height} image")

    alpha = math.atan(2.0 * u_bar / cam.width * math.tan(math.radians(cam.alpha0)))
    beta = math.atan(2.0 * v_bar / cam.height * math.tan(math.radians(cam.beta0)))
    return math.degrees(alpha), math.degrees(beta)


def camera_coords(alpha: float, beta: float, h: float) -> Tuple[float, float]:
    return h * math.tan(math.radians(beta)), h * math.tan(math.radians(alpha))


def body_coords(x_cam: float, y_cam: float, offset: float) -> Tuple[float, float]:
    return x_cam, y_cam - offset


def earth_position(x_body: float, y_body: float, yaw: float) -> Tuple[float, float]:
    """Vehicle position relative to the light: -R(yaw) (x_B, y_B)."""

    x_rot, y_rot = rotate_body_to_earth(x_body, y_body, yaw)
    return -x_rot, -y_rot


def optical_fix(
    spot: SpotObservation,
    yaw: float,
    cam: CameraParams,
    light: Tuple[float, float] = (0.0, 0.0),
) -> Optional[Tuple[float, float]]:
    """Earth-frame vehicle position from a visible spot, else ``None``."""

    if not spot.visible:
        return None
    alpha, beta = deviation_angles(spot.u_bar, spot.v_bar, cam)
    x_cam, y_cam = camera_coords(alpha, beta, spot.h)
    x_body, y_body = body_coords(x_cam, y_cam, cam.offset)
    x, y = earth_position(x_body, y_body, yaw)
    return light[0] + x, light[1] + y
