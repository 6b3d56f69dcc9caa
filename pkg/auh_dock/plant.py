"""Discrete-time truth model of the vehicle.

Decoupled surge, heave and yaw channels driven by normalised thrust against
quadratic drag, plus passive roll/pitch that relax towards zero. Sway is not
modelled: the vehicle changes course by turning and moving ahead.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import DomainError
from .geometry import ActuatorCommand, BodyVelocity, Pose, rotate_body_to_earth, wrap_angle


@dataclass(frozen=True)
class PlantParams:
    """Plant coefficients.

    Thrusts are in newtons, drag coefficients in N/(m/s)^2. The yaw channel
    is expressed directly in degrees: ``max_torque * T_z`` divided by
    ``yaw_inertia`` gives deg/s^2, ``yaw_drag * r|r|`` uses r in deg/s.
    Defaults put the terminal surge speed at full thrust on 1 m/s, heave at
    0.5 m/s and yaw rate at 20 deg/s.
    """

    mass: float = 760.0
    surge_inertia: float = 1000.0
    heave_inertia: float = 1200.0
    yaw_inertia: float = 50.0
    surge_drag: float = 200.0
    heave_drag: float = 800.0
    yaw_drag: float = 0.5
    max_thrust_x: float = 200.0
    max_thrust_z: float = 200.0
    max_torque: float = 200.0
    u_max: float = 1.2
    w_max: float = 0.5
    r_max: float = 30.0
    attitude_time_constant: float = 5.0
    attitude_amplitude: float = 1.0

    def terminal_surge_speed(self) -> float:
        return math.sqrt(self.max_thrust_x / self.surge_drag)


@dataclass(frozen=True)
class CurrentField:
    """Horizontal current: constant mean plus a sinusoidal gust."""

    cx: float = 0.0
    cy: float = 0.0
    gust_amplitude: float = 0.0
    gust_period: float = 120.0
    gust_direction: float = 0.0


def current_at(t: float, field: CurrentField) -> Tuple[float, float]:
    """Earth-frame current velocity (m/s) at simulation time ``t``."""

    if t < 0.0:
        raise DomainError(f"time must be non-negative, got {t}")
    if field.gust_amplitude == 0.0:
        return field.cx, field.cy

    gust = field.gust_amplitude * math.sin(2.0 * math.pi * t / field.gust_period)
    direction = math.radians(field.gust_direction)
    return (
        field.cx + gust * math.cos(direction),
        field.cy + gust * math.sin(direction),
    )


def _drag_step(value: float, force: float, drag: float, inertia: float, dt: float) -> float:
    # thrust explicit, drag implicit in the magnitude: decay never overshoots zero
    return (value + dt * force / inertia) / (1.0 + dt * drag * abs(value) / inertia)


def _clip(value: float, limit: float) -> float:
    return max(-limit, min(limit, value))


def _relax(angle: float, dt: float, params: PlantParams, rng: Optional[np.random.Generator]) -> float:
    decay = math.exp(-dt / params.attitude_time_constant)
    relaxed = angle * decay
    if rng is not None and params.attitude_amplitude > 0.0:
        spread = params.attitude_amplitude * math.sqrt(1.0 - decay * decay)
        relaxed += spread * float(rng.standard_normal())
    return max(-90.0, min(90.0, relaxed))


def plant_step(
    pose: Pose,
    vel: BodyVelocity,
    cmd: ActuatorCommand,
    current: Tuple[float, float],
    dt: float,
    params: PlantParams = PlantParams(),
    rng: Optional[np.random.Generator] = None,
    max_depth: float = math.inf,
) -> Tuple[Pose, BodyVelocity]:
    """Advance the truth state by one tick (semi-implicit Euler).

    Velocities are updated first, positions then integrate the new
    velocities. Without ``rng`` the roll/pitch channel is noiseless.
    """

    if not dt > 0.0:
        raise DomainError(f"dt must be positive, got {dt}")

    u = _drag_step(vel.u, params.max_thrust_x * cmd.f_x, params.surge_drag, params.surge_inertia, dt)
    w = _drag_step(vel.w, params.max_thrust_z * cmd.f_z, params.heave_drag, params.heave_inertia, dt)
    r_yaw = _drag_step(vel.r_yaw, params.max_torque * cmd.t_z, params.yaw_drag, params.yaw_inertia, dt)
    new_vel = BodyVelocity(
        u=_clip(u, params.u_max),
        w=_clip(w, params.w_max),
        r_yaw=_clip(r_yaw, params.r_max),
    )

    yaw = wrap_angle(pose.yaw + new_vel.r_yaw * dt)
    dx, dy = rotate_body_to_earth(new_vel.u, 0.0, yaw)
    z = pose.z + new_vel.w * dt
    new_pose = Pose(
        x=pose.x + (dx + current[0]) * dt,
        y=pose.y + (dy + current[1]) * dt,
        z=min(max(0.0, z), max_depth),
        roll=_relax(pose.roll, dt, params, rng),
        pitch=_relax(pose.pitch, dt, params, rng),
        yaw=yaw,
    )
    return new_pose, new_vel
