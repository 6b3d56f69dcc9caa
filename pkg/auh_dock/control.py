"""Behaviours, helm arbitration and the yaw/speed/depth PID loops."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple, Union

from .errors import ContractViolation, DomainError
from .geometry import ActuatorCommand, bearing_to, wrap_angle
from .sensors import AltimeterReading, NavEstimate

LOGGER = logging.getLogger(__name__)

OCCLUDED_ALTITUDE_FAULT = "constant-altitude-while-occluded"


@dataclass(frozen=True)
class ConstantDepth:
    depth: float


@dataclass(frozen=True)
class ConstantAltitude:
    altitude: float


@dataclass(frozen=True)
class ConstantSpeed:
    speed: float


@dataclass(frozen=True)
class Waypoint:
    """Head for (x, y); inside ``capture_radius`` hold ``hold_yaw`` instead.

    With ``turn_gate`` set, the speed setpoint drops to zero while the
    heading error exceeds the gate so the vehicle turns on the spot.
    """

    x: float
    y: float
    hold_yaw: float = 0.0
    capture_radius: float = 0.5
    turn_gate: Optional[float] = None


Behaviour = Union[ConstantDepth, ConstantAltitude, ConstantSpeed, Waypoint]


@dataclass(frozen=True)
class HelmParams:
    """Waypoint tuning: capture radii (m) and the turn-on-the-spot gate (deg)."""

    capture_radius: float = 0.5
    landing_capture_radius: float = 0.45
    turn_gate: float = 60.0


@dataclass(frozen=True)
class Setpoints:
    """Desired yaw (deg), speed (m/s) and depth (m); ``None`` disables a loop."""

    theta_d: Optional[float] = None
    v_d: Optional[float] = None
    z_d: Optional[float] = None
    fault: str = ""


@dataclass(frozen=True)
class PidGains:
    kp: float = 0.0
    ki: float = 0.0
    kd: float = 0.0
    output_limit: float = 1.0
    integral_limit: float = 1.0
    smoothing: float = 0.3


@dataclass(frozen=True)
class PidState:
    """Positional PID memory, threaded explicitly through :func:`pid_step`."""

    gains: PidGains
    integral: float = 0.0
    previous_error: Optional[float] = None
    derivative: float = 0.0
    angular: bool = False

    def reset(self) -> "PidState":
        return replace(self, integral=0.0, previous_error=None, derivative=0.0)


@dataclass(frozen=True)
class ControllerState:
    yaw: PidState
    speed: PidState
    depth: PidState

    @classmethod
    def from_gains(cls, yaw: PidGains, speed: PidGains, depth: PidGains) -> "ControllerState":
        return cls(
            yaw=PidState(gains=yaw, angular=True),
            speed=PidState(gains=speed),
            depth=PidState(gains=depth),
        )


def _clamp(value: float, limit: float) -> float:
    return max(-limit, min(limit, value))


def helm_resolve(
    behaviours: Sequence[Behaviour],
    nav: NavEstimate,
    altimeter: AltimeterReading,
    depth: float,
) -> Setpoints:
    """Turn the active behaviour set into loop setpoints."""

    vertical = [b for b in behaviours if isinstance(b, (ConstantDepth, ConstantAltitude))]
    if len(vertical) > 1:
        raise ContractViolation("ConstantDepth and ConstantAltitude cannot be active together")

    theta_d: Optional[float] = None
    v_d: Optional[float] = None
    z_d: Optional[float] = None
    fault = ""
    gate: Optional[float] = None

    for behaviour in behaviours:
        if isinstance(behaviour, Waypoint):
            distance = math.hypot(behaviour.x - nav.x, behaviour.y - nav.y)
            if distance <= behaviour.capture_radius:
                theta_d = wrap_angle(behaviour.hold_yaw)
            else:
                theta_d = bearing_to(nav.x, nav.y, behaviour.x, behaviour.y)
            gate = behaviour.turn_gate
        elif isinstance(behaviour, ConstantSpeed):
            v_d = max(0.0, behaviour.speed)
        elif isinstance(behaviour, ConstantDepth):
            z_d = behaviour.depth
        elif isinstance(behaviour, ConstantAltitude):
            if altimeter.occluded:
                LOGGER.warning("ConstantAltitude active over the station footprint, holding depth %.2f", depth)
                fault = OCCLUDED_ALTITUDE_FAULT
                z_d = depth
            else:
                z_d = depth + altimeter.altitude - behaviour.altitude

    if v_d is not None and theta_d is not None and gate is not None:
        if abs(wrap_angle(theta_d - nav.yaw)) > gate:
            v_d = 0.0

    return Setpoints(theta_d=theta_d, v_d=v_d, z_d=z_d, fault=fault)


def pid_step(pid: PidState, error: float, dt: float) -> Tuple[float, PidState]:
    """One positional PID update with anti-windup and a smoothed derivative."""

    if not dt > 0.0:
        raise DomainError(f"dt must be positive, got {dt}")

    gains = pid.gains
    integral = _clamp(pid.integral + error * dt, gains.integral_limit)
    if pid.previous_error is None:
        derivative = 0.0
    else:
        delta = error - pid.previous_error
        if pid.angular:
            delta = wrap_angle(delta)
        derivative = gains.smoothing * (delta / dt) + (1.0 - gains.smoothing) * pid.derivative

    output = gains.kp * error + gains.ki * integral + gains.kd * derivative
    new_state = replace(pid, integral=integral, previous_error=error, derivative=derivative)
    return _clamp(output, gains.output_limit), new_state


def _loop(pid: PidState, error: Optional[float], dt: float) -> Tuple[float, PidState]:
    if error is None:
        return 0.0, pid.reset()
    return pid_step(pid, error, dt)


def control_step(
    sp: Setpoints,
    yaw: float,
    speed: float,
    depth: float,
    pids: ControllerState,
    dt: float,
) -> Tuple[ActuatorCommand, ControllerState]:
    yaw_error = None if sp.theta_d is None else wrap_angle(sp.theta_d - yaw)
    speed_error = None if sp.v_d is None else sp.v_d - speed
    depth_error = None if sp.z_d is None else sp.z_d - depth

    t_z, yaw_pid = _loop(pids.yaw, yaw_error, dt)
    f_x, speed_pid = _loop(pids.speed, speed_error, dt)
    f_z, depth_pid = _loop(pids.depth, depth_error, dt)
    return (
        ActuatorCommand(f_x=f_x, f_z=f_z, t_z=t_z),
        ControllerState(yaw=yaw_pid, speed=speed_pid, depth=depth_pid),
    )
