"""Five-phase docking state machine, speed-decision law and docking criterion.

Homing (Returning, CloseToDocking) steers on the acoustic-inertial
estimate; Landing (Landing1..3) steers on optical fixes of the station
light. Each tick :func:`fsm_step` advances the timers, takes at most one
transition and emits the behaviours the helm should run next.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import TYPE_CHECKING, Dict, Optional, Tuple

from .control import Behaviour, ConstantAltitude, ConstantDepth, ConstantSpeed, HelmParams, Waypoint
from .errors import ConfigError, ContractViolation, FsmFault
from .geometry import SdsParams, wrap_angle
from .optics import SpotObservation
from .sensors import NavEstimate

if TYPE_CHECKING:
    from .config import ScenarioConfig

LOGGER = logging.getLogger(__name__)

_EPS = 1e-9


class Phase(Enum):
    RETURNING = "Returning"
    CLOSE_TO_DOCKING = "CloseToDocking"
    LANDING1 = "Landing1"
    LANDING2 = "Landing2"
    LANDING3 = "Landing3"
    DOCKED = "Docked"

    @property
    def index(self) -> int:
        return PHASE_ORDER.index(self)

    @property
    def is_landing(self) -> bool:
        return self in (Phase.LANDING1, Phase.LANDING2, Phase.LANDING3)


PHASE_ORDER: Tuple[Phase, ...] = tuple(Phase)


class VerticalMode(Enum):
    CONSTANT_ALTITUDE = "altitude"
    CONSTANT_DEPTH = "depth"


class NavigationMode(Enum):
    ACOUSTIC_INERTIAL = "acoustic"
    OPTICAL = "optical"


@dataclass(frozen=True)
class PhaseParams:
    """One row of the phase table.

    ``vertical_target`` is an altitude above the seafloor in
    CONSTANT_ALTITUDE mode and a work altitude above the docking panel in
    CONSTANT_DEPTH mode (converted to depth against the panel depth).
    """

    range_threshold: Optional[float] = None
    distance_threshold: Optional[float] = None
    speed: float = 0.3
    vertical_mode: VerticalMode = VerticalMode.CONSTANT_DEPTH
    vertical_target: float = 5.0
    yaw_threshold: Optional[float] = None
    pitch_threshold: Optional[float] = None
    roll_threshold: Optional[float] = None
    depth_threshold: Optional[float] = None
    outer_radius: float = 1.5
    inner_radius: float = 0.3
    outer_speed: float = 0.2
    usbl_rate: float = 1.5
    upload: bool = True
    navigation: NavigationMode = NavigationMode.OPTICAL
    criterion_hold: float = 0.0


DEFAULT_PHASE_PARAMS: Dict[Phase, PhaseParams] = {
    Phase.RETURNING: PhaseParams(
        range_threshold=15.0,
        speed=1.0,
        vertical_mode=VerticalMode.CONSTANT_ALTITUDE,
        vertical_target=8.0,
        usbl_rate=1.5,
        upload=True,
        navigation=NavigationMode.ACOUSTIC_INERTIAL,
    ),
    Phase.CLOSE_TO_DOCKING: PhaseParams(
        range_threshold=15.0,
        speed=0.3,
        vertical_mode=VerticalMode.CONSTANT_DEPTH,
        vertical_target=5.0,
        usbl_rate=3.0,
        upload=False,
        navigation=NavigationMode.ACOUSTIC_INERTIAL,
    ),
    Phase.LANDING1: PhaseParams(distance_threshold=1.0, vertical_target=5.0),
    Phase.LANDING2: PhaseParams(distance_threshold=0.7, vertical_target=3.5, yaw_threshold=10.0),
    Phase.LANDING3: PhaseParams(
        speed=0.0,
        vertical_target=0.2,
        yaw_threshold=45.0,
        pitch_threshold=5.0,
        roll_threshold=5.0,
        depth_threshold=0.2,
    ),
}

PHASE_SECTIONS: Dict[Phase, str] = {
    Phase.RETURNING: "returning",
    Phase.CLOSE_TO_DOCKING: "close_to_docking",
    Phase.LANDING1: "landing1",
    Phase.LANDING2: "landing2",
    Phase.LANDING3: "landing3",
}


@dataclass(frozen=True)
class FsmParams:
    """Timers of the transition rules (s) and the work-altitude band (m)."""

    visibility_time: float = 3.0
    dwell_time: float = 2.0
    handoff_time: float = 1.0
    loss_timeout: float = 10.0
    settling_timeout: float = 20.0
    altitude_tolerance: float = 0.2


@dataclass(frozen=True)
class CriterionThresholds:
    yaw_threshold: float
    pitch_threshold: float
    roll_threshold: float
    depth_threshold: float
    yaw_d: float = 0.0
    pitch_d: float = 0.0
    roll_d: float = 0.0
    z_d: float = 0.0


@dataclass(frozen=True)
class FsmState:
    phase: Phase = Phase.RETURNING
    t_vis: float = 0.0
    lost: float = 0.0
    dwell: float = 0.0
    settle: float = 0.0
    hold: float = 0.0
    attempts: int = 0


@dataclass(frozen=True)
class Directive:
    """What the state machine hands to the helm for the current tick."""

    behaviours: Tuple[Behaviour, ...]
    r: Optional[float] = None
    v_decision: Optional[float] = None
    phi: Optional[int] = None
    event: str = ""
    attempts: int = 0


def phase_params(phase: Phase, config: "ScenarioConfig") -> PhaseParams:
    if phase is Phase.DOCKED:
        raise ContractViolation("Docked is terminal and has no phase parameters")
    return getattr(config, PHASE_SECTIONS[phase])


def speed_decision(r: float, v_tr: float, r_inner: float, r_outer: float) -> float:
    """Piecewise-linear commanded speed against horizontal distance ``r``."""

    if not 0.0 <= r_inner < r_outer:
        raise ConfigError(f"speed decision needs 0 <= inner < outer, got inner={r_inner} outer={r_outer}")
    if r <= r_inner:
        return 0.0
    if r > r_outer:
        return v_tr
    return v_tr * (r - r_inner) / (r_outer - r_inner)


def docking_criterion(
    attitude: Tuple[float, float, float],
    z: float,
    thr: CriterionThresholds,
) -> Tuple[int, bool]:
    """Count the indicators (roll, pitch, yaw, depth) within their thresholds.

    ``attitude`` is (roll, pitch, yaw) in degrees. Every interval is closed.
    """

    roll, pitch, yaw = attitude
    passes = (
        abs(wrap_angle(roll - thr.roll_d)) <= thr.roll_threshold,
        abs(wrap_angle(pitch - thr.pitch_d)) <= thr.pitch_threshold,
        abs(wrap_angle(yaw - thr.yaw_d)) <= thr.yaw_threshold,
        abs(z - thr.z_d) <= thr.depth_threshold,
    )
    phi = sum(1 for ok in passes if ok)
    return phi, phi == 4


def criterion_thresholds(config: "ScenarioConfig") -> CriterionThresholds:
    row = config.landing3
    return CriterionThresholds(
        yaw_threshold=row.yaw_threshold,
        pitch_threshold=row.pitch_threshold,
        roll_threshold=row.roll_threshold,
        depth_threshold=row.depth_threshold,
        yaw_d=config.sds.yaw,
        z_d=config.sds.depth - row.vertical_target,
    )


def _vertical(params: PhaseParams, sds: SdsParams) -> Behaviour:
    if params.vertical_mode is VerticalMode.CONSTANT_ALTITUDE:
        return ConstantAltitude(params.vertical_target)
    return ConstantDepth(sds.depth - params.vertical_target)


def _directive(
    phase: Phase,
    config: "ScenarioConfig",
    r: float,
    phi: Optional[int],
    event: str,
    attempts: int,
) -> Directive:
    sds: SdsParams = config.sds
    helm: HelmParams = config.helm

    if phase in (Phase.LANDING3, Phase.DOCKED):
        params = config.landing3
        behaviours: Tuple[Behaviour, ...] = (
            Waypoint(0.0, 0.0, hold_yaw=sds.yaw, capture_radius=math.inf),
            ConstantSpeed(0.0),
            _vertical(params, sds),
        )
        return Directive(behaviours, r=r, v_decision=0.0, phi=phi, event=event, attempts=attempts)

    params = phase_params(phase, config)
    if phase is Phase.RETURNING:
        waypoint = Waypoint(0.0, 0.0, hold_yaw=sds.yaw, capture_radius=helm.capture_radius)
        speed = params.speed
        v_decision = None
    elif phase is Phase.CLOSE_TO_DOCKING:
        waypoint = Waypoint(
            0.0, 0.0, hold_yaw=sds.yaw, capture_radius=helm.capture_radius, turn_gate=helm.turn_gate
        )
        speed = params.speed
        v_decision = None
    else:
        waypoint = Waypoint(
            0.0,
            0.0,
            hold_yaw=sds.yaw,
            capture_radius=helm.landing_capture_radius,
            turn_gate=helm.turn_gate,
        )
        speed = speed_decision(r, params.speed, params.inner_radius, params.outer_radius)
        v_decision = speed

    behaviours = (waypoint, ConstantSpeed(speed), _vertical(params, sds))
    return Directive(behaviours, r=r, v_decision=v_decision, phi=phi, event=event, attempts=attempts)


def _transition(fsm: FsmState, target: Phase, t_note: str) -> Tuple[FsmState, str]:
    attempts = fsm.attempts + 1 if target is Phase.LANDING3 else fsm.attempts
    event = f"{fsm.phase.value}->{target.value}"
    LOGGER.debug("Phase %s (%s)", event, t_note)
    return FsmState(phase=target, attempts=attempts), event


def fsm_step(
    fsm: FsmState,
    nav: NavEstimate,
    spot: SpotObservation,
    optical_fix: Optional[Tuple[float, float]],
    depth: float,
    attitude: Tuple[float, float, float],
    dt: float,
    config: "ScenarioConfig",
) -> Tuple[FsmState, Directive]:
    """Advance timers, take at most one transition and emit the directive.

    ``attitude`` is (roll, pitch, yaw) in degrees. In Landing the distance
    to the light comes from the optical fix when one exists and from the
    navigation estimate otherwise.
    """

    phase = fsm.phase
    if phase.is_landing and spot.visible and optical_fix is None:
        raise FsmFault(f"{phase.value}: light visible but no optical fix")

    if phase is Phase.DOCKED:
        return fsm, _directive(phase, config, math.hypot(nav.x, nav.y), None, "", fsm.attempts)

    if phase.is_landing and optical_fix is not None:
        r = math.hypot(optical_fix[0], optical_fix[1])
    else:
        r = math.hypot(nav.x, nav.y)

    timers: FsmParams = config.fsm
    params = phase_params(phase, config)
    yaw_error = abs(wrap_angle(config.sds.yaw - attitude[2]))
    settled = abs(depth - (config.sds.depth - params.vertical_target)) <= timers.altitude_tolerance

    fsm = replace(
        fsm,
        t_vis=fsm.t_vis + dt if spot.visible else 0.0,
        lost=0.0 if spot.visible else fsm.lost + dt,
    )
    # dwell is the time spent hovering on target at the phase work altitude
    if phase is Phase.LANDING1:
        within = settled and params.distance_threshold is not None and r <= params.distance_threshold
        fsm = replace(fsm, dwell=fsm.dwell + dt if within else 0.0)
    elif phase is Phase.LANDING2:
        within = settled and r <= params.distance_threshold and yaw_error <= params.yaw_threshold
        fsm = replace(fsm, dwell=fsm.dwell + dt if within else 0.0)

    phi: Optional[int] = None
    target: Optional[Phase] = None
    if phase is Phase.RETURNING:
        if r <= params.range_threshold:
            target = Phase.CLOSE_TO_DOCKING
    elif phase is Phase.CLOSE_TO_DOCKING:
        if spot.visible and fsm.t_vis >= timers.visibility_time - _EPS:
            target = Phase.LANDING1
    elif phase is Phase.LANDING1:
        if fsm.lost > timers.loss_timeout + _EPS:
            target = Phase.CLOSE_TO_DOCKING
        elif fsm.dwell >= timers.dwell_time - _EPS:
            target = Phase.LANDING2
    elif phase is Phase.LANDING2:
        if fsm.lost > timers.loss_timeout + _EPS:
            target = Phase.CLOSE_TO_DOCKING
        elif fsm.dwell >= timers.handoff_time - _EPS:
            target = Phase.LANDING3
    elif phase is Phase.LANDING3:
        phi, success = docking_criterion(attitude, depth, criterion_thresholds(config))
        fsm = replace(fsm, settle=fsm.settle + dt, hold=fsm.hold + dt if success else 0.0)
        if success and fsm.hold >= params.criterion_hold - _EPS:
            target = Phase.DOCKED
        elif fsm.settle >= timers.settling_timeout - _EPS:
            target = Phase.LANDING2

    event = ""
    if target is not None:
        fsm, event = _transition(fsm, target, f"r={r:.2f} m")
    return fsm, _directive(fsm.phase, config, r, phi, event, fsm.attempts)
