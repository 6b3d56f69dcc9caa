"""Master tick loop and the multi-seed batch runner.

Each tick: sensors sample the truth, navigation fuses them, the state
machine picks behaviours, the helm turns them into setpoints, the PID loops
into thrust, and the plant advances the truth by ``dt``.
"""
from __future__ import annotations

import logging
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Deque, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import ScenarioConfig
from .control import ControllerState, control_step, helm_resolve
from .docking import FsmState, NavigationMode, Phase, fsm_step, phase_params
from .errors import DomainError
from .geometry import BodyVelocity
from .optics import SpotObservation, observe_light, optical_fix
from .plant import current_at, plant_step
from .sensors import (
    NavEstimate,
    UsblFix,
    UsblLink,
    dead_reckon,
    optical_correct,
    sample_altimeter,
    sample_dvl,
    sample_imu,
    usbl_correct,
    usbl_poll,
)
from .trajectory_log import (
    ABORT_EVENT,
    OUTCOME_ABORTED,
    OUTCOME_DOCKED,
    RunMetrics,
    TrajectoryRecord,
    summarize,
    write_log,
)

LOGGER = logging.getLogger(__name__)

STREAMS = ("imu", "dvl", "altimeter", "usbl", "camera", "plant", "nav")


@dataclass(frozen=True)
class BatchReport:
    successes: int
    runs: int
    metrics: Tuple[RunMetrics, ...]

    @property
    def success_rate(self) -> float:
        return self.successes / self.runs if self.runs else 0.0

    def meets(self, floor: float) -> bool:
        return self.success_rate >= floor


def _streams(seed: int) -> Dict[str, np.random.Generator]:
    children = np.random.SeedSequence(seed).spawn(len(STREAMS))
    return {name: np.random.default_rng(child) for name, child in zip(STREAMS, children)}


def run(
    config: ScenarioConfig,
    seed: Optional[int] = None,
    max_duration: Optional[float] = None,
) -> Tuple[List[TrajectoryRecord], RunMetrics]:
    """Simulate one docking attempt until Docked, timeout or abort."""

    seed = config.seed if seed is None else seed
    duration = config.timing.max_duration if max_duration is None else max_duration
    dt = config.timing.dt
    steps = int(round(duration / dt))
    rng = _streams(seed)

    sds = config.sds
    cam = config.camera
    noise = config.noise
    light = (0.0, 0.0, sds.depth)
    frame_every = max(1, int(round(cam.period / dt)))

    pose = config.start
    vel = BodyVelocity()
    offset = rng["nav"].normal(0.0, config.nav.initial_drift, size=2) if config.nav.initial_drift > 0.0 else np.zeros(2)
    nav = NavEstimate(
        x=pose.x + float(offset[0]),
        y=pose.y + float(offset[1]),
        yaw=pose.yaw,
        drift=config.nav.initial_drift,
    )
    fsm = FsmState()
    pids = ControllerState.from_gains(config.pid_yaw, config.pid_speed, config.pid_depth)
    link = UsblLink(config.usbl)
    pending: Deque[Tuple[UsblFix, float, float]] = deque()
    spot = SpotObservation.hidden(light[2] - pose.z)
    records: List[TrajectoryRecord] = []
    outcome = None

    LOGGER.info("Run seed %s: start (%.1f, %.1f, %.1f), %s s at dt %s", seed, pose.x, pose.y, pose.z, duration, dt)

    for k in range(steps + 1):
        t = k * dt
        current = current_at(t, config.current)
        imu = sample_imu(pose, t, noise.sigma("imu"), rng["imu"])
        dvl = sample_dvl(pose, vel.u, vel.w, current, t, sds, noise, rng["dvl"])
        altimeter = sample_altimeter(pose, sds, noise, rng["altimeter"])
        params = phase_params(fsm.phase, config)

        fix = usbl_poll(
            t,
            params.usbl_rate,
            link,
            pose,
            upload=params.upload,
            sigma=noise.sigma("usbl"),
            latency=config.usbl.latency,
            rng=rng["usbl"],
        )
        if fix is not None:
            pending.append((fix, nav.x, nav.y))
        delivered: Optional[UsblFix] = None
        while pending and t >= pending[0][0].delivered_at - 1e-9:
            fix, emitted_x, emitted_y = pending.popleft()
            nav = usbl_correct(nav, fix.shifted(nav.x - emitted_x, nav.y - emitted_y), t, config.nav)
            delivered = fix

        if k % frame_every == 0:
            spot = observe_light(pose, light, cam, noise.sigma("pixel"), rng["camera"])
        measured_h = sds.depth - altimeter.depth
        if spot.visible and measured_h > 0.0:
            seen = replace(spot, h=measured_h)
            position = optical_fix(seen, imu.yaw, cam, (light[0], light[1]))
        else:
            seen = SpotObservation.hidden(measured_h)
            position = None
        if params.navigation is NavigationMode.OPTICAL and position is not None:
            nav = optical_correct(nav, position, config.nav)

        attitude = (imu.roll, imu.pitch, imu.yaw)
        fsm, directive = fsm_step(fsm, nav, seen, position, altimeter.depth, attitude, dt, config)
        if directive.event:
            LOGGER.info("t=%.1f s: %s", t, directive.event)

        setpoints = helm_resolve(directive.behaviours, nav, altimeter, altimeter.depth)
        speed = dvl.u if dvl.valid else nav.u
        cmd, pids = control_step(setpoints, imu.yaw, speed, altimeter.depth, pids, dt)

        record = TrajectoryRecord(
            t=t,
            phase=fsm.phase.value,
            x=pose.x,
            y=pose.y,
            z=pose.z,
            roll=pose.roll,
            pitch=pose.pitch,
            yaw=pose.yaw,
            nav_x=nav.x,
            nav_y=nav.y,
            nav_yaw=nav.yaw,
            nav_drift=nav.drift,
            optical_x=None if position is None else position[0],
            optical_y=None if position is None else position[1],
            visible=seen.visible,
            altitude=altimeter.altitude,
            occluded=altimeter.occluded,
            theta_d=setpoints.theta_d,
            v_d=setpoints.v_d,
            z_d=setpoints.z_d,
            f_x=cmd.f_x,
            f_z=cmd.f_z,
            t_z=cmd.t_z,
            r=directive.r,
            v_decision=directive.v_decision,
            phi=directive.phi,
            usbl_x=None if delivered is None else delivered.x,
            usbl_y=None if delivered is None else delivered.y,
            usbl_latency=None if delivered is None else delivered.latency,
            usbl_upload=delivered is not None and delivered.carries_upload,
            event=directive.event,
            fault=setpoints.fault,
        )
        records.append(record)

        if fsm.phase is Phase.DOCKED:
            outcome = OUTCOME_DOCKED
            break
        if k == steps:
            break

        try:
            pose, vel = plant_step(
                pose, vel, cmd, current, dt, config.plant, rng["plant"], max_depth=sds.seafloor_depth
            )
            if not (pose.is_finite() and vel.is_finite()):
                raise DomainError(f"non-finite vehicle state {pose} {vel}")
        except DomainError as exc:
            LOGGER.error("Run seed %s aborted at t=%.1f s: %s", seed, t, exc)
            records.append(replace(record, t=(k + 1) * dt, event=ABORT_EVENT, fault=str(exc)))
            outcome = OUTCOME_ABORTED
            break

        nav = dead_reckon(nav, imu, dvl, dt, config.nav)

    metrics = summarize(records, seed=seed)
    if outcome is None:
        LOGGER.warning("Run seed %s timed out after %.1f s in %s", seed, metrics.total_time, records[-1].phase)
    else:
        LOGGER.info("Run seed %s: %s after %.1f s", seed, metrics.outcome, metrics.total_time)
    return records, metrics


def _batch_job(config: ScenarioConfig, seed: int, out_dir: Optional[str]) -> RunMetrics:
    records, metrics = run(config, seed)
    if out_dir is not None:
        write_log(records, Path(out_dir) / f"seed_{seed}.csv")
    return metrics


def run_batch(
    config: ScenarioConfig,
    seeds: Sequence[int],
    workers: int = 1,
    out_dir: Optional[Union[str, Path]] = None,
) -> BatchReport:
    """Run every seed and count the docked outcomes exactly.

    With ``workers`` above one the seeds run in a process pool; results keep
    the order of ``seeds`` either way.
    """

    target = None if out_dir is None else str(out_dir)
    if workers > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_batch_job, [config] * len(seeds), seeds, [target] * len(seeds)))
    else:
        results = [_batch_job(config, seed, target) for seed in seeds]

    successes = sum(1 for metrics in results if metrics.docked)
    LOGGER.info("Batch: %s/%s docked", successes, len(results))
    return BatchReport(successes=successes, runs=len(results), metrics=tuple(results))

