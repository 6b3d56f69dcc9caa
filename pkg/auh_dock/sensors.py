"""Simulated IMU, DVL, depth altimeter, USBL link and navigation fusion.

The fusion is a plain dead-reckoning integrator with a scalar drift radius,
corrected by absolute USBL fixes during Homing and by optical fixes during
Landing.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from .errors import ConfigError
from .geometry import Pose, SdsParams, rotate_body_to_earth, rotate_earth_to_body, wrap_angle

LOGGER = logging.getLogger(__name__)

USBL_INTERVALS = {
    1.5: 40.0,
    3.0: 20.0,
}


@dataclass(frozen=True)
class NoiseParams:
    """One-sigma sensor noise. ``scale`` multiplies every sigma."""

    imu_sigma: float = 0.1
    dvl_sigma: float = 0.01
    depth_sigma: float = 0.01
    altimeter_sigma: float = 0.02
    usbl_sigma: float = 1.0
    pixel_sigma: float = 2.0
    scale: float = 1.0
    dvl_dropout: float = 0.0
    bottom_lock_range: float = 100.0

    def sigma(self, name: str) -> float:
        return getattr(self, f"{name}_sigma") * self.scale


@dataclass(frozen=True)
class NavParams:
    """Dead-reckoning drift model and fix acceptance."""

    initial_drift: float = 1.0
    drift_rate: float = 0.05
    drift_floor_rate: float = 0.002
    stale_limit: float = 60.0
    optical_sigma: float = 0.05


@dataclass(frozen=True)
class UsblParams:
    latency: float = 1.0
    upload_time: float = 20.0


@dataclass(frozen=True)
class ImuReading:
    roll: float
    pitch: float
    yaw: float
    t: float


@dataclass(frozen=True)
class DvlReading:
    """Ground-referenced body velocity. Only meaningful when ``valid``."""

    u: float
    v: float
    w: float
    altitude: float
    valid: bool
    t: float


@dataclass(frozen=True)
class AltimeterReading:
    """Pressure depth and acoustic altitude above the seafloor."""

    altitude: float
    occluded: bool
    depth: float


@dataclass(frozen=True)
class UsblFix:
    x: float
    y: float
    z: float
    timestamp: float
    latency: float
    carries_upload: bool
    sigma: float

    @property
    def delivered_at(self) -> float:
        return self.timestamp + self.latency

    def shifted(self, dx: float, dy: float) -> "UsblFix":
        return replace(self, x=self.x + dx, y=self.y + dy)


@dataclass(frozen=True)
class NavEstimate:
    """Position/heading belief; ``u``/``v`` keep the last valid DVL velocity."""

    x: float
    y: float
    yaw: float
    drift: float
    u: float = 0.0
    v: float = 0.0


def sample_imu(pose: Pose, t: float, sigma: float, rng: np.random.Generator) -> ImuReading:
    """Attitude with Gaussian noise, wrapped to the pose conventions."""

    if sigma <= 0.0:
        return ImuReading(pose.roll, pose.pitch, wrap_angle(pose.yaw), t)

    roll = pose.roll + float(rng.normal(0.0, sigma))
    pitch = pose.pitch + float(rng.normal(0.0, sigma))
    yaw = pose.yaw + float(rng.normal(0.0, sigma))
    return ImuReading(
        roll=max(-90.0, min(90.0, roll)),
        pitch=max(-90.0, min(90.0, pitch)),
        yaw=wrap_angle(yaw),
        t=t,
    )


def sample_dvl(
    pose: Pose,
    surge: float,
    heave: float,
    current: Tuple[float, float],
    t: float,
    sds: SdsParams,
    noise: NoiseParams,
    rng: np.random.Generator,
) -> DvlReading:
    altitude = pose.altitude_above(sds.seafloor_depth)
    dropped = noise.dvl_dropout > 0.0 and float(rng.random()) < noise.dvl_dropout
    if altitude > noise.bottom_lock_range or dropped:
        return DvlReading(u=0.0, v=0.0, w=0.0, altitude=0.0, valid=False, t=t)

    cur_u, cur_v = rotate_earth_to_body(current[0], current[1], pose.yaw)
    sigma = noise.sigma("dvl")
    jitter = rng.normal(0.0, sigma, size=3) if sigma > 0.0 else np.zeros(3)
    return DvlReading(
        u=surge + cur_u + float(jitter[0]),
        v=cur_v + float(jitter[1]),
        w=heave + float(jitter[2]),
        altitude=altitude,
        valid=True,
        t=t,
    )


def sample_altimeter(
    pose: Pose,
    sds: SdsParams,
    noise: NoiseParams,
    rng: np.random.Generator,
) -> AltimeterReading:
    """Depth plus altitude; the altitude is garbage over the station footprint."""

    truth = pose.altitude_above(sds.seafloor_depth)
    depth_sigma = noise.sigma("depth")
    depth = pose.z + (float(rng.normal(0.0, depth_sigma)) if depth_sigma > 0.0 else 0.0)

    if sds.in_footprint(pose.x, pose.y):
        return AltimeterReading(
            altitude=truth * float(rng.uniform(0.5, 1.5)),
            occluded=True,
            depth=depth,
        )

    sigma = noise.sigma("altimeter")
    altitude = truth + (float(rng.normal(0.0, sigma)) if sigma > 0.0 else 0.0)
    return AltimeterReading(altitude=altitude, occluded=False, depth=depth)


class UsblLink:
    """Half-duplex acoustic link schedule.

    A fix is emitted at each schedule epoch, one interval (at the current
    rate) after the previous one. When the cycle carries a status upload
    the transmitter is busy for ``upload_time`` seconds right after the
    emission and no fix can go out until it is free again.
    """

    _EPS = 1e-9

    def __init__(self, params: UsblParams = UsblParams()) -> None:
        self._params = params
        self._last_epoch: Optional[float] = None
        self._busy_from = -math.inf
        self._busy_until = -math.inf
        self.emitted = 0

    def busy(self, t: float) -> bool:
        return self._busy_from + self._EPS < t < self._busy_until - self._EPS

    def next_epoch(self, rate: float) -> float:
        interval = usbl_interval(rate)
        if self._last_epoch is None:
            return -math.inf
        return max(self._last_epoch + interval, self._busy_until)

    def due(self, t: float, rate: float) -> bool:
        return t >= self.next_epoch(rate) - self._EPS and not self.busy(t)

    def mark_emitted(self, t: float, rate: float, upload: bool) -> None:
        scheduled = self.next_epoch(rate)
        self._last_epoch = scheduled if math.isfinite(scheduled) and abs(scheduled - t) < 1e-6 else t
        self.emitted += 1
        if upload:
            self._busy_from = t
            self._busy_until = t + self._params.upload_time


def usbl_interval(rate: float) -> float:
    """Seconds between fixes for a rate in fixes per minute."""

    try:
        return USBL_INTERVALS[float(rate)]
    except KeyError:
        raise ConfigError(
            f"unsupported USBL rate {rate} per minute, expected one of {sorted(USBL_INTERVALS)}"
        ) from None


def usbl_poll(
    t: float,
    rate: float,
    link: UsblLink,
    pose: Pose,
    *,
    upload: bool,
    sigma: float,
    latency: float,
    rng: np.random.Generator,
) -> Optional[UsblFix]:
    """Emit a position fix if a schedule epoch falls on ``t``."""

    if not link.due(t, rate):
        return None

    noise = rng.normal(0.0, sigma, size=3) if sigma > 0.0 else np.zeros(3)
    fix = UsblFix(
        x=pose.x + float(noise[0]),
        y=pose.y + float(noise[1]),
        z=pose.z + float(noise[2]),
        timestamp=t,
        latency=latency,
        carries_upload=upload,
        sigma=sigma,
    )
    link.mark_emitted(t, rate, upload)
    LOGGER.debug("USBL fix #%s at t=%.1f (upload=%s)", link.emitted, t, upload)
    return fix


def dead_reckon(nav: NavEstimate, imu: ImuReading, dvl: DvlReading, dt: float, params: NavParams = NavParams()) -> NavEstimate:
    """Integrate DVL velocity rotated by the IMU heading over ``dt``."""

    if dvl.valid:
        u, v, rate = dvl.u, dvl.v, params.drift_rate
    else:
        u, v, rate = nav.u, nav.v, 2.0 * params.drift_rate

    dx, dy = rotate_body_to_earth(u, v, imu.yaw)
    travelled = math.hypot(dx, dy) * dt
    return NavEstimate(
        x=nav.x + dx * dt,
        y=nav.y + dy * dt,
        yaw=imu.yaw,
        drift=nav.drift + rate * travelled + params.drift_floor_rate * dt,
        u=u,
        v=v,
    )


def usbl_correct(nav: NavEstimate, fix: UsblFix, now: float, params: NavParams = NavParams()) -> NavEstimate:
    """Blend the estimate towards a fix with gain drift^2 / (drift^2 + sigma^2)."""

    age = now - fix.timestamp
    if age > params.stale_limit:
        LOGGER.warning("Rejected USBL fix from t=%.1f: %.1f s old", fix.timestamp, age)
        return nav

    spread = nav.drift * nav.drift + fix.sigma * fix.sigma
    if spread == 0.0:
        return nav
    gain = nav.drift * nav.drift / spread
    return replace(
        nav,
        x=nav.x + gain * (fix.x - nav.x),
        y=nav.y + gain * (fix.y - nav.y),
        drift=nav.drift * math.sqrt(1.0 - gain),
    )


def optical_correct(nav: NavEstimate, position: Tuple[float, float], params: NavParams = NavParams()) -> NavEstimate:
    return replace(nav, x=position[0], y=position[1], drift=params.optical_sigma)
