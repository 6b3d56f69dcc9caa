"""Configuration helpers for the docking simulator.

Two layers: :class:`RuntimeSettings` comes from environment variables and
only affects how the tool runs; :class:`ScenarioConfig` comes from a
scenario file and fully determines what is simulated.
"""
from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, fields, is_dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union, get_args, get_origin, get_type_hints

from .control import HelmParams, PidGains
from .docking import DEFAULT_PHASE_PARAMS, FsmParams, Phase, PhaseParams, VerticalMode
from .errors import ScenarioError
from .geometry import Pose, SdsParams
from .optics import CameraParams, effective_radius
from .plant import CurrentField, PlantParams
from .sensors import USBL_INTERVALS, NavParams, NoiseParams, UsblParams

LOGGER = logging.getLogger(__name__)

DEFAULT_LOG_LEVEL = "INFO"
DEFAULT_OUTPUT_DIR = "runs"
CURRENT_WARNING_SPEED = 0.5

_TRUE = {"yes", "true", "1", "on"}
_FALSE = {"no", "false", "0", "off"}

RING_ALIASES: Dict[str, Tuple[str, ...]] = {
    "ring.inner": ("landing1.inner_radius", "landing2.inner_radius"),
    "ring.outer": ("landing1.outer_radius", "landing2.outer_radius"),
    "ring.transit_speed": ("landing1.speed", "landing2.speed"),
    "ring.outer_speed": ("landing1.outer_speed", "landing2.outer_speed"),
}


@dataclass(frozen=True)
class TimingParams:
    dt: float = 0.1
    max_duration: float = 1800.0


@dataclass(frozen=True)
class BatchParams:
    success_floor: float = 0.95


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything a run needs besides the seed override."""

    sds: SdsParams = SdsParams()
    start: Pose = Pose(x=-20.0, y=-8.0, z=14.0, yaw=0.0)
    camera: CameraParams = CameraParams()
    plant: PlantParams = PlantParams()
    current: CurrentField = CurrentField()
    noise: NoiseParams = NoiseParams()
    nav: NavParams = NavParams()
    usbl: UsblParams = UsblParams()
    helm: HelmParams = HelmParams()
    pid_yaw: PidGains = PidGains(kp=0.0225, kd=0.135)
    pid_speed: PidGains = PidGains(kp=2.0, ki=0.5, integral_limit=4.0)
    pid_depth: PidGains = PidGains(kp=1.0, ki=0.01, kd=3.0, integral_limit=2.0)
    returning: PhaseParams = DEFAULT_PHASE_PARAMS[Phase.RETURNING]
    close_to_docking: PhaseParams = DEFAULT_PHASE_PARAMS[Phase.CLOSE_TO_DOCKING]
    landing1: PhaseParams = DEFAULT_PHASE_PARAMS[Phase.LANDING1]
    landing2: PhaseParams = DEFAULT_PHASE_PARAMS[Phase.LANDING2]
    landing3: PhaseParams = DEFAULT_PHASE_PARAMS[Phase.LANDING3]
    fsm: FsmParams = FsmParams()
    timing: TimingParams = TimingParams()
    batch: BatchParams = BatchParams()
    seed: int = 1


@dataclass(frozen=True)
class RuntimeSettings:
    """Runtime configuration loaded from environment variables."""

    log_level: str = DEFAULT_LOG_LEVEL
    output_dir: str = DEFAULT_OUTPUT_DIR
    workers: int = 1

    @classmethod
    def load(cls) -> "RuntimeSettings":
        """Load settings from environment variables.

        Bad values are logged and replaced by defaults, never fatal.
        """

        log_level_raw = os.getenv("AUH_DOCK_LOG_LEVEL")
        output_dir = os.getenv("AUH_DOCK_OUTPUT_DIR") or cls.output_dir
        workers_raw = os.getenv("AUH_DOCK_WORKERS")

        log_level = cls.log_level
        if log_level_raw:
            candidate = log_level_raw.strip().upper()
            if isinstance(logging.getLevelName(candidate), int):
                log_level = candidate
            else:
                LOGGER.error(
                    "AUH_DOCK_LOG_LEVEL должно быть уровнем логирования, получили '%s'",
                    log_level_raw,
                )

        def _parse_int(
            raw_value: Optional[str],
            *,
            name: str,
            default: int,
            minimum: int,
            maximum: int,
        ) -> int:
            if raw_value is None:
                return default

            try:
                parsed = int(raw_value)
            except ValueError:
                LOGGER.error(
                    "%s должно быть целым числом, получили '%s'",
                    name,
                    raw_value,
                )
                return default

            if parsed < minimum or parsed > maximum:
                LOGGER.error(
                    "%s должно быть в диапазоне %s–%s, получили '%s'",
                    name,
                    minimum,
                    maximum,
                    raw_value,
                )
                return default

            return parsed

        workers = _parse_int(
            workers_raw,
            name="AUH_DOCK_WORKERS",
            default=cls.workers,
            minimum=1,
            maximum=64,
        )

        return cls(log_level=log_level, output_dir=output_dir, workers=workers)


def _section_types() -> Dict[str, type]:
    hints = get_type_hints(ScenarioConfig)
    return {name: hint for name, hint in hints.items() if is_dataclass(hint)}


def _attribute(section: str) -> str:
    return section.replace(".", "_")


def _dotted(attribute: str) -> str:
    return "pid." + attribute[4:] if attribute.startswith("pid_") else attribute


def _coerce(raw: str, hint: Any, key: str, line: int) -> Any:
    origin = get_origin(hint)
    if origin is Union:
        if raw.lower() == "none":
            return None
        inner = [arg for arg in get_args(hint) if arg is not type(None)]
        return _coerce(raw, inner[0], key, line)

    try:
        if hint is bool:
            lowered = raw.lower()
            if lowered in _TRUE:
                return True
            if lowered in _FALSE:
                return False
            raise ValueError(raw)
        if hint is int:
            return int(raw)
        if hint is float:
            parsed = float(raw)
            if math.isnan(parsed):
                raise ValueError(raw)
            return parsed
        if isinstance(hint, type) and issubclass(hint, Enum):
            for member in hint:
                if raw.lower() in (member.value.lower(), member.name.lower()):
                    return member
            raise ValueError(raw)
    except ValueError:
        raise ScenarioError(f"cannot read {raw!r} as {getattr(hint, '__name__', hint)}", key=key, line=line) from None
    return raw


def _parse_lines(text: str) -> List[Tuple[str, str, int]]:
    entries: List[Tuple[str, str, int]] = []
    seen: Dict[str, int] = {}
    for number, raw_line in enumerate(text.splitlines(), start=1):
        content = raw_line.split("#", 1)[0].strip()
        if not content:
            continue
        if "=" not in content:
            raise ScenarioError(f"expected 'key = value', got {content!r}", line=number)
        key, value = (part.strip() for part in content.split("=", 1))
        if not key or not value:
            raise ScenarioError("empty key or value", key=key or None, line=number)
        if key in seen:
            raise ScenarioError(f"duplicate key, first set on line {seen[key]}", key=key, line=number)
        seen[key] = number
        entries.append((key, value, number))
    return entries


def parse_scenario(text: str) -> ScenarioConfig:
    """Build a validated config from scenario file contents."""

    sections = _section_types()
    overrides: Dict[str, Dict[str, Any]] = {}
    origins: Dict[str, Tuple[str, int]] = {}
    seed: Optional[int] = None

    for key, value, line in _parse_lines(text):
        if key == "seed":
            seed = _coerce(value, int, key, line)
            origins["seed"] = (key, line)
            continue

        for target in RING_ALIASES.get(key, (key,)):
            section, _, name = target.rpartition(".")
            attribute = _attribute(section)
            section_type = sections.get(attribute)
            if section_type is None:
                raise ScenarioError("unknown section", key=key, line=line)
            hints = get_type_hints(section_type)
            if name not in hints:
                raise ScenarioError("unknown key", key=key, line=line)
            overrides.setdefault(attribute, {})[name] = _coerce(value, hints[name], key, line)
            origins[target] = (key, line)

    defaults = ScenarioConfig()
    changes: Dict[str, Any] = {
        attribute: replace(getattr(defaults, attribute), **values) for attribute, values in overrides.items()
    }
    if seed is not None:
        changes["seed"] = seed
    config = replace(defaults, **changes)
    validate_scenario(config, origins)
    return config


def load_scenario(path: Union[str, Path]) -> ScenarioConfig:
    scenario_path = Path(path)
    try:
        text = scenario_path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ScenarioError(f"scenario file not found: {scenario_path}") from None
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {scenario_path}: {exc}") from exc

    config = parse_scenario(text)
    LOGGER.info("Loaded scenario %s (seed %s, dt %s s)", scenario_path, config.seed, config.timing.dt)
    return config


def _fail(message: str, key: str, origins: Dict[str, Tuple[str, int]]) -> None:
    source, line = origins.get(key, (key, None))
    raise ScenarioError(message, key=source, line=line)


def validate_scenario(config: ScenarioConfig, origins: Optional[Dict[str, Tuple[str, int]]] = None) -> None:
    """Check every cross-field constraint; raise :class:`ScenarioError` on the first breach."""

    origins = origins or {}

    if not 0.0 < config.timing.dt <= 0.5:
        _fail(f"dt must lie in (0, 0.5], got {config.timing.dt}", "timing.dt", origins)
    if not config.timing.max_duration > 0.0:
        _fail("max_duration must be positive", "timing.max_duration", origins)
    if not 0.0 <= config.batch.success_floor <= 1.0:
        _fail("success_floor must lie in [0, 1]", "batch.success_floor", origins)

    sds = config.sds
    if sds.seafloor_depth < sds.depth:
        _fail("seafloor must not be shallower than the docking panel", "sds.seafloor_depth", origins)
    if not sds.footprint_half_width > 0.0:
        _fail("footprint half-width must be positive", "sds.footprint_half_width", origins)
    if not 0.0 <= config.start.z <= sds.seafloor_depth:
        _fail("start depth must lie between the surface and the seafloor", "start.z", origins)
    for name in ("roll", "pitch"):
        if not -90.0 <= getattr(config.start, name) <= 90.0:
            _fail(f"start {name} must lie in [-90, 90]", f"start.{name}", origins)
    if not -180.0 < config.start.yaw <= 180.0:
        _fail("start yaw must lie in (-180, 180]", "start.yaw", origins)

    cam = config.camera
    if cam.width <= 0 or cam.height <= 0:
        _fail("image size must be positive", "camera.width", origins)
    for name in ("alpha0", "beta0"):
        if not 0.0 < getattr(cam, name) < 90.0:
            _fail(f"{name} must lie in (0, 90)", f"camera.{name}", origins)
    if not 0.0 < cam.divergence < 180.0:
        _fail("divergence must lie in (0, 180)", "camera.divergence", origins)
    if cam.offset < 0.0:
        _fail("camera offset must not be negative", "camera.offset", origins)

    for item in fields(NoiseParams):
        if item.name.endswith("_sigma") or item.name == "scale":
            if getattr(config.noise, item.name) < 0.0:
                _fail("noise parameters must not be negative", f"noise.{item.name}", origins)
    if not 0.0 <= config.noise.dvl_dropout <= 1.0:
        _fail("dvl_dropout must lie in [0, 1]", "noise.dvl_dropout", origins)

    for item in fields(PlantParams):
        if getattr(config.plant, item.name) <= 0.0 and item.name != "attitude_amplitude":
            _fail("plant coefficients must be positive", f"plant.{item.name}", origins)

    for item in fields(FsmParams):
        if not getattr(config.fsm, item.name) > 0.0:
            _fail("timers must be positive", f"fsm.{item.name}", origins)

    for phase, section in (
        (Phase.RETURNING, "returning"),
        (Phase.CLOSE_TO_DOCKING, "close_to_docking"),
        (Phase.LANDING1, "landing1"),
        (Phase.LANDING2, "landing2"),
        (Phase.LANDING3, "landing3"),
    ):
        _validate_phase(phase, section, getattr(config, section), config, origins)

    speed = math.hypot(config.current.cx, config.current.cy) + abs(config.current.gust_amplitude)
    if speed > CURRENT_WARNING_SPEED:
        LOGGER.warning("Current up to %.2f m/s exceeds what the vehicle can hold against", speed)


def _validate_phase(
    phase: Phase,
    section: str,
    params: PhaseParams,
    config: ScenarioConfig,
    origins: Dict[str, Tuple[str, int]],
) -> None:
    for name in (
        "range_threshold",
        "distance_threshold",
        "yaw_threshold",
        "pitch_threshold",
        "roll_threshold",
        "depth_threshold",
    ):
        value = getattr(params, name)
        if value is not None and not value > 0.0:
            _fail("thresholds must be positive", f"{section}.{name}", origins)

    if params.speed < 0.0:
        _fail("speed must not be negative", f"{section}.speed", origins)
    if params.criterion_hold < 0.0:
        _fail("criterion_hold must not be negative", f"{section}.criterion_hold", origins)
    if params.usbl_rate not in USBL_INTERVALS:
        _fail(f"USBL rate must be one of {sorted(USBL_INTERVALS)} per minute", f"{section}.usbl_rate", origins)

    if params.vertical_mode is VerticalMode.CONSTANT_DEPTH:
        if not config.sds.depth > params.vertical_target:
            _fail("panel depth must exceed the work altitude", f"{section}.vertical_target", origins)
    if not params.vertical_target > 0.0:
        _fail("vertical target must be positive", f"{section}.vertical_target", origins)

    if phase is Phase.RETURNING and params.range_threshold is None:
        _fail("Returning needs a range threshold", f"{section}.range_threshold", origins)
    if phase in (Phase.LANDING1, Phase.LANDING2):
        if params.distance_threshold is None:
            _fail("Landing needs a distance threshold", f"{section}.distance_threshold", origins)
        if not 0.0 <= params.inner_radius < params.outer_radius:
            _fail(
                f"inner radius {params.inner_radius} must be below outer radius {params.outer_radius}",
                f"{section}.inner_radius",
                origins,
            )
        reach = effective_radius(params.vertical_target, config.camera.divergence)
        if not params.outer_radius < reach:
            _fail(
                f"outer radius {params.outer_radius} must be below the illuminated radius {reach:.3f}",
                f"{section}.outer_radius",
                origins,
            )
    if phase is Phase.LANDING2 and params.yaw_threshold is None:
        _fail("Landing2 needs a yaw threshold", f"{section}.yaw_threshold", origins)
    if phase is Phase.LANDING3:
        for name in ("yaw_threshold", "pitch_threshold", "roll_threshold", "depth_threshold"):
            if getattr(params, name) is None:
                _fail("docking criterion needs every threshold", f"{section}.{name}", origins)


def _render(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, Enum):
        return value.value
    return repr(value)


def dump_config(config: ScenarioConfig) -> str:
    """Render a config in scenario file format, one key per line."""

    lines = ["# auh_dock scenario", f"seed = {config.seed}"]
    for item in fields(ScenarioConfig):
        section = getattr(config, item.name)
        if not is_dataclass(section):
            continue
        lines.append("")
        for entry in fields(section):
            lines.append(f"{_dotted(item.name)}.{entry.name} = {_render(getattr(section, entry.name))}")
    return "\n".join(lines) + "\n"


def dump_defaults() -> str:
    return dump_config(ScenarioConfig())
