"""Per-tick trajectory records, the CSV log format and run metrics."""
from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union, get_type_hints

from .errors import ContractViolation
from .geometry import wrap_angle

LOGGER = logging.getLogger(__name__)

OUTCOME_DOCKED = "docked"
OUTCOME_TIMEOUT = "timeout"
OUTCOME_ABORTED = "aborted"

ABORT_EVENT = "abort"
REGRESSION_EVENT = "Landing3->Landing2"
PHASE_NAMES = ("Returning", "CloseToDocking", "Landing1", "Landing2", "Landing3", "Docked")


@dataclass(frozen=True)
class TrajectoryRecord:
    """One simulation tick. Field order is the column order of the log."""

    t: float
    phase: str
    x: float
    y: float
    z: float
    roll: float
    pitch: float
    yaw: float
    nav_x: float
    nav_y: float
    nav_yaw: float
    nav_drift: float
    optical_x: Optional[float]
    optical_y: Optional[float]
    visible: bool
    altitude: float
    occluded: bool
    theta_d: Optional[float]
    v_d: Optional[float]
    z_d: Optional[float]
    f_x: float
    f_z: float
    t_z: float
    r: Optional[float]
    v_decision: Optional[float]
    phi: Optional[int]
    usbl_x: Optional[float]
    usbl_y: Optional[float]
    usbl_latency: Optional[float]
    usbl_upload: bool
    event: str
    fault: str


LOG_COLUMNS = tuple(item.name for item in fields(TrajectoryRecord))


@dataclass(frozen=True)
class RunMetrics:
    outcome: str
    total_time: float
    phase_times: Dict[str, float] = field(default_factory=dict)
    final_offset: float = 0.0
    final_yaw_error: Optional[float] = None
    regressions: int = 0
    light_loss_fallbacks: int = 0
    attempts: int = 0
    seed: Optional[int] = None

    @property
    def docked(self) -> bool:
        return self.outcome == OUTCOME_DOCKED


def _format(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_log(records: Sequence[TrajectoryRecord], path: Union[str, Path]) -> Path:
    """Write the comma-separated log with its header row. Raises OSError if unwritable."""

    log_path = Path(path)
    with log_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(LOG_COLUMNS)
        for record in records:
            writer.writerow([_format(getattr(record, name)) for name in LOG_COLUMNS])
    LOGGER.info("Trajectory log written to %s (%s records)", log_path, len(records))
    return log_path


def _parse(raw: str, hint: Any) -> Any:
    if hint is str:
        return raw
    if raw == "":
        return None
    if hint is bool:
        return raw == "1"
    if hint in (int, Optional[int]):
        return int(raw)
    return float(raw)


def read_log(path: Union[str, Path]) -> List[TrajectoryRecord]:
    hints = get_type_hints(TrajectoryRecord)
    with Path(path).open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if tuple(reader.fieldnames or ()) != LOG_COLUMNS:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        return [
            TrajectoryRecord(**{name: _parse(row[name], hints[name]) for name in LOG_COLUMNS})
            for row in reader
        ]


def transitions(records: Sequence[TrajectoryRecord], initial: str = "Returning") -> List[str]:
    """Every phase change visible in the phase column, as 'Old->New'.

    A run starts in ``initial``, so a change on the very first tick counts too.
    """

    changes = []
    previous = initial
    for record in records:
        if record.phase != previous:
            changes.append(f"{previous}->{record.phase}")
        previous = record.phase
    return changes


def summarize(records: Sequence[TrajectoryRecord], seed: Optional[int] = None) -> RunMetrics:
    """Compute run metrics exactly from the records.

    Each interval between consecutive records is charged to the phase of
    the earlier record, so the phase times add up to the total time.
    """

    if not records:
        raise ContractViolation("cannot summarize an empty trajectory")

    phase_times = {name: 0.0 for name in PHASE_NAMES}
    for current, following in zip(records, records[1:]):
        phase_times[current.phase] = phase_times.get(current.phase, 0.0) + (following.t - current.t)

    events = [record.event for record in records if record.event]
    last = records[-1]
    if last.event == ABORT_EVENT:
        outcome = OUTCOME_ABORTED
    elif last.phase == "Docked":
        outcome = OUTCOME_DOCKED
    else:
        outcome = OUTCOME_TIMEOUT

    return RunMetrics(
        outcome=outcome,
        total_time=last.t - records[0].t,
        phase_times=phase_times,
        final_offset=math.hypot(last.x, last.y),
        final_yaw_error=None if last.theta_d is None else abs(wrap_angle(last.theta_d - last.yaw)),
        regressions=sum(1 for event in events if event == REGRESSION_EVENT),
        light_loss_fallbacks=sum(
            1 for event in events if event.startswith("Landing") and event.endswith("->CloseToDocking")
        ),
        attempts=sum(1 for event in events if event.endswith("->Landing3")),
        seed=seed,
    )


def write_metrics(metrics: RunMetrics, path: Union[str, Path]) -> Path:
    metrics_path = Path(path)
    metrics_path.write_text(json.dumps(asdict(metrics), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    LOGGER.info("Metrics written to %s", metrics_path)
    return metrics_path


def read_metrics(path: Union[str, Path]) -> RunMetrics:
    return RunMetrics(**json.loads(Path(path).read_text(encoding="utf-8")))
