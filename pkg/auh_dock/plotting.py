"""PNG rendering of a run: plan view and height above the docking panel."""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Callable, Dict, List, Sequence, Tuple, Union

from PIL import Image, ImageDraw, ImageFont

from .errors import ContractViolation
from .trajectory_log import TrajectoryRecord

LOGGER = logging.getLogger(__name__)

PHASE_COLOURS: Dict[str, Tuple[int, int, int]] = {
    "Returning": (148, 163, 184),
    "CloseToDocking": (56, 189, 248),
    "Landing1": (251, 191, 36),
    "Landing2": (249, 115, 22),
    "Landing3": (239, 68, 68),
    "Docked": (34, 197, 94),
}

BACKGROUND = (15, 23, 42)
GRID = (51, 65, 85)
TEXT = "#F8FAFC"


def _load_font(size: int, *, bold: bool = False) -> ImageFont.FreeTypeFont | ImageFont.ImageFont:
    """Try to load a TTF font with graceful fallback to the default bitmap font."""

    font_candidates = [
        "DejaVuSans-Bold.ttf" if bold else "DejaVuSans.ttf",
        "/usr/share/fonts/truetype/dejavu/DejaVuSans-Bold.ttf" if bold else \
        "/usr/share/fonts/truetype/dejavu/DejaVuSans.ttf",
    ]

    for path in font_candidates:
        try:
            return ImageFont.truetype(path, size)
        except OSError:
            continue

    return ImageFont.load_default()


def _scaler(lo: float, hi: float, start: float, end: float) -> Callable[[float], float]:
    span = hi - lo if hi > lo else 1.0

    def scale(value: float) -> float:
        return start + (value - lo) / span * (end - start)

    return scale


def _polyline(
    draw: ImageDraw.ImageDraw,
    points: Sequence[Tuple[float, float, str]],
) -> None:
    for (x0, y0, phase), (x1, y1, _) in zip(points, points[1:]):
        draw.line([(x0, y0), (x1, y1)], fill=PHASE_COLOURS.get(phase, (255, 255, 255)), width=2)


def render_trajectory(
    records: Sequence[TrajectoryRecord],
    path: Union[str, Path],
    *,
    panel_depth: float,
    width: int = 1400,
    height: int = 700,
) -> Path:
    """Left: track over ground (north up, east right). Right: height above the panel against time."""

    if not records:
        raise ContractViolation("nothing to plot: the trajectory is empty")

    image = Image.new("RGB", (width, height), BACKGROUND)
    draw = ImageDraw.Draw(image)
    title_font = _load_font(22, bold=True)
    label_font = _load_font(16)

    margin = 50
    half = width // 2
    plan = (margin, margin, half - margin // 2, height - margin)
    profile = (half + margin // 2, margin, width - margin, height - margin)
    for box in (plan, profile):
        draw.rectangle(box, outline=GRID, width=1)

    north = [record.x for record in records] + [0.0]
    east = [record.y for record in records] + [0.0]
    reach = max(max(abs(v) for v in north), max(abs(v) for v in east), 1.0) * 1.05
    to_col = _scaler(-reach, reach, plan[0], plan[2])
    to_row = _scaler(-reach, reach, plan[3], plan[1])
    _polyline(draw, [(to_col(r.y), to_row(r.x), r.phase) for r in records])
    station = (to_col(0.0), to_row(0.0))
    draw.ellipse([station[0] - 5, station[1] - 5, station[0] + 5, station[1] + 5], outline=TEXT, width=2)
    draw.text((plan[0], plan[1] - 30), "Plan view (north up)", font=title_font, fill=TEXT)

    times = [record.t for record in records]
    heights = [panel_depth - record.z for record in records]
    to_time = _scaler(min(times), max(times), profile[0], profile[2])
    to_height = _scaler(min(min(heights), 0.0), max(max(heights), 1.0), profile[3], profile[1])
    zero = to_height(0.0)
    draw.line([(profile[0], zero), (profile[2], zero)], fill=GRID, width=1)
    _polyline(draw, [(to_time(r.t), to_height(h), r.phase) for r, h in zip(records, heights)])
    draw.text((profile[0], profile[1] - 30), "Height above panel (m) vs time (s)", font=title_font, fill=TEXT)
    draw.text((profile[2] - 80, profile[3] + 8), f"{times[-1]:.0f} s", font=label_font, fill=TEXT)

    legend: List[str] = list(PHASE_COLOURS)
    for index, phase in enumerate(legend):
        x = margin + index * 200
        draw.rectangle([x, height - 28, x + 14, height - 14], fill=PHASE_COLOURS[phase])
        draw.text((x + 20, height - 30), phase, font=label_font, fill=TEXT)

    out_path = Path(path)
    image.save(out_path, format="PNG")
    LOGGER.info("Trajectory plot written to %s", out_path)
    return out_path
