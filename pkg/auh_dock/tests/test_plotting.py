import tempfile
import unittest
from pathlib import Path

from PIL import Image

from auh_dock.errors import ContractViolation
from auh_dock.plotting import PHASE_COLOURS, render_trajectory
from auh_dock.trajectory_log import TrajectoryRecord


def _record(t, phase, x, y, z):
    return TrajectoryRecord(
        t=t, phase=phase, x=x, y=y, z=z, roll=0.0, pitch=0.0, yaw=0.0,
        nav_x=x, nav_y=y, nav_yaw=0.0, nav_drift=0.5, optical_x=None, optical_y=None,
        visible=False, altitude=22.0 - z, occluded=False, theta_d=None, v_d=None, z_d=None,
        f_x=0.0, f_z=0.0, t_z=0.0, r=None, v_decision=None, phi=None,
        usbl_x=None, usbl_y=None, usbl_latency=None, usbl_upload=False, event="", fault="",
    )


class TestRenderTrajectory(unittest.TestCase):
    def test_png_written(self):
        records = [_record(k * 1.0, phase, -10.0 + k, -4.0 + k / 2.0, 14.0 + k / 2.0)
                   for k, phase in enumerate(list(PHASE_COLOURS) * 2)]
        with tempfile.TemporaryDirectory() as tmp:
            path = render_trajectory(records, Path(tmp) / "trajectory.png", panel_depth=20.0, width=800, height=400)
            with Image.open(path) as image:
                self.assertEqual(image.format, "PNG")
                self.assertEqual(image.size, (800, 400))
                colours = {colour for _, colour in image.convert("RGB").getcolors(maxcolors=1 << 20)}
        self.assertIn(PHASE_COLOURS["Landing2"], colours)

    def test_single_record(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = render_trajectory([_record(0.0, "Returning", 0.0, 0.0, 20.0)], Path(tmp) / "one.png", panel_depth=20.0)
            self.assertTrue(path.exists())

    def test_empty_trajectory(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(ContractViolation):
                render_trajectory([], Path(tmp) / "none.png", panel_depth=20.0)


if __name__ == '__main__':
    unittest.main()
