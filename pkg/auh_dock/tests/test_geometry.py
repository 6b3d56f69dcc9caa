import math
import unittest

import numpy as np

from auh_dock.errors import DomainError
from auh_dock.geometry import (
    ActuatorCommand,
    Pose,
    SdsParams,
    bearing_to,
    rotate_body_to_earth,
    rotate_earth_to_body,
    wrap_angle,
)


class TestWrapAngle(unittest.TestCase):
    def test_known_values(self):
        self.assertEqual(wrap_angle(0.0), 0.0)
        self.assertEqual(wrap_angle(190.0), -170.0)
        self.assertEqual(wrap_angle(-180.0), 180.0)

    def test_half_turn_boundaries(self):
        for angle in (-540.0, -180.0, 180.0, 540.0):
            self.assertEqual(wrap_angle(angle), 180.0, angle)

    def test_idempotent_and_in_range(self):
        rng = np.random.default_rng(4)
        for angle in rng.uniform(-5000.0, 5000.0, size=1000):
            once = wrap_angle(float(angle))
            self.assertGreater(once, -180.0)
            self.assertLessEqual(once, 180.0)
            self.assertEqual(wrap_angle(once), once)
            self.assertAlmostEqual(math.remainder(float(angle) - once, 360.0), 0.0, places=9)

    def test_non_finite_rejected(self):
        for bad in (math.nan, math.inf, -math.inf):
            with self.assertRaises(DomainError):
                wrap_angle(bad)


class TestRotation(unittest.TestCase):
    def test_known_values(self):
        x, y = rotate_body_to_earth(1.0, 0.0, 0.0)
        self.assertAlmostEqual(x, 1.0)
        self.assertAlmostEqual(y, 0.0)

        x, y = rotate_body_to_earth(1.0, 0.0, 90.0)
        self.assertAlmostEqual(x, 0.0, places=12)
        self.assertAlmostEqual(y, 1.0, places=12)

        x, y = rotate_body_to_earth(0.3, -0.4, 36.87)
        self.assertAlmostEqual(x, 0.48, delta=1e-2)
        self.assertAlmostEqual(y, -0.14, delta=1e-2)

    def test_norm_preserved_and_inverse(self):
        rng = np.random.default_rng(11)
        for x_b, y_b, yaw in rng.uniform(-100.0, 100.0, size=(1000, 3)) * (1.0, 1.0, 3.6):
            x_e, y_e = rotate_body_to_earth(float(x_b), float(y_b), float(yaw))
            self.assertAlmostEqual(math.hypot(x_e, y_e), math.hypot(x_b, y_b), delta=1e-12 * max(1.0, math.hypot(x_b, y_b)))
            back = rotate_earth_to_body(x_e, y_e, float(yaw))
            self.assertAlmostEqual(back[0], x_b, delta=1e-12 * 100)
            self.assertAlmostEqual(back[1], y_b, delta=1e-12 * 100)

    def test_non_finite_yaw_rejected(self):
        with self.assertRaises(DomainError):
            rotate_body_to_earth(1.0, 0.0, math.nan)


class TestBearing(unittest.TestCase):
    def test_north_east_south(self):
        self.assertAlmostEqual(bearing_to(0.0, 0.0, 5.0, 0.0), 0.0)
        self.assertAlmostEqual(bearing_to(0.0, 0.0, 0.0, 5.0), 90.0)
        self.assertAlmostEqual(bearing_to(0.0, 0.0, -5.0, 0.0), 180.0)
        self.assertAlmostEqual(bearing_to(0.0, 0.0, 0.0, -5.0), -90.0)


class TestRecords(unittest.TestCase):
    def test_actuator_command_clamped(self):
        cmd = ActuatorCommand(f_x=3.0, f_z=-2.0, t_z=0.25)
        self.assertEqual((cmd.f_x, cmd.f_z, cmd.t_z), (1.0, -1.0, 0.25))

    def test_pose_helpers(self):
        pose = Pose(x=3.0, y=4.0, z=15.0)
        self.assertEqual(pose.horizontal_distance(), 5.0)
        self.assertEqual(pose.altitude_above(22.0), 7.0)
        self.assertTrue(pose.is_finite())
        self.assertFalse(Pose(x=math.nan).is_finite())

    def test_footprint_boundary_inclusive(self):
        sds = SdsParams(footprint_half_width=1.5)
        self.assertTrue(sds.in_footprint(0.0, 0.0))
        self.assertTrue(sds.in_footprint(1.5, -1.5))
        self.assertFalse(sds.in_footprint(1.5001, 0.0))
        self.assertFalse(sds.in_footprint(10.0, 0.0))

    def test_footprint_follows_panel_yaw(self):
        sds = SdsParams(yaw=45.0, footprint_half_width=1.0)
        self.assertTrue(sds.in_footprint(1.2, 0.0))
        self.assertFalse(sds.in_footprint(1.0, 1.0))


if __name__ == '__main__':
    unittest.main()
