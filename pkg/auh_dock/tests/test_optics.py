import math
import time
import unittest
from unittest.mock import MagicMock

import numpy as np

from auh_dock.errors import DomainError
from auh_dock.geometry import Pose
from auh_dock.optics import (
    CameraParams,
    SpotObservation,
    body_coords,
    camera_coords,
    deviation_angles,
    earth_position,
    effective_radius,
    observe_light,
    optical_fix,
    project_spot,
)

LIGHT = (0.0, 0.0, 20.0)


class TestEffectiveRadius(unittest.TestCase):
    def test_work_altitudes(self):
        self.assertAlmostEqual(effective_radius(5.0, 70.0), 3.501, delta=1e-3)
        self.assertAlmostEqual(effective_radius(3.5, 70.0), 2.451, delta=1e-3)

    def test_degenerate_cone(self):
        self.assertLess(effective_radius(5.0, 1e-9), 1e-9)


class TestProjection(unittest.TestCase):
    def setUp(self):
        self.cam = CameraParams()

    def test_centred_spot(self):
        spot = project_spot(Pose(x=0.0, y=self.cam.offset, z=15.0, yaw=0.0), LIGHT, self.cam)
        self.assertTrue(spot.visible)
        self.assertAlmostEqual(spot.u_bar, 0.0, places=9)
        self.assertAlmostEqual(spot.v_bar, 0.0, places=9)
        self.assertEqual(spot.h, 5.0)

    def test_outside_cone(self):
        spot = project_spot(Pose(x=6.0, y=0.0, z=15.0), LIGHT, self.cam)
        self.assertFalse(spot.visible)

    def test_light_above_camera(self):
        self.assertFalse(project_spot(Pose(z=20.0), LIGHT, self.cam).visible)
        self.assertFalse(project_spot(Pose(z=21.0), LIGHT, self.cam).visible)

    def test_round_trip_in_cone(self):
        rng = np.random.default_rng(21)
        started = time.perf_counter()
        checked = 0
        while checked < 1000:
            h = float(rng.uniform(0.5, 8.0))
            yaw = float(rng.uniform(-180.0, 180.0))
            radius = effective_radius(h, self.cam.divergence) * 0.95 * math.sqrt(float(rng.uniform()))
            bearing = float(rng.uniform(0.0, 2.0 * math.pi))
            # camera sits at body (0, -L); back out the vehicle centre from it
            cam_x = radius * math.cos(bearing)
            cam_y = radius * math.sin(bearing)
            rad = math.radians(yaw)
            x = cam_x - self.cam.offset * math.sin(rad)
            y = cam_y + self.cam.offset * math.cos(rad)
            pose = Pose(x=x, y=y, z=LIGHT[2] - h, yaw=yaw)
            spot = project_spot(pose, LIGHT, self.cam)
            if not spot.visible:
                continue
            fix = optical_fix(spot, yaw, self.cam)
            self.assertAlmostEqual(fix[0], x, delta=1e-9)
            self.assertAlmostEqual(fix[1], y, delta=1e-9)
            checked += 1
        self.assertLess(time.perf_counter() - started, 1.0)

    def test_visibility_monotone_in_height(self):
        for offset in (0.0, 1.0, 2.0, 3.0):
            seen = False
            for h in np.linspace(0.5, 10.0, 40):
                spot = project_spot(Pose(x=offset, y=self.cam.offset, z=LIGHT[2] - float(h)), LIGHT, self.cam)
                if seen:
                    self.assertTrue(spot.visible, (offset, h))
                seen = seen or spot.visible

    def test_pixel_noise_applied(self):
        rng = MagicMock()
        rng.normal.return_value = np.array([2.0, -1.0])
        spot = observe_light(Pose(x=0.0, y=self.cam.offset, z=15.0), LIGHT, self.cam, 2.0, rng)
        self.assertTrue(spot.visible)
        self.assertAlmostEqual(spot.u_bar, 2.0, places=9)
        self.assertAlmostEqual(spot.v_bar, -1.0, places=9)

    def test_hidden_spot_has_no_fix(self):
        self.assertIsNone(optical_fix(SpotObservation.hidden(5.0), 0.0, self.cam))


class TestChain(unittest.TestCase):
    def setUp(self):
        self.cam = CameraParams()

    def test_deviation_angles(self):
        self.assertEqual(deviation_angles(0.0, 0.0, self.cam), (0.0, 0.0))
        alpha, _ = deviation_angles(self.cam.width / 2.0, 0.0, self.cam)
        self.assertAlmostEqual(alpha, 35.0, places=9)
        alpha, _ = deviation_angles(self.cam.width / 4.0, 0.0, self.cam)
        self.assertAlmostEqual(alpha, 19.29, delta=0.01)

    def test_out_of_bounds_pixel(self):
        with self.assertRaises(DomainError):
            deviation_angles(self.cam.width, 0.0, self.cam)
        with self.assertRaises(DomainError):
            deviation_angles(0.0, -self.cam.height, self.cam)

    def test_camera_coords(self):
        self.assertEqual(camera_coords(0.0, 0.0, 4.0), (0.0, 0.0))
        _, y_c = camera_coords(19.29, 0.0, 3.5)
        self.assertAlmostEqual(y_c, 1.225, delta=0.005)
        near = camera_coords(10.0, -7.0, 2.0)
        far = camera_coords(10.0, -7.0, 4.0)
        self.assertAlmostEqual(far[0], 2.0 * near[0])
        self.assertAlmostEqual(far[1], 2.0 * near[1])

    def test_body_coords(self):
        self.assertEqual(body_coords(0.0, 0.0, 0.5), (0.0, -0.5))
        self.assertEqual(body_coords(1.2, 0.4, 0.0), (1.2, 0.4))
        x_b, y_b = body_coords(1.2, 0.4, 0.5)
        self.assertAlmostEqual(x_b, 1.2)
        self.assertAlmostEqual(y_b, -0.1)

    def test_earth_position(self):
        x, y = earth_position(0.0, -0.5, 0.0)
        self.assertAlmostEqual(x, 0.0)
        self.assertAlmostEqual(y, 0.5)
        x, y = earth_position(0.0, -0.5, 90.0)
        self.assertAlmostEqual(x, -0.5, places=12)
        self.assertAlmostEqual(y, 0.0, places=12)
        for yaw in (-170.0, 0.0, 33.0, 180.0):
            x, y = earth_position(0.0, 0.0, yaw)
            self.assertEqual((abs(x), abs(y)), (0.0, 0.0))

    def test_matches_expanded_form(self):
        rng = np.random.default_rng(8)
        offset = 0.5
        for alpha, beta, yaw, h in rng.uniform((-30.0, -30.0, -180.0, 0.5), (30.0, 30.0, 180.0, 8.0), size=(500, 4)):
            x_b, y_b = body_coords(*camera_coords(alpha, beta, h), offset)
            x, y = earth_position(x_b, y_b, yaw)
            ta = math.tan(math.radians(alpha))
            tb = math.tan(math.radians(beta))
            s = math.sin(math.radians(yaw))
            c = math.cos(math.radians(yaw))
            expected_x = h * ta * s - h * tb * c - offset * s
            expected_y = -h * tb * s - h * ta * c + offset * c
            self.assertAlmostEqual(x, expected_x, delta=1e-11)
            self.assertAlmostEqual(y, expected_y, delta=1e-11)


if __name__ == '__main__':
    unittest.main()
