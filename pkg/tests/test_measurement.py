import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from robonav.calibration import CameraIntrinsics, ExtrinsicPose, calibrate, ground_metric_map, rodrigues
from robonav.measurement import bearing_deg, build_report, euclidean_cm, euclidean_px, normalize_angle
from robonav.segmentation import Blob, ColorClass, extract_blobs, label_image, scene_from_blobs
from robonav.synthcam import CameraSpec, calibration_views, random_arena, render_arena

from conftest import TRUE_K

OVERHEAD_2PX = ground_metric_map(CameraIntrinsics(400, 400, 0, 320, 240), ExtrinsicPose(np.eye(3), [0, 0, 200.0]))

coords = st.tuples(st.floats(-1e4, 1e4), st.floats(-1e4, 1e4))


def test_three_four_five():
    assert euclidean_px((0, 0), (3, 4)) == 5.0
    assert euclidean_px((7, 7), (7, 7)) == 0.0


def test_cm_distance_two_px_per_cm():
    assert euclidean_cm((270, 240), (370, 240), OVERHEAD_2PX) == pytest.approx(50.0, abs=1e-6)
    assert euclidean_cm((10, 10), (10, 10), OVERHEAD_2PX) == 0.0


@given(coords, coords, coords)
def test_triangle_inequality(a, b, c):
    assert euclidean_px(a, c) <= euclidean_px(a, b) + euclidean_px(b, c) + 1e-9


@pytest.mark.parametrize("deg, want", [(0, 0), (180, 180), (-180, 180), (190, -170), (540, 180), (-190, 170)])
def test_normalize_angle(deg, want):
    assert normalize_angle(deg) == pytest.approx(want)


def _obs(robot, target, obstacles=()):
    def b(color, c):
        return Blob(color, 50, c, (0, 0, 1, 1))
    return scene_from_blobs(
        [b(ColorClass.ROBOT_GREEN, robot), b(ColorClass.TARGET_RED, target)]
        + [b(ColorClass.OBSTACLE_BLUE, o) for o in obstacles]
    )


def test_report_bearing_axes():
    rep = build_report(_obs((0, 0), (10, 0), [(0, 10)]))
    assert rep.robot_to_target_px == 10.0
    assert bearing_deg((0, 0), (10, 0)) == 0.0
    assert rep.obstacles[0].bearing_deg == 90.0
    assert rep.obstacles[0].distance_px == 10.0


def test_pixel_only_report_has_no_cm():
    rep = build_report(_obs((0, 0), (10, 0), [(0, 10)]))
    assert not rep.metric
    assert rep.robot_to_target_cm is None and rep.obstacles[0].distance_cm is None
    assert build_report(_obs((270, 240), (370, 240)), OVERHEAD_2PX).robot_to_target_cm == pytest.approx(50.0)


def test_report_deterministic():
    obs = _obs((1.5, 2.5), (30.25, 4.0), [(3, 4), (9, 9)])
    assert build_report(obs, OVERHEAD_2PX) == build_report(obs, OVERHEAD_2PX)


def test_report_matches_renderer_truth():
    for seed in range(50):
        img, truth = render_arena(random_arena(seed, n_obstacles=2))
        rep = build_report(scene_from_blobs(extract_blobs(label_image(img))))
        want = euclidean_px(truth.robot_pixel, truth.target_pixel)
        assert abs(rep.robot_to_target_px - want) < 1.0
        # obstacles are reported in blob order; match them to the truth by proximity
        for od in rep.obstacles:
            k = int(np.argmin([euclidean_px(od.centroid, p) for p in truth.obstacle_pixel]))
            assert abs(od.distance_px - euclidean_px(truth.robot_pixel, truth.obstacle_pixel[k])) < 1.0


def oblique_camera(rvec, t):
    return CameraSpec(TRUE_K, ExtrinsicPose(rodrigues(rvec), t), 640, 480)


OBLIQUE_A = oblique_camera([0.35, -0.1, 0.05], [-60.0, -30.0, 190.0])
OBLIQUE_B = oblique_camera([-0.2, 0.25, -0.1], [-52.0, -48.0, 210.0])


def test_oblique_cm_distance_within_two_percent():
    for seed in range(10):
        spec = random_arena(seed, n_obstacles=1)
        img, truth = render_arena(spec, OBLIQUE_A)
        obs = scene_from_blobs(extract_blobs(label_image(img)))
        got = euclidean_cm(obs.robot.centroid, obs.target.centroid, OBLIQUE_A.ground_map())
        want = math.dist(truth.robot_floor, truth.target_floor)
        assert abs(got - want) <= 0.02 * want


def test_cm_distance_camera_invariant_after_own_calibration():
    spec = random_arena(21, n_obstacles=0)
    dists = []
    for cam in (OBLIQUE_A, OBLIQUE_B):
        # each camera is calibrated from its own board views, then the floor pose is added
        views, _ = calibration_views(cam.intrinsics, 8, noise_px=0.1, seed=2, extra_poses=[cam.pose])
        res = calibrate(views)
        gm = ground_metric_map(res.intrinsics, res.poses[-1])
        img, _ = render_arena(spec, cam)
        obs = scene_from_blobs(extract_blobs(label_image(img)))
        dists.append(euclidean_cm(obs.robot.centroid, obs.target.centroid, gm))
    assert abs(dists[0] - dists[1]) <= 0.01 * max(dists)
