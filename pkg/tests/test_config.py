import numpy as np
import pytest

from robonav.calibration import ExtrinsicPose, rodrigues
from robonav.config import ConfigError, SimConfig, read_config, write_config
from robonav.synthcam import CameraSpec, NoiseConfig, random_arena
from robonav.calibration import CameraIntrinsics


def test_defaults_fixpoint():
    text = write_config(SimConfig())
    assert write_config(read_config(text)) == text


def test_random_configs_fixpoint(rng):
    for seed in range(10):
        arena = random_arena(seed, n_obstacles=int(rng.integers(0, 4)))
        cam = CameraSpec(CameraIntrinsics(*rng.uniform(300, 900, 2), 0.25, 320, 240),
                         ExtrinsicPose(rodrigues(rng.normal(0, 0.1, 3)), [-60.0, -45.0, 210.0]))
        cfg = SimConfig(arena, cam, NoiseConfig(rng.uniform(0, 10), 0.9, 1.0, 0.2, seed))
        text = write_config(cfg)
        back = read_config(text)
        assert write_config(back) == text
        assert back.arena == arena and back.noise == cfg.noise


def test_empty_config_is_default():
    assert read_config("") == read_config(write_config(SimConfig()))


def test_rvec_camera_and_comments():
    cfg = read_config("[camera]\nrvec = 0 0 0.1   # small yaw\nt = -60 -45 200\n")
    assert np.allclose(cfg.camera.pose.R, rodrigues([0, 0, 0.1]))


@pytest.mark.parametrize(
    "text, needle",
    [
        ("[arena]\ncolour = 1 2 3\n", "unknown key"),
        ("[lighting]\nx = 1\n", "unknown section"),
        ("[arena]\nrobot = 1 2\n", "expected 3"),
        ("[arena]\nrobot_color = 300 0 0\n", "[0, 255]"),
        ("[arena]\nobstacles = 22 45 3\n", "overlap"),
        ("[camera]\nR = 1 0 0 0 1 0 0 0 2\n", "rotation"),
        ("[camera]\nR = 1 0 0 0 1 0 0 0 1\nrvec = 0 0 0\n", "either"),
        ("[noise]\nseed = 1.5\n", "integer"),
        ("[noise]\nillumination = 0\n", "illumination"),
        ("[planner]\nclearance = -1\n", "positive"),
        ("no section header\n", "section"),
    ],
)
def test_rejects_bad_input(text, needle):
    with pytest.raises(ConfigError) as exc:
        read_config(text)
    assert needle in str(exc.value)
