"""Key-value simulation config with ``[arena] [camera] [noise] [planner]`` sections.

Colours are three integers, disks are ``x y radius`` (cm), several obstacles
are separated by ``;``. The camera rotation is either ``R`` (9 numbers,
row-major) or ``rvec`` (axis-angle). Unknown sections or keys are rejected.
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, replace

import numpy as np

from robonav.calibration import CameraIntrinsics, ExtrinsicPose, rodrigues
from robonav.planner import PlannerParams
from robonav.segmentation import ClassifierParams, DEFAULT_MIN_BLOB_AREA
from robonav.synthcam import (
    ArenaSpec,
    CameraSpec,
    Disk,
    NoiseConfig,
    OBSTACLE_COLOR,
    ROBOT_COLOR,
    TARGET_COLOR,
    overhead_camera,
)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    arena: ArenaSpec = ArenaSpec()
    camera: CameraSpec = field(default_factory=lambda: overhead_camera(ArenaSpec()))
    noise: NoiseConfig = NoiseConfig()
    planner: PlannerParams = PlannerParams()
    classifier: ClassifierParams = ClassifierParams()
    min_blob_area: int = DEFAULT_MIN_BLOB_AREA
    max_steps: int = 100


_KEYS = {
    "arena": {"width", "height", "background", "robot", "robot_color", "robot_heading",
              "target", "target_color", "obstacles", "obstacle_color"},
    "camera": {"fx", "fy", "skew", "cx", "cy", "width", "height", "rvec", "R", "t"},
    "noise": {"color_sigma", "illumination", "turn_sigma_deg", "step_sigma_cm", "seed"},
    "planner": {"clearance", "goal_tolerance", "max_step", "turn_deadband", "max_steps",
                "margin", "min_value", "min_blob_area"},
}


def _num(x: float) -> str:
    return repr(float(x))


def _floats(text: str, n: int | None, key: str) -> list[float]:
    try:
        vals = [float(p) for p in text.split()]
    except ValueError:
        raise ConfigError(f"{key}: expected numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise ConfigError(f"{key}: expected {n} numbers, got {len(vals)}")
    if not all(math.isfinite(v) for v in vals):
        raise ConfigError(f"{key}: non-finite value")
    return vals


def _color(text: str, key: str) -> tuple[int, int, int]:
    vals = _floats(text, 3, key)
    if not all(v.is_integer() and 0 <= v <= 255 for v in vals):
        raise ConfigError(f"{key}: colour channels must be integers in [0, 255]")
    return tuple(int(v) for v in vals)


def _int(text: str, key: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {text!r}") from None


def read_config(text: str) -> SimConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    for section in parser.sections():
        if section not in _KEYS:
            raise ConfigError(f"unknown section [{section}]")
        unknown = set(parser[section]) - _KEYS[section]
        if unknown:
            raise ConfigError(f"unknown key(s) in [{section}]: {', '.join(sorted(unknown))}")

    def get(section, key):
        return parser[section][key] if parser.has_option(section, key) else None

    base = ArenaSpec()
    a = {}
    if (v := get("arena", "width")) is not None:
        a["width"] = _floats(v, 1, "width")[0]
    if (v := get("arena", "height")) is not None:
        a["height"] = _floats(v, 1, "height")[0]
    if (v := get("arena", "background")) is not None:
        a["background"] = _color(v, "background")
    if (v := get("arena", "robot_heading")) is not None:
        a["robot_heading"] = _floats(v, 1, "robot_heading")[0]
    robot_color = _color(v, "robot_color") if (v := get("arena", "robot_color")) else ROBOT_COLOR
    target_color = _color(v, "target_color") if (v := get("arena", "target_color")) else TARGET_COLOR
    obstacle_color = _color(v, "obstacle_color") if (v := get("arena", "obstacle_color")) else OBSTACLE_COLOR
    robot = base.robot
    if (v := get("arena", "robot")) is not None:
        x, y, r = _floats(v, 3, "robot")
        robot = Disk((x, y), r, robot_color)
    a["robot"] = replace(robot, color=robot_color)
    target = base.target
    if (v := get("arena", "target")) is not None:
        x, y, r = _floats(v, 3, "target")
        target = Disk((x, y), r, target_color)
    a["target"] = replace(target, color=target_color)
    obstacles = []
    if (v := get("arena", "obstacles")) is not None:
        for part in v.split(";"):
            if part.strip():
                x, y, r = _floats(part, 3, "obstacles")
                obstacles.append(Disk((x, y), r, obstacle_color))
    a["obstacles"] = tuple(obstacles)
    arena = replace(base, **a)
    try:
        arena.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    cam = overhead_camera(arena)
    if parser.has_section("camera"):
        k = cam.intrinsics
        kv = {name: _floats(get("camera", name), 1, name)[0] if get("camera", name) else getattr(k, name)
              for name in ("fx", "fy", "skew", "cx", "cy")}
        width = _int(v, "width") if (v := get("camera", "width")) else cam.width
        height = _int(v, "height") if (v := get("camera", "height")) else cam.height
        if get("camera", "rvec") and get("camera", "R"):
            raise ConfigError("camera: give either rvec or R, not both")
        if (v := get("camera", "R")) is not None:
            R = np.reshape(_floats(v, 9, "R"), (3, 3))
        elif (v := get("camera", "rvec")) is not None:
            R = rodrigues(_floats(v, 3, "rvec"))
        else:
            R = cam.pose.R
        t = _floats(v, 3, "t") if (v := get("camera", "t")) else cam.pose.t
        try:
            pose = ExtrinsicPose(R, t)
            if not pose.is_rotation(1e-9):
                raise ValueError("camera R is not a rotation matrix")
            cam = CameraSpec(CameraIntrinsics(**kv), pose, width, height)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    nz = {}
    for key in ("color_sigma", "illumination", "turn_sigma_deg", "step_sigma_cm"):
        if (v := get("noise", key)) is not None:
            nz[key] = _floats(v, 1, key)[0]
    if (v := get("noise", "seed")) is not None:
        nz["seed"] = _int(v, "seed")
    noise = NoiseConfig(**nz)
    if noise.illumination <= 0 or noise.color_sigma < 0:
        raise ConfigError("illumination must be positive and color_sigma non-negative")

    pp = {}
    for key in ("clearance", "goal_tolerance", "max_step", "turn_deadband"):
        if (v := get("planner", key)) is not None:
            pp[key] = _floats(v, 1, key)[0]
    try:
        planner = PlannerParams(**pp)
        classifier = ClassifierParams(
            _int(get("planner", "margin"), "margin") if get("planner", "margin") else ClassifierParams().dominance_margin,
            _int(get("planner", "min_value"), "min_value") if get("planner", "min_value") else ClassifierParams().min_value,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    min_blob_area = _int(v, "min_blob_area") if (v := get("planner", "min_blob_area")) else DEFAULT_MIN_BLOB_AREA
    max_steps = _int(v, "max_steps") if (v := get("planner", "max_steps")) else 100
    return SimConfig(arena, cam, noise, planner, classifier, min_blob_area, max_steps)


def write_config(cfg: SimConfig) -> str:
    a, c, n, p = cfg.arena, cfg.camera, cfg.noise, cfg.planner

    def disk(d: Disk) -> str:
        return f"{_num(d.center[0])} {_num(d.center[1])} {_num(d.radius)}"

    def color(rgb) -> str:
        return " ".join(str(int(x)) for x in rgb)

    obstacle_color = a.obstacles[0].color if a.obstacles else OBSTACLE_COLOR
    k = c.intrinsics
    lines = [
        "[arena]",
        f"width = {_num(a.width)}",
        f"height = {_num(a.height)}",
        f"background = {color(a.background)}",
        f"robot = {disk(a.robot)}",
        f"robot_color = {color(a.robot.color)}",
        f"robot_heading = {_num(a.robot_heading)}",
        f"target = {disk(a.target)}",
        f"target_color = {color(a.target.color)}",
        f"obstacles = {'; '.join(disk(d) for d in a.obstacles)}",
        f"obstacle_color = {color(obstacle_color)}",
        "",
        "[camera]",
        f"fx = {_num(k.fx)}",
        f"fy = {_num(k.fy)}",
        f"skew = {_num(k.skew)}",
        f"cx = {_num(k.cx)}",
        f"cy = {_num(k.cy)}",
        f"width = {c.width}",
        f"height = {c.height}",
        f"R = {' '.join(_num(x) for x in c.pose.R.ravel())}",
        f"t = {' '.join(_num(x) for x in c.pose.t)}",
        "",
        "[noise]",
        f"color_sigma = {_num(n.color_sigma)}",
        f"illumination = {_num(n.illumination)}",
        f"turn_sigma_deg = {_num(n.turn_sigma_deg)}",
        f"step_sigma_cm = {_num(n.step_sigma_cm)}",
        f"seed = {n.seed}",
        "",
        "[planner]",
        f"clearance = {_num(p.clearance)}",
        f"goal_tolerance = {_num(p.goal_tolerance)}",
        f"max_step = {_num(p.max_step)}",
        f"turn_deadband = {_num(p.turn_deadband)}",
        f"max_steps = {cfg.max_steps}",
        f"margin = {cfg.classifier.dominance_margin}",
        f"min_value = {cfg.classifier.min_value}",
        f"min_blob_area = {cfg.min_blob_area}",
    ]
    return "\n".join(lines) + "\n"
