"""Synthetic scenes with known ground truth.

Renders flat coloured disks on the arena floor through the pinhole model,
generates checkerboard corner observations for calibration, and runs the
perceive -> plan -> act loop against a kinematic robot.

Randomness comes from numpy's PCG64 generator (``numpy.random.default_rng``);
per-frame and per-step streams are derived from ``(seed, index)`` so any
single frame or step is reproducible on its own.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from robonav.calibration import (
    CameraIntrinsics,
    ExtrinsicPose,
    GroundMap,
    PlanarCorrespondences,
    ground_metric_map,
    project_points,
    rodrigues,
)
from robonav.imaging import ImageRGB, round_half_away, scale_illumination
from robonav.measurement import build_report, DistanceReport, normalize_angle
from robonav.planner import (
    MotionCommand,
    CommandKind,
    NoAdmissibleWaypoint,
    Obstacle,
    PlannerParams,
    RobotPose,
    plan,
)
from robonav.segmentation import (
    ArenaObservation,
    Blob,
    ClassifierParams,
    ColorClass,
    DetectionError,
    LabelMap,
    DEFAULT_MIN_BLOB_AREA,
    extract_blobs,
    label_image,
    scene_from_blobs,
)

BACKGROUND_COLOR = (190, 190, 190)
ROBOT_COLOR = (40, 210, 40)
TARGET_COLOR = (210, 40, 40)
OBSTACLE_COLOR = (40, 40, 210)
OFF_FLOOR_COLOR = (60, 60, 60)


class RenderError(ValueError):
    pass


class BoardClippedError(RenderError):
    pass


# --- scene description --------------------------------------------------------

@dataclass(frozen=True)
class Disk:
    center: tuple[float, float]
    radius: float
    color: tuple[int, int, int]

    def contains(self, x, y):
        return (x - self.center[0]) ** 2 + (y - self.center[1]) ** 2 <= self.radius**2


@dataclass(frozen=True)
class ArenaSpec:
    width: float = 120.0
    height: float = 90.0
    background: tuple[int, int, int] = BACKGROUND_COLOR
    robot: Disk = Disk((20.0, 45.0), 4.0, ROBOT_COLOR)
    target: Disk = Disk((70.0, 45.0), 7.0, TARGET_COLOR)
    obstacles: tuple[Disk, ...] = ()
    robot_heading: float = 0.0

    def validate(self) -> None:
        disks = [("robot", self.robot), ("target", self.target)] + [
            (f"obstacle {k}", d) for k, d in enumerate(self.obstacles)
        ]
        for name, d in disks:
            x, y = d.center
            if not (d.radius > 0 and d.radius <= x <= self.width - d.radius
                    and d.radius <= y <= self.height - d.radius):
                raise ValueError(f"{name} disk is not inside the {self.width}x{self.height} floor")
        for i in range(len(disks)):
            for j in range(i + 1, len(disks)):
                (na, a), (nb, b) = disks[i], disks[j]
                if math.dist(a.center, b.center) < a.radius + b.radius:
                    raise ValueError(f"{na} and {nb} overlap at spawn")

    def with_robot_at(self, position, heading: float | None = None) -> ArenaSpec:
        robot = replace(self.robot, center=(float(position[0]), float(position[1])))
        return replace(self, robot=robot, robot_heading=self.robot_heading if heading is None else heading)


@dataclass(frozen=True)
class CameraSpec:
    intrinsics: CameraIntrinsics = CameraIntrinsics(800.0, 800.0, 0.0, 320.0, 240.0)
    pose: ExtrinsicPose = field(
        default_factory=lambda: ExtrinsicPose(np.eye(3), (-60.0, -45.0, 200.0))
    )
    width: int = 640
    height: int = 480

    def ground_map(self) -> GroundMap:
        return ground_metric_map(self.intrinsics, self.pose)


def overhead_camera(arena: ArenaSpec, height_cm: float = 200.0, focal: float = 800.0,
                    width: int = 640, height: int = 480) -> CameraSpec:
    """Camera looking straight down (R = I) with the arena centre on the optical axis."""
    K = CameraIntrinsics(focal, focal, 0.0, width / 2.0, height / 2.0)
    t = (-arena.width / 2.0, -arena.height / 2.0, height_cm)
    return CameraSpec(K, ExtrinsicPose(np.eye(3), t), width, height)


@dataclass(frozen=True)
class NoiseConfig:
    color_sigma: float = 0.0
    illumination: float = 1.0
    turn_sigma_deg: float = 0.0
    step_sigma_cm: float = 0.0
    seed: int = 0


@dataclass(frozen=True)
class GroundTruth:
    mask: LabelMap
    robot_floor: tuple[float, float]
    robot_pixel: tuple[float, float]
    target_floor: tuple[float, float]
    target_pixel: tuple[float, float]
    obstacle_floor: tuple[tuple[float, float], ...] = ()
    obstacle_pixel: tuple[tuple[float, float], ...] = ()
    corners: np.ndarray | None = None


def _rng(seed: int, *stream: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), *(int(s) for s in stream)])


# --- arena rendering ----------------------------------------------------------

def floor_coordinates(cam: CameraSpec):
    """Floor (X, Y) hit by each pixel centre's ray, plus a mask of rays hitting it in front."""
    gm = cam.ground_map()
    v, u = np.mgrid[0 : cam.height, 0 : cam.width].astype(np.float64)
    Hi = gm.H_inv
    den = Hi[2, 0] * u + Hi[2, 1] * v + Hi[2, 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        X = (Hi[0, 0] * u + Hi[0, 1] * v + Hi[0, 2]) / den
        Y = (Hi[1, 0] * u + Hi[1, 1] * v + Hi[1, 2]) / den
    R, t = cam.pose.R, cam.pose.t
    depth = R[2, 0] * X + R[2, 1] * Y + t[2]
    in_front = np.isfinite(X) & np.isfinite(Y) & (depth > 0)
    return X, Y, in_front


def render_arena(spec: ArenaSpec, cam: CameraSpec | None = None,
                 noise: NoiseConfig = NoiseConfig(), frame_id: int = 0):
    """Ray-cast every pixel to the floor; returns ``(ImageRGB, GroundTruth)``.

    Painting order is obstacles, target, robot, so the robot occludes the
    target marker it drives onto.
    """
    cam = cam or overhead_camera(spec)
    X, Y, in_front = floor_coordinates(cam)
    on_floor = in_front & (X >= 0) & (X <= spec.width) & (Y >= 0) & (Y <= spec.height)
    if not on_floor.any():
        raise RenderError("camera is not viewing the floor region")

    rgb = np.empty((cam.height, cam.width, 3), dtype=np.uint8)
    rgb[...] = OFF_FLOOR_COLOR
    rgb[on_floor] = spec.background
    mask = np.zeros((cam.height, cam.width), dtype=np.uint8)
    layers = [(d, ColorClass.OBSTACLE_BLUE) for d in spec.obstacles]
    layers += [(spec.target, ColorClass.TARGET_RED), (spec.robot, ColorClass.ROBOT_GREEN)]
    for disk, cls in layers:
        hit = on_floor & disk.contains(X, Y)
        rgb[hit] = disk.color
        mask[hit] = cls

    if noise.color_sigma > 0:
        rng = _rng(noise.seed, frame_id)
        noisy = rgb.astype(np.float64) + rng.normal(0.0, noise.color_sigma, rgb.shape)
        rgb = np.clip(round_half_away(noisy), 0, 255).astype(np.uint8)
    img = ImageRGB(cam.width, cam.height, rgb)
    if noise.illumination != 1.0:
        img = scale_illumination(img, noise.illumination)

    def px(center):
        return tuple(float(c) for c in project_points(cam.intrinsics, cam.pose, [center])[0])

    truth = GroundTruth(
        mask=LabelMap(cam.width, cam.height, mask),
        robot_floor=spec.robot.center,
        robot_pixel=px(spec.robot.center),
        target_floor=spec.target.center,
        target_pixel=px(spec.target.center),
        obstacle_floor=tuple(d.center for d in spec.obstacles),
        obstacle_pixel=tuple(px(d.center) for d in spec.obstacles),
    )
    return img, truth


def random_arena(seed: int, n_obstacles: int = 2, width: float = 120.0, height: float = 90.0,
                 robot_radius: float = 4.0, target_radius: float = 7.0,
                 obstacle_radius=(4.0, 8.0), gap: float = 2.0) -> ArenaSpec:
    """Non-overlapping random disks (rejection sampling, seeded)."""
    rng = _rng(seed, 0xA7E)
    radii = [robot_radius, target_radius] + [
        float(rng.uniform(*obstacle_radius)) for _ in range(n_obstacles)
    ]
    centers: list[tuple[float, float]] = []
    for r in radii:
        for _ in range(10_000):
            c = (float(rng.uniform(r, width - r)), float(rng.uniform(r, height - r)))
            if all(math.dist(c, o) >= r + ro + gap for o, ro in zip(centers, radii)):
                centers.append(c)
                break
        else:
            raise RuntimeError("could not place disks without overlap")
    return ArenaSpec(
        width,
        height,
        robot=Disk(centers[0], radii[0], ROBOT_COLOR),
        target=Disk(centers[1], radii[1], TARGET_COLOR),
        obstacles=tuple(Disk(c, r, OBSTACLE_COLOR) for c, r in zip(centers[2:], radii[2:])),
    )


# --- checkerboard views ---------------------------------------------------------

@dataclass(frozen=True)
class BoardSpec:
    squares_x: int = 14
    squares_y: int = 13
    square_size: float = 3.0  # cm

    def inner_corners(self) -> np.ndarray:
        """(X, Y) of the inner-corner grid, row by row; origin at the first inner corner."""
        nx, ny = self.squares_x - 1, self.squares_y - 1
        jj, ii = np.mgrid[0:ny, 0:nx]
        return np.column_stack([ii.ravel(), jj.ravel()]).astype(np.float64) * self.square_size

    @property
    def extent(self) -> tuple[float, float]:
        return (self.squares_x - 2) * self.square_size, (self.squares_y - 2) * self.square_size


def render_checkerboard_corners(cam: CameraSpec, board: BoardSpec = BoardSpec(),
                                noise_px: float = 0.0, seed: int = 0,
                                view_id: int = 0) -> PlanarCorrespondences:
    model = board.inner_corners()
    cam_pts = model @ cam.pose.R[:, :2].T + cam.pose.t
    if np.any(cam_pts[:, 2] <= 0):
        raise BoardClippedError(f"view {view_id}: board clipped (behind camera)")
    uv = project_points(cam.intrinsics, cam.pose, model)
    if (uv[:, 0].min() < 0 or uv[:, 1].min() < 0
            or uv[:, 0].max() > cam.width - 1 or uv[:, 1].max() > cam.height - 1):
        raise BoardClippedError(f"view {view_id}: board clipped (corner outside the image)")
    if noise_px > 0:
        uv = uv + _rng(seed, view_id, 0xC0).normal(0.0, noise_px, uv.shape)
    return PlanarCorrespondences(view_id, np.column_stack([model, uv]))


def sample_board_poses(n_views: int, intrinsics: CameraIntrinsics, width: int = 640,
                       height: int = 480, board: BoardSpec = BoardSpec(), seed: int = 0,
                       tilt_deg=(20.0, 50.0), fill=(0.45, 0.7)) -> list[ExtrinsicPose]:
    """Random board poses that keep the whole board inside the image.

    Tilt axes lie mostly in the board plane; distance is chosen so the board
    spans ``fill`` of the image width.
    """
    rng = _rng(seed, 0xB0A)
    ex, ey = board.extent
    center = np.array([ex / 2.0, ey / 2.0, 0.0])
    diag = math.hypot(ex, ey)
    poses = []
    attempts = 0
    while len(poses) < n_views:
        attempts += 1
        if attempts > 1000 * n_views:
            raise RuntimeError("pose sampler failed to keep the board in frame")
        axis = rng.normal(size=3)
        axis[2] *= 0.3
        axis /= np.linalg.norm(axis)
        R = rodrigues(axis * math.radians(rng.uniform(*tilt_deg)))
        dist = intrinsics.fx * diag / (rng.uniform(*fill) * width)
        lateral = rng.normal(size=2) * 0.05 * dist
        t = np.array([lateral[0], lateral[1], dist]) - R @ center
        pose = ExtrinsicPose(R, t)
        try:
            render_checkerboard_corners(CameraSpec(intrinsics, pose, width, height), board)
        except BoardClippedError:
            continue
        poses.append(pose)
    return poses


def calibration_views(intrinsics: CameraIntrinsics, n_views: int = 20, noise_px: float = 0.0,
                      seed: int = 0, width: int = 640, height: int = 480,
                      board: BoardSpec = BoardSpec(), extra_poses: Sequence[ExtrinsicPose] = ()):
    """Corner observations for sampled poses (plus ``extra_poses`` appended); returns (views, poses)."""
    poses = sample_board_poses(n_views, intrinsics, width, height, board, seed) + list(extra_poses)
    views = [
        render_checkerboard_corners(CameraSpec(intrinsics, p, width, height), board, noise_px, seed, vid)
        for vid, p in enumerate(poses)
    ]
    return views, poses


# --- closed loop ------------------------------------------------------------------

@dataclass(frozen=True)
class WorldState:
    arena: ArenaSpec
    position: tuple[float, float]
    heading: float
    step: int = 0
    collided: bool = False

    @classmethod
    def initial(cls, arena: ArenaSpec) -> WorldState:
        return cls(arena, arena.robot.center, arena.robot_heading)

    def scene(self) -> ArenaSpec:
        return self.arena.with_robot_at(self.position, self.heading)


def _segment_distance(a, b, c) -> float:
    """Distance from ``c`` to the closed segment ``ab`` (the robot's swept centre line)."""
    dx, dy = b[0] - a[0], b[1] - a[1]
    L2 = dx * dx + dy * dy
    t = 0.0 if L2 == 0 else min(max(((c[0] - a[0]) * dx + (c[1] - a[1]) * dy) / L2, 0.0), 1.0)
    return math.hypot(c[0] - a[0] - t * dx, c[1] - a[1] - t * dy)


def step_simulation(state: WorldState, cmd: MotionCommand, noise: NoiseConfig = NoiseConfig()) -> WorldState:
    """Exact kinematics plus optional seeded actuation noise; collisions are flagged, not fatal."""
    if cmd.kind is CommandKind.STOP:
        return state
    rng = _rng(noise.seed, state.step, 0x5E)
    heading, (x, y) = state.heading, state.position
    if cmd.kind is CommandKind.TURN:
        jitter = rng.normal(0.0, noise.turn_sigma_deg) if noise.turn_sigma_deg > 0 else 0.0
        heading = normalize_angle(heading + cmd.value + jitter)
    else:
        jitter = rng.normal(0.0, noise.step_sigma_cm) if noise.step_sigma_cm > 0 else 0.0
        d = cmd.value + jitter
        rad = math.radians(heading)
        r = state.arena.robot.radius
        x = min(max(x + d * math.cos(rad), r), state.arena.width - r)
        y = min(max(y + d * math.sin(rad), r), state.arena.height - r)
    rr = state.arena.robot.radius
    start = state.position
    hit = any(_segment_distance(start, (x, y), o.center) < rr + o.radius for o in state.arena.obstacles)
    return WorldState(state.arena, (x, y), heading, state.step + 1, state.collided or hit)


@dataclass(frozen=True)
class StepRecord:
    frame_id: int
    true_position: tuple[float, float]
    true_heading: float
    report: DistanceReport
    perceived_position: tuple[float, float]
    waypoint: tuple[float, float] | None
    command: MotionCommand | None
    collided: bool


@dataclass
class TrajectoryLog:
    steps: list[StepRecord] = field(default_factory=list)
    status: str = "running"  # goal | max_steps | no_waypoint | detection_failure
    message: str = ""
    collided: bool = False
    final_state: WorldState | None = None
    last_frame: ImageRGB | None = None
    last_labels: LabelMap | None = None
    last_blobs: tuple[Blob, ...] = ()

    @property
    def n_commands(self) -> int:
        return sum(1 for s in self.steps if s.command is not None)


def perceived_obstacles(obs: ArenaObservation, gm: GroundMap) -> list[Obstacle]:
    """Obstacle disks on the floor: centroid mapped through the ground map, radius from area."""
    out = []
    for blob in obs.obstacles:
        u, v = blob.centroid
        c, edge = gm.to_floor(np.array([[u, v], [u + blob.radius, v]]))
        out.append(Obstacle((float(c[0]), float(c[1])), float(math.dist(c, edge))))
    return out


def run_closed_loop(arena: ArenaSpec, camera: CameraSpec | None = None,
                    params: PlannerParams = PlannerParams(),
                    noise: NoiseConfig = NoiseConfig(), max_steps: int = 100,
                    classifier: ClassifierParams = ClassifierParams(),
                    min_blob_area: int = DEFAULT_MIN_BLOB_AREA,
                    ground_map: GroundMap | None = None) -> TrajectoryLog:
    """Render -> segment -> measure -> plan -> act until STOP or ``max_steps`` commands.

    The planner sees perceived positions; heading comes from the simulator.
    ``ground_map`` defaults to the camera's exact floor mapping.
    """
    arena.validate()
    camera = camera or overhead_camera(arena)
    gm = ground_map or camera.ground_map()
    state = WorldState.initial(arena)
    log = TrajectoryLog()
    for frame_id in range(max_steps):
        img, _ = render_arena(state.scene(), camera, noise, frame_id)
        labels = label_image(img, classifier)
        blobs = extract_blobs(labels, min_blob_area)
        log.last_frame, log.last_labels, log.last_blobs = img, labels, tuple(blobs)
        try:
            obs = scene_from_blobs(blobs, frame_id)
        except DetectionError as exc:
            log.status, log.message = "detection_failure", str(exc)
            break
        report = build_report(obs, gm)
        robot_xy = tuple(float(c) for c in gm.to_floor(obs.robot.centroid))
        goal_xy = tuple(float(c) for c in gm.to_floor(obs.target.centroid))
        pose = RobotPose(robot_xy, state.heading)
        try:
            waypoint, cmd = plan(pose, goal_xy, perceived_obstacles(obs, gm), params)
        except NoAdmissibleWaypoint as exc:
            log.steps.append(StepRecord(frame_id, state.position, state.heading, report,
                                        robot_xy, None, None, state.collided))
            log.status, log.message = "no_waypoint", str(exc)
            break
        log.steps.append(StepRecord(frame_id, state.position, state.heading, report,
                                    robot_xy, waypoint, cmd, state.collided))
        if cmd.kind is CommandKind.STOP:
            log.status = "goal"
            break
        state = step_simulation(state, cmd, noise)
    else:
        log.status = "max_steps"
    log.final_state = state
    log.collided = state.collided
    return log
