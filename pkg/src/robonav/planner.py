"""Reactive single-detour planner emitting TURN / FORWARD / STOP commands.

Positions are floor coordinates (cm). Headings and bearings follow the image
axes convention used throughout: 0 deg along +X, +90 deg along +Y.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from robonav.measurement import normalize_angle

DETOUR_FACTOR = 1.2
GROWTH_STEP = 0.2
MAX_GROWTH_STEPS = 5
_TIE_RTOL = 1e-12


class NoAdmissibleWaypoint(RuntimeError):
    pass


class CommandKind(str, Enum):
    TURN = "TURN"
    FORWARD = "FORWARD"
    STOP = "STOP"


@dataclass(frozen=True)
class MotionCommand:
    kind: CommandKind
    value: float | None = None

    def __post_init__(self):
        if self.kind is CommandKind.FORWARD and not (self.value is not None and self.value > 0):
            raise ValueError(f"FORWARD needs a positive distance, got {self.value}")
        if self.kind is CommandKind.TURN:
            if self.value is None or not -180.0 < self.value <= 180.0:
                raise ValueError(f"TURN angle must be in (-180, 180], got {self.value}")
        if self.kind is CommandKind.STOP and self.value is not None:
            raise ValueError("STOP takes no value")

    @classmethod
    def turn(cls, deg: float) -> MotionCommand:
        return cls(CommandKind.TURN, normalize_angle(deg))

    @classmethod
    def forward(cls, cm: float) -> MotionCommand:
        return cls(CommandKind.FORWARD, cm)

    @classmethod
    def stop(cls) -> MotionCommand:
        return cls(CommandKind.STOP)

    def format(self) -> str:
        if self.kind is CommandKind.STOP:
            return "STOP"
        return f"{self.kind.value} {self.value:.3f}"


@dataclass(frozen=True)
class RobotPose:
    position: tuple[float, float]
    heading: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "heading", normalize_angle(self.heading))
        object.__setattr__(self, "position", (float(self.position[0]), float(self.position[1])))


@dataclass(frozen=True)
class PlannerParams:
    clearance: float = 8.0
    goal_tolerance: float = 3.0
    max_step: float = 10.0
    turn_deadband: float = 5.0

    def __post_init__(self):
        for name in ("clearance", "goal_tolerance", "max_step", "turn_deadband"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.goal_tolerance >= self.clearance:
            warnings.warn("goal_tolerance >= clearance; the robot may stop inside an obstacle margin")


@dataclass(frozen=True)
class Obstacle:
    center: tuple[float, float]
    radius: float


def _closest_approach(robot, goal, center) -> tuple[float, float]:
    """Return (t, distance) of the segment point nearest ``center``; t unclamped."""
    dx, dy = goal[0] - robot[0], goal[1] - robot[1]
    L2 = dx * dx + dy * dy
    t = ((center[0] - robot[0]) * dx + (center[1] - robot[1]) * dy) / L2
    tc = min(max(t, 0.0), 1.0)
    px, py = robot[0] + tc * dx, robot[1] + tc * dy
    return t, math.hypot(center[0] - px, center[1] - py)


def path_blocked(robot, goal, center, radius: float, clearance: float) -> bool:
    if robot[0] == goal[0] and robot[1] == goal[1]:
        raise ValueError("robot and goal coincide")
    t, dist = _closest_approach(robot, goal, center)
    return 0.0 < t < 1.0 and dist < radius + clearance


def _inside_any(point, obstacles: Sequence[Obstacle], clearance: float) -> bool:
    return any(
        math.hypot(point[0] - o.center[0], point[1] - o.center[1]) < o.radius + clearance
        for o in obstacles
    )


def choose_waypoint(robot, goal, obstacles: Sequence[Obstacle], params: PlannerParams):
    if robot[0] == goal[0] and robot[1] == goal[1]:
        raise ValueError("robot and goal coincide")
    blocking = []
    for o in obstacles:
        if path_blocked(robot, goal, o.center, o.radius, params.clearance):
            t, _ = _closest_approach(robot, goal, o.center)
            blocking.append((t, o))
    if not blocking:
        return (float(goal[0]), float(goal[1]))
    _, obs = min(blocking, key=lambda item: item[0])

    dx, dy = goal[0] - robot[0], goal[1] - robot[1]
    L = math.hypot(dx, dy)
    left = (-dy / L, dx / L)
    right = (dy / L, -dx / L)
    base = (obs.radius + params.clearance) * DETOUR_FACTOR

    def candidate(n, offset):
        return (obs.center[0] + n[0] * offset, obs.center[1] + n[1] * offset)

    def detour_length(p):
        return math.hypot(p[0] - robot[0], p[1] - robot[1]) + math.hypot(goal[0] - p[0], goal[1] - p[1])

    len_left = detour_length(candidate(left, base))
    len_right = detour_length(candidate(right, base))
    if abs(len_left - len_right) <= _TIE_RTOL * max(len_left, len_right):
        sides = (left, right)
    else:
        sides = (left, right) if len_left < len_right else (right, left)

    for n in sides:
        for k in range(MAX_GROWTH_STEPS + 1):
            p = candidate(n, base * (1.0 + GROWTH_STEP * k))
            if not _inside_any(p, obstacles, params.clearance):
                return p
    raise NoAdmissibleWaypoint("no admissible waypoint: every detour lies inside an obstacle margin")


def next_command(pose: RobotPose, waypoint, goal, params: PlannerParams) -> MotionCommand:
    x, y = pose.position
    if math.hypot(goal[0] - x, goal[1] - y) <= params.goal_tolerance:
        return MotionCommand.stop()
    dist = math.hypot(waypoint[0] - x, waypoint[1] - y)
    if dist == 0.0:
        return MotionCommand.stop()
    bearing = math.degrees(math.atan2(waypoint[1] - y, waypoint[0] - x))
    delta = normalize_angle(bearing - pose.heading)
    if abs(delta) > params.turn_deadband:
        return MotionCommand.turn(delta)
    return MotionCommand.forward(min(params.max_step, dist))


MAX_NESTED_DETOURS = 3


def plan(pose: RobotPose, goal, obstacles: Sequence[Obstacle], params: PlannerParams):
    """One decision: (waypoint, command). Raises NoAdmissibleWaypoint when boxed in.

    When the leg towards the detour point is itself blocked by another
    obstacle, the detour rule is re-applied to that leg (at most
    ``MAX_NESTED_DETOURS`` times) instead of driving through it.
    """
    x, y = pose.position
    if math.hypot(goal[0] - x, goal[1] - y) <= params.goal_tolerance:
        return (float(goal[0]), float(goal[1])), MotionCommand.stop()
    waypoint = choose_waypoint(pose.position, goal, obstacles, params)
    for _ in range(MAX_NESTED_DETOURS):
        if waypoint == pose.position:
            break
        inner = choose_waypoint(pose.position, waypoint, obstacles, params)
        if inner == waypoint:
            break
        waypoint = inner
    return waypoint, next_command(pose, waypoint, goal, params)
