"""Relative positions of scene objects in pixels and, given a ground map, centimetres.

Bearings use image axes (u right, v down), so +90 degrees points down the image.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from robonav.calibration import GroundMap
from robonav.segmentation import ArenaObservation


def euclidean_px(a, b) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def euclidean_cm(a, b, ground_map: GroundMap) -> float:
    return ground_map.distance_cm(a, b)


def bearing_deg(frm, to) -> float:
    """Angle of the vector frm->to in image axes, in (-180, 180]."""
    ang = math.degrees(math.atan2(to[1] - frm[1], to[0] - frm[0]))
    return normalize_angle(ang)


def normalize_angle(deg: float) -> float:
    a = math.fmod(deg, 360.0)
    if a <= -180.0:
        a += 360.0
    elif a > 180.0:
        a -= 360.0
    return a


@dataclass(frozen=True)
class ObstacleDistance:
    index: int
    centroid: tuple[float, float]
    radius_px: float
    distance_px: float
    bearing_deg: float
    distance_cm: float | None = None


@dataclass(frozen=True)
class DistanceReport:
    frame_id: int
    robot: tuple[float, float]
    target: tuple[float, float]
    robot_to_target_px: float
    obstacles: tuple[ObstacleDistance, ...] = ()
    robot_to_target_cm: float | None = None

    @property
    def metric(self) -> bool:
        return self.robot_to_target_cm is not None


def build_report(obs: ArenaObservation, ground_map: GroundMap | None = None) -> DistanceReport:
    robot = obs.robot.centroid
    target = obs.target.centroid
    obstacles = []
    for k, blob in enumerate(obs.obstacles):
        c = blob.centroid
        obstacles.append(
            ObstacleDistance(
                index=k,
                centroid=c,
                radius_px=blob.radius,
                distance_px=euclidean_px(robot, c),
                bearing_deg=bearing_deg(robot, c),
                distance_cm=euclidean_cm(robot, c, ground_map) if ground_map else None,
            )
        )
    return DistanceReport(
        frame_id=obs.frame_id,
        robot=robot,
        target=target,
        robot_to_target_px=euclidean_px(robot, target),
        obstacles=tuple(obstacles),
        robot_to_target_cm=euclidean_cm(robot, target, ground_map) if ground_map else None,
    )
