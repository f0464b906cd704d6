"""Scene segmentation: per-pixel RGB role classification and blob extraction."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from robonav import kernels
from robonav.imaging import ImageRGB


class ColorClass(IntEnum):
    BACKGROUND = 0
    ROBOT_GREEN = 1
    TARGET_RED = 2
    OBSTACLE_BLUE = 3


PALETTE = {
    ColorClass.BACKGROUND: (0, 0, 0),
    ColorClass.ROBOT_GREEN: (0, 255, 0),
    ColorClass.TARGET_RED: (255, 0, 0),
    ColorClass.OBSTACLE_BLUE: (0, 0, 255),
}
CROSSHAIR = (255, 255, 255)

DEFAULT_MARGIN = 40
DEFAULT_MIN_VALUE = 60
DEFAULT_MIN_BLOB_AREA = 20


class DetectionError(RuntimeError):
    """A required scene object (robot or target) was not found."""

    def __init__(self, what: str):
        super().__init__(f"{what} not detected")
        self.what = what


@dataclass(frozen=True)
class ClassifierParams:
    dominance_margin: int = DEFAULT_MARGIN
    min_value: int = DEFAULT_MIN_VALUE

    def __post_init__(self):
        for name in ("dominance_margin", "min_value"):
            val = getattr(self, name)
            if not 0 <= val <= 255:
                raise ValueError(f"{name} must be in [0, 255], got {val}")


@dataclass(frozen=True, eq=False)
class LabelMap:
    width: int
    height: int
    labels: np.ndarray  # (height, width) uint8 ColorClass codes

    def __post_init__(self):
        arr = np.ascontiguousarray(self.labels, dtype=np.uint8)
        if arr.shape != (self.height, self.width):
            raise ValueError(f"label array shape {arr.shape} != {(self.height, self.width)}")
        arr.setflags(write=False)
        object.__setattr__(self, "labels", arr)

    def __getitem__(self, uv) -> ColorClass:
        u, v = uv
        return ColorClass(int(self.labels[v, u]))

    def __eq__(self, other):
        if not isinstance(other, LabelMap):
            return NotImplemented
        return np.array_equal(self.labels, other.labels)

    def counts(self) -> dict[ColorClass, int]:
        bins = np.bincount(self.labels.ravel(), minlength=4)
        return {c: int(bins[c]) for c in ColorClass}


@dataclass(frozen=True)
class Blob:
    color: ColorClass
    pixel_count: int
    centroid: tuple[float, float]
    bbox: tuple[int, int, int, int]  # u_min, v_min, u_max, v_max

    @property
    def radius(self) -> float:
        """Radius of the disk with the same pixel area."""
        return math.sqrt(self.pixel_count / math.pi)


def classify_pixel(rgb, params: ClassifierParams = ClassifierParams()) -> ColorClass:
    r, g, b = (int(c) for c in rgb)
    m, lo = params.dominance_margin, params.min_value
    if r >= lo and r >= g + m and r >= b + m:
        return ColorClass.TARGET_RED
    if g >= lo and g >= r + m and g >= b + m:
        return ColorClass.ROBOT_GREEN
    if b >= lo and b >= r + m and b >= g + m:
        return ColorClass.OBSTACLE_BLUE
    return ColorClass.BACKGROUND


def label_image(img: ImageRGB, params: ClassifierParams = ClassifierParams()) -> LabelMap:
    labels = kernels.classify_image(img.pixels, params.dominance_margin, params.min_value)
    return LabelMap(img.width, img.height, labels)


def blobs_from_stats(stats: np.ndarray, min_blob_area: int) -> list[Blob]:
    blobs = []
    for cls, count, su, sv, umin, vmin, umax, vmax in stats.tolist():
        if count < min_blob_area:
            continue
        blobs.append(
            Blob(
                color=ColorClass(cls),
                pixel_count=count,
                centroid=(su / count, sv / count),
                bbox=(umin, vmin, umax, vmax),
            )
        )
    blobs.sort(key=lambda b: (b.color, -b.pixel_count, b.bbox[0], b.bbox[1]))
    return blobs


def extract_blobs(labels: LabelMap, min_blob_area: int = DEFAULT_MIN_BLOB_AREA) -> list[Blob]:
    """4-connected components per role class, ordered by (color, -size, u_min, v_min)."""
    return blobs_from_stats(kernels.component_stats(labels.labels), min_blob_area)


@dataclass(frozen=True)
class ArenaObservation:
    robot: Blob
    target: Blob
    obstacles: tuple[Blob, ...] = ()
    frame_id: int = 0


def _largest(blobs: list[Blob]) -> Blob | None:
    if not blobs:
        return None
    return min(blobs, key=lambda b: (-b.pixel_count, b.bbox[0]))


def scene_from_blobs(blobs, frame_id: int = 0) -> ArenaObservation:
    robot = _largest([b for b in blobs if b.color == ColorClass.ROBOT_GREEN])
    if robot is None:
        raise DetectionError("robot")
    target = _largest([b for b in blobs if b.color == ColorClass.TARGET_RED])
    if target is None:
        raise DetectionError("target")
    obstacles = tuple(b for b in blobs if b.color == ColorClass.OBSTACLE_BLUE)
    return ArenaObservation(robot, target, obstacles, frame_id)


def render_labels(labels: LabelMap, blobs=()) -> ImageRGB:
    """Palette rendering of a label map with a 5-px white crosshair on each blob centroid."""
    lut = np.array([PALETTE[c] for c in ColorClass], dtype=np.uint8)
    out = lut[labels.labels].copy()
    for blob in blobs:
        draw_crosshair(out, blob.centroid)
    return ImageRGB(labels.width, labels.height, out)


def draw_crosshair(arr: np.ndarray, center, color=CROSSHAIR, size: int = 5) -> None:
    h, w = arr.shape[:2]
    cu, cv = (int(math.floor(c + 0.5)) for c in center)
    half = size // 2
    for d in range(-half, half + 1):
        if 0 <= cv < h and 0 <= cu + d < w:
            arr[cv, cu + d] = color
        if 0 <= cv + d < h and 0 <= cu < w:
            arr[cv + d, cu] = color
