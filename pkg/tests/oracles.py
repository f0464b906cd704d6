"""Independent brute-force oracles. Nothing here imports the code under test's kernels."""
from __future__ import annotations

import math
from collections import deque

import numpy as np


def naive_histogram(pixels: np.ndarray, channel: int) -> list[int]:
    bins = [0] * 256
    h, w, _ = pixels.shape
    for v in range(h):
        for u in range(w):
            bins[int(pixels[v, u, channel])] += 1
    return bins


def flood_fill_blobs(labels: np.ndarray, min_area: int):
    """BFS over 4-neighbours; returns sorted (cls, count, centroid, bbox) tuples."""
    h, w = labels.shape
    seen = np.zeros((h, w), dtype=bool)
    out = []
    for v0 in range(h):
        for u0 in range(w):
            c = int(labels[v0, u0])
            if c == 0 or seen[v0, u0]:
                continue
            queue = deque([(u0, v0)])
            seen[v0, u0] = True
            members = []
            while queue:
                u, v = queue.popleft()
                members.append((u, v))
                for du, dv in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                    nu, nv = u + du, v + dv
                    if 0 <= nu < w and 0 <= nv < h and not seen[nv, nu] and labels[nv, nu] == c:
                        seen[nv, nu] = True
                        queue.append((nu, nv))
            if len(members) < min_area:
                continue
            us = [m[0] for m in members]
            vs = [m[1] for m in members]
            out.append(
                (c, len(members), (sum(us) / len(us), sum(vs) / len(vs)),
                 (min(us), min(vs), max(us), max(vs)))
            )
    out.sort(key=lambda b: (b[0], -b[1], b[3][0], b[3][1]))
    return out


def sampled_blocked(robot, goal, center, radius, clearance, n=10_000):
    """Dense sampling of the segment: (blocked, min_distance, t_at_min)."""
    t = np.linspace(0.0, 1.0, n)
    px = robot[0] + t * (goal[0] - robot[0])
    py = robot[1] + t * (goal[1] - robot[1])
    d = np.hypot(px - center[0], py - center[1])
    k = int(np.argmin(d))
    blocked = bool(d[k] < radius + clearance and 0 < k < n - 1)
    return blocked, float(d[k]), float(t[k])


def segment_min_distance(a, b, c, n=2_000) -> float:
    t = np.linspace(0.0, 1.0, n)
    px = a[0] + t * (b[0] - a[0])
    py = a[1] + t * (b[1] - a[1])
    return float(np.min(np.hypot(px - c[0], py - c[1])))


def rotation_angle_between(R1, R2) -> float:
    # atan2 keeps full precision for tiny angles, where acos of the trace does not
    M = R1.T @ R2
    sin = 0.5 * math.sqrt((M[2, 1] - M[1, 2]) ** 2 + (M[0, 2] - M[2, 0]) ** 2 + (M[1, 0] - M[0, 1]) ** 2)
    cos = (np.trace(M) - 1.0) / 2.0
    return math.atan2(sin, cos)
