"""Pure-Python/numpy kernels; reference path and fallback when the extension is absent.

Component statistics rows are ``(class, count, sum_u, sum_v, u_min, v_min, u_max, v_max)``.
"""
from __future__ import annotations

import numpy as np

STAT_FIELDS = 8


def classify_image(pixels: np.ndarray, margin: int, min_value: int) -> np.ndarray:
    """Dominance-margin classification codes: 0 background, 1 green, 2 red, 3 blue."""
    px = pixels.astype(np.int16)
    r, g, b = px[..., 0], px[..., 1], px[..., 2]
    out = np.zeros(pixels.shape[:2], dtype=np.uint8)
    # with margin >= 1 at most one rule fires; at margin 0 red wins, then green
    blue = (b >= min_value) & (b >= r + margin) & (b >= g + margin)
    green = (g >= min_value) & (g >= r + margin) & (g >= b + margin)
    red = (r >= min_value) & (r >= g + margin) & (r >= b + margin)
    out[blue] = 3
    out[green] = 1
    out[red] = 2
    return out


def _find(parent: list, i: int) -> int:
    root = i
    while parent[root] != root:
        root = parent[root]
    while parent[i] != root:
        parent[i], i = root, parent[i]
    return root


def component_stats(labels: np.ndarray) -> np.ndarray:
    """4-connected components of equal nonzero labels, via run-length union-find."""
    height, width = labels.shape
    runs = []  # (v, start, end, cls)
    row_runs = []
    for v in range(height):
        row = labels[v]
        change = np.flatnonzero(np.diff(row)) + 1
        starts = np.concatenate(([0], change))
        ends = np.concatenate((change - 1, [width - 1]))
        current = []
        for s, e in zip(starts.tolist(), ends.tolist()):
            c = int(row[s])
            if c:
                current.append(len(runs))
                runs.append((v, s, e, c))
        row_runs.append(current)

    parent = list(range(len(runs)))
    for v in range(1, height):
        prev, cur = row_runs[v - 1], row_runs[v]
        i = j = 0
        while i < len(prev) and j < len(cur):
            _, ps, pe, pc = runs[prev[i]]
            _, cs, ce, cc = runs[cur[j]]
            if ps <= ce and cs <= pe and pc == cc:
                a, b = _find(parent, prev[i]), _find(parent, cur[j])
                if a != b:
                    parent[max(a, b)] = min(a, b)
            if pe < ce:
                i += 1
            else:
                j += 1

    stats: dict[int, list] = {}
    for idx, (v, s, e, c) in enumerate(runs):
        root = _find(parent, idx)
        n = e - s + 1
        su = (s + e) * n // 2
        st = stats.get(root)
        if st is None:
            stats[root] = [c, n, su, v * n, s, v, e, v]
        else:
            st[1] += n
            st[2] += su
            st[3] += v * n
            st[4] = min(st[4], s)
            st[5] = min(st[5], v)
            st[6] = max(st[6], e)
            st[7] = max(st[7], v)
    if not stats:
        return np.zeros((0, STAT_FIELDS), dtype=np.int64)
    return np.array([stats[k] for k in sorted(stats)], dtype=np.int64)
