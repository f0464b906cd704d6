# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled pixel kernels; same contracts as robonav._pykernels."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def classify_image(const unsigned char[:, :, ::1] pixels, int margin, int min_value):
    cdef Py_ssize_t h = pixels.shape[0], w = pixels.shape[1], u, v
    cdef int r, g, b
    cdef unsigned char c
    out = np.zeros((h, w), dtype=np.uint8)
    cdef unsigned char[:, ::1] o = out
    for v in range(h):
        for u in range(w):
            r = pixels[v, u, 0]
            g = pixels[v, u, 1]
            b = pixels[v, u, 2]
            c = 0
            if r >= min_value and r >= g + margin and r >= b + margin:
                c = 2
            elif g >= min_value and g >= r + margin and g >= b + margin:
                c = 1
            elif b >= min_value and b >= r + margin and b >= g + margin:
                c = 3
            o[v, u] = c
    return out


cdef inline int _find(int[::1] parent, int i) nogil:
    cdef int root = i, nxt
    while parent[root] != root:
        root = parent[root]
    while parent[i] != root:
        nxt = parent[i]
        parent[i] = root
        i = nxt
    return root


cdef inline void _union(int[::1] parent, int a, int b) nogil:
    a = _find(parent, a)
    b = _find(parent, b)
    if a < b:
        parent[b] = a
    elif b < a:
        parent[a] = b


def component_stats(const unsigned char[:, ::1] labels):
    cdef Py_ssize_t h = labels.shape[0], w = labels.shape[1], u, v
    cdef Py_ssize_t n = h * w, i
    cdef unsigned char c
    parent_arr = np.arange(n, dtype=np.int32)
    cdef int[::1] parent = parent_arr
    with nogil:
        for v in range(h):
            for u in range(w):
                c = labels[v, u]
                if c == 0:
                    continue
                i = v * w + u
                if u > 0 and labels[v, u - 1] == c:
                    _union(parent, <int>i, <int>(i - 1))
                if v > 0 and labels[v - 1, u] == c:
                    _union(parent, <int>i, <int>(i - w))

    slot_arr = np.full(n, -1, dtype=np.int64)
    cdef long long[::1] slot = slot_arr
    stats_arr = np.zeros((16, 8), dtype=np.int64)
    cdef long long[:, ::1] st = stats_arr
    cdef Py_ssize_t count = 0, cap = stats_arr.shape[0]
    cdef int root
    cdef long long k
    for v in range(h):
        for u in range(w):
            c = labels[v, u]
            if c == 0:
                continue
            root = _find(parent, <int>(v * w + u))
            k = slot[root]
            if k < 0:
                if count == cap:
                    cap *= 2
                    stats_arr = np.resize(stats_arr, (cap, 8))
                    st = stats_arr
                k = count
                slot[root] = k
                count += 1
                st[k, 0] = c
                st[k, 1] = 0
                st[k, 2] = 0
                st[k, 3] = 0
                st[k, 4] = u
                st[k, 5] = v
                st[k, 6] = u
                st[k, 7] = v
            st[k, 1] += 1
            st[k, 2] += u
            st[k, 3] += v
            if u < st[k, 4]:
                st[k, 4] = u
            if u > st[k, 6]:
                st[k, 6] = u
            if v > st[k, 7]:
                st[k, 7] = v
    return np.asarray(stats_arr[:count]).copy()
