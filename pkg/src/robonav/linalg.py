"""Dense linear-algebra kernels shared by the calibration solver."""
from __future__ import annotations

import numpy as np


class LinAlgError(ValueError):
    pass


def _checked(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if not np.all(np.isfinite(a)):
        raise LinAlgError("matrix has non-finite entries")
    return a


def canonical_sign(x: np.ndarray) -> np.ndarray:
    """Flip ``x`` so its first nonzero component is positive."""
    nz = np.flatnonzero(x)
    if nz.size and x.flat[nz[0]] < 0:
        return -x
    return x


def svd(a):
    """Thin SVD ``a = U @ diag(s) @ Vt`` with singular values descending."""
    a = _checked(a)
    return np.linalg.svd(a, full_matrices=False)


def solve_homogeneous(a) -> tuple[np.ndarray, np.ndarray]:
    """Unit vector x minimising ``|a x|``, plus the full singular-value spectrum.

    Uses the full right basis so that wide matrices (fewer rows than columns)
    still return a null-space vector.
    """
    a = _checked(a)
    _, s, vt = np.linalg.svd(a, full_matrices=True)
    if s.size < vt.shape[0]:
        s = np.concatenate([s, np.zeros(vt.shape[0] - s.size)])
    return canonical_sign(vt[-1].copy()), s


def solve_least_squares(a, b) -> np.ndarray:
    a = _checked(a)
    b = _checked(b)
    x, *_ = np.linalg.lstsq(a, b, rcond=None)
    return x
