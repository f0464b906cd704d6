"""Planar (Zhang) camera calibration.

Pipeline: one normalized-DLT homography per board view, closed-form
intrinsics from the stacked absolute-conic constraints, per-view extrinsics,
then Levenberg-Marquardt refinement of the full reprojection error.
``GroundMap`` turns a calibrated camera plus the floor pose into a
pixel <-> centimetre mapping on the arena floor.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from robonav.linalg import canonical_sign, solve_homogeneous, svd


class CalibrationError(ValueError):
    """Base class for calibration failures."""

    view_id: int | None = None


class InsufficientDataError(CalibrationError):
    pass


class DegenerateGeometryError(CalibrationError):
    pass


class CorrespondenceFormatError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


# --- types -----------------------------------------------------------------

@dataclass(frozen=True)
class PlanarCorrespondences:
    """Model-plane points (X, Y in cm, Z = 0) paired with observed pixels (u, v)."""

    view_id: int
    points: np.ndarray  # (n, 4): X, Y, u, v

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64).reshape(-1, 4)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def model(self) -> np.ndarray:
        return self.points[:, :2]

    @property
    def image(self) -> np.ndarray:
        return self.points[:, 2:]

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float
    fy: float
    skew: float
    cx: float
    cy: float

    def __post_init__(self):
        if not (self.fx > 0 and self.fy > 0):
            raise ValueError(f"focal lengths must be positive, got fx={self.fx}, fy={self.fy}")

    @property
    def K(self) -> np.ndarray:
        return np.array(
            [[self.fx, self.skew, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]]
        )

    @property
    def K_inv(self) -> np.ndarray:
        # upper-triangular inverse, exact to rounding
        fx, fy, s, cx, cy = self.fx, self.fy, self.skew, self.cx, self.cy
        return np.array(
            [
                [1 / fx, -s / (fx * fy), (s * cy - cx * fy) / (fx * fy)],
                [0.0, 1 / fy, -cy / fy],
                [0.0, 0.0, 1.0],
            ]
        )

    def as_array(self) -> np.ndarray:
        return np.array([self.fx, self.fy, self.skew, self.cx, self.cy])

    @classmethod
    def from_array(cls, a) -> CameraIntrinsics:
        return cls(*(float(x) for x in a))


@dataclass(frozen=True, eq=False)
class ExtrinsicPose:
    """Maps model/world points into the camera frame: ``x_cam = R @ P + t`` (t in cm)."""

    R: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        R = np.array(self.R, dtype=np.float64).reshape(3, 3)
        t = np.array(self.t, dtype=np.float64).reshape(3)
        R.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "t", t)

    def __eq__(self, other):
        if not isinstance(other, ExtrinsicPose):
            return NotImplemented
        return np.array_equal(self.R, other.R) and np.array_equal(self.t, other.t)

    def __hash__(self):
        return hash((self.R.tobytes(), self.t.tobytes()))

    @classmethod
    def from_rvec(cls, rvec, t) -> ExtrinsicPose:
        return cls(rodrigues(rvec), t)

    @property
    def rvec(self) -> np.ndarray:
        return rotation_to_rvec(self.R)

    def is_rotation(self, tol: float = 1e-9) -> bool:
        R = self.R
        return (
            np.linalg.norm(R.T @ R - np.eye(3)) <= tol and abs(np.linalg.det(R) - 1.0) <= tol
        )


@dataclass(frozen=True)
class CalibrationResult:
    intrinsics: CameraIntrinsics
    poses: tuple[ExtrinsicPose, ...]
    rms_reprojection: float
    view_ids: tuple[int, ...] = ()
    converged: bool = True
    iterations: int = 0

    def pose_for(self, view_id: int) -> ExtrinsicPose:
        return self.poses[self.view_ids.index(view_id)]


# --- rotations ---------------------------------------------------------------

def _skew_matrix(w) -> np.ndarray:
    return np.array([[0.0, -w[2], w[1]], [w[2], 0.0, -w[0]], [-w[1], w[0], 0.0]])


def rodrigues(rvec) -> np.ndarray:
    """Axis-angle 3-vector to rotation matrix."""
    w = np.asarray(rvec, dtype=np.float64)
    theta = float(np.linalg.norm(w))
    W = _skew_matrix(w)
    if theta < 1e-8:
        # second-order series; exact to rounding at this size
        return np.eye(3) + W + 0.5 * (W @ W)
    return np.eye(3) + (math.sin(theta) / theta) * W + ((1 - math.cos(theta)) / theta**2) * (W @ W)


def rotation_to_rvec(R) -> np.ndarray:
    R = np.asarray(R, dtype=np.float64)
    cos_theta = np.clip((np.trace(R) - 1.0) / 2.0, -1.0, 1.0)
    theta = math.acos(cos_theta)
    axis = np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]])
    if theta < 1e-8:
        return 0.5 * axis
    if math.pi - theta < 1e-6:
        # near pi the antisymmetric part vanishes; read the axis from R + I
        M = (R + np.eye(3)) / 2.0
        k = int(np.argmax(np.diag(M)))
        a = M[:, k] / math.sqrt(M[k, k])
        return canonical_sign(a) * theta
    return axis * (theta / (2.0 * math.sin(theta)))


def nearest_rotation(M) -> np.ndarray:
    U, _, Vt = svd(M)
    R = U @ Vt
    if np.linalg.det(R) < 0:
        U = U.copy()
        U[:, -1] *= -1
        R = U @ Vt
    return R


# --- homographies -------------------------------------------------------------

def canonical_homography(H) -> np.ndarray:
    """Scale to unit Frobenius norm with H[2,2] >= 0 (first nonzero entry positive if H[2,2] == 0)."""
    H = np.asarray(H, dtype=np.float64)
    H = H / np.linalg.norm(H)
    if H[2, 2] < 0:
        H = -H
    elif H[2, 2] == 0:
        H = canonical_sign(H.ravel()).reshape(3, 3)
    return H


def _normalizing_transform(pts: np.ndarray) -> np.ndarray:
    c = pts.mean(axis=0)
    d = np.sqrt(((pts - c) ** 2).sum(axis=1)).mean()
    if d == 0:
        raise DegenerateGeometryError("all points coincide")
    s = math.sqrt(2.0) / d
    return np.array([[s, 0.0, -s * c[0]], [0.0, s, -s * c[1]], [0.0, 0.0, 1.0]])


def _apply(T: np.ndarray, pts: np.ndarray) -> np.ndarray:
    h = np.column_stack([pts, np.ones(len(pts))]) @ T.T
    return h[:, :2] / h[:, 2:3]


def _check_not_collinear(pts: np.ndarray, what: str, view_id: int) -> None:
    centered = pts - pts.mean(axis=0)
    s = np.linalg.svd(centered, compute_uv=False)
    if s[0] == 0 or s[1] <= 1e-9 * s[0]:
        err = DegenerateGeometryError(f"view {view_id}: {what} points are collinear")
        err.view_id = view_id
        raise err


def estimate_homography(corr: PlanarCorrespondences) -> np.ndarray:
    """Normalized DLT: ``s * (u, v, 1) = H @ (X, Y, 1)``; returned in canonical form."""
    if len(corr) < 4:
        err = InsufficientDataError(
            f"view {corr.view_id}: need >= 4 correspondences, got {len(corr)}"
        )
        err.view_id = corr.view_id
        raise err
    model, image = corr.model, corr.image
    _check_not_collinear(model, "model", corr.view_id)
    _check_not_collinear(image, "image", corr.view_id)

    T_m = _normalizing_transform(model)
    T_i = _normalizing_transform(image)
    m = _apply(T_m, model)
    p = _apply(T_i, image)

    n = len(m)
    A = np.zeros((2 * n, 9))
    X, Y = m[:, 0], m[:, 1]
    u, v = p[:, 0], p[:, 1]
    A[0::2, 0] = -X
    A[0::2, 1] = -Y
    A[0::2, 2] = -1
    A[0::2, 6] = u * X
    A[0::2, 7] = u * Y
    A[0::2, 8] = u
    A[1::2, 3] = -X
    A[1::2, 4] = -Y
    A[1::2, 5] = -1
    A[1::2, 6] = v * X
    A[1::2, 7] = v * Y
    A[1::2, 8] = v

    h, s = solve_homogeneous(A)
    # rank 8 is required for a unique solution
    if s[7] <= 1e-10 * s[0]:
        err = DegenerateGeometryError(f"view {corr.view_id}: design matrix is rank deficient")
        err.view_id = corr.view_id
        raise err
    Hn = h.reshape(3, 3)
    H = np.linalg.solve(T_i, Hn @ T_m)
    if abs(np.linalg.det(H)) <= 1e-12 * np.linalg.norm(H) ** 3:
        err = DegenerateGeometryError(f"view {corr.view_id}: homography is singular")
        err.view_id = corr.view_id
        raise err
    return canonical_homography(H)


def apply_homography(H, pts) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
    h = np.column_stack([pts, np.ones(len(pts))]) @ np.asarray(H).T
    return h[:, :2] / h[:, 2:3]


# --- closed-form intrinsics ------------------------------------------------------

def _v_ij(H: np.ndarray, i: int, j: int) -> np.ndarray:
    hi, hj = H[:, i], H[:, j]
    return np.array(
        [
            hi[0] * hj[0],
            hi[0] * hj[1] + hi[1] * hj[0],
            hi[1] * hj[1],
            hi[2] * hj[0] + hi[0] * hj[2],
            hi[2] * hj[1] + hi[1] * hj[2],
            hi[2] * hj[2],
        ]
    )


def intrinsics_from_homographies(Hs: Sequence[np.ndarray]) -> CameraIntrinsics:
    if len(Hs) < 3:
        raise InsufficientDataError(f"insufficient views: need >= 3 homographies, got {len(Hs)}")
    rows = []
    for H in Hs:
        H = np.asarray(H, dtype=np.float64)
        rows.append(_v_ij(H, 0, 1))
        rows.append(_v_ij(H, 0, 0) - _v_ij(H, 1, 1))
    V = np.array(rows)
    b, s = solve_homogeneous(V)
    if s[-2] - s[-1] <= 1e-8 * s[0]:
        raise DegenerateGeometryError(
            "degenerate view set: smallest singular value is not unique (parallel planes?)"
        )
    B11, B12, B22, B13, B23, B33 = b

    denom = B11 * B22 - B12 * B12
    if denom == 0 or B11 == 0:
        raise DegenerateGeometryError("degenerate conic estimate (B11*B22 - B12^2 = 0)")
    v0 = (B12 * B13 - B11 * B23) / denom
    lam = B33 - (B13 * B13 + v0 * (B12 * B13 - B11 * B23)) / B11
    if lam / B11 <= 0 or lam * B11 / denom <= 0:
        raise DegenerateGeometryError("inconsistent homographies: negative value under square root")
    alpha = math.sqrt(lam / B11)
    beta = math.sqrt(lam * B11 / denom)
    gamma = -B12 * alpha * alpha * beta / lam
    u0 = gamma * v0 / beta - B13 * alpha * alpha / lam
    return CameraIntrinsics(fx=alpha, fy=beta, skew=gamma, cx=u0, cy=v0)


def extrinsics_for_view(K: CameraIntrinsics, H) -> ExtrinsicPose:
    H = np.asarray(H, dtype=np.float64)
    Kinv = K.K_inv
    a1, a2, a3 = (Kinv @ H[:, i] for i in range(3))
    n1 = np.linalg.norm(a1)
    if n1 == 0:
        raise DegenerateGeometryError("homography first column maps to zero")
    lam = 1.0 / n1
    if a3[2] == 0:
        raise DegenerateGeometryError("cannot resolve translation sign: t_z is zero")
    if a3[2] < 0:
        lam = -lam
    r1, r2, t = lam * a1, lam * a2, lam * a3
    R = nearest_rotation(np.column_stack([r1, r2, np.cross(r1, r2)]))
    return ExtrinsicPose(R, t)


# --- projection ------------------------------------------------------------------

class BehindCameraError(ValueError):
    pass


def project(K: CameraIntrinsics, pose: ExtrinsicPose, P) -> tuple[float, float]:
    x, y, z = pose.R @ np.asarray(P, dtype=np.float64) + pose.t
    if z <= 0:
        raise BehindCameraError(f"point has non-positive depth {z}")
    return K.fx * x / z + K.skew * y / z + K.cx, K.fy * y / z + K.cy


def project_points(K: CameraIntrinsics, pose: ExtrinsicPose, P) -> np.ndarray:
    """Vectorized ``project`` for an (n, 3) or (n, 2) array (2 columns implies Z = 0)."""
    P = np.asarray(P, dtype=np.float64)
    if P.shape[1] == 2:
        P = np.column_stack([P, np.zeros(len(P))])
    cam = P @ pose.R.T + pose.t
    z = cam[:, 2]
    if np.any(z <= 0):
        raise BehindCameraError("point behind camera")
    x, y = cam[:, 0] / z, cam[:, 1] / z
    return np.column_stack([K.fx * x + K.skew * y + K.cx, K.fy * y + K.cy])


def backproject_ground(K: CameraIntrinsics, pose: ExtrinsicPose, uv) -> np.ndarray:
    """Intersect the pixel ray with the model plane Z = 0; returns (X, Y)."""
    return ground_metric_map(K, pose).to_floor(uv)


def plane_homography(K: CameraIntrinsics, pose: ExtrinsicPose) -> np.ndarray:
    return K.K @ np.column_stack([pose.R[:, 0], pose.R[:, 1], pose.t])


@dataclass(frozen=True)
class GroundMap:
    """Pixel <-> floor-plane (cm) mapping through the floor homography."""

    H: np.ndarray
    H_inv: np.ndarray

    def to_floor(self, uv) -> np.ndarray:
        uv = np.asarray(uv, dtype=np.float64)
        single = uv.ndim == 1
        pts = np.atleast_2d(uv)
        h = np.column_stack([pts, np.ones(len(pts))]) @ self.H_inv.T
        if np.any(np.abs(h[:, 2]) <= 1e-12 * np.abs(h).max(axis=1)):
            raise DegenerateGeometryError("pixel maps to the plane at infinity")
        out = h[:, :2] / h[:, 2:3]
        return out[0] if single else out

    def to_pixel(self, xy) -> np.ndarray:
        xy = np.asarray(xy, dtype=np.float64)
        single = xy.ndim == 1
        out = apply_homography(self.H, np.atleast_2d(xy))
        return out[0] if single else out

    def distance_cm(self, a, b) -> float:
        pa, pb = self.to_floor(np.array([a, b], dtype=np.float64))
        return float(math.hypot(*(pa - pb)))


def ground_metric_map(K: CameraIntrinsics, floor_pose: ExtrinsicPose) -> GroundMap:
    H = plane_homography(K, floor_pose)
    s = np.linalg.svd(H, compute_uv=False)
    if s[-1] <= 1e-12 * s[0]:
        raise DegenerateGeometryError("floor homography is near-singular")
    return GroundMap(H, np.linalg.inv(H))


# --- refinement ------------------------------------------------------------------

def _unpack(x: np.ndarray, n_views: int):
    K = x[:5]
    poses = x[5:].reshape(n_views, 6)
    return K, poses


def _view_residuals(k: np.ndarray, pose6: np.ndarray, model_xy: np.ndarray, observed: np.ndarray):
    R = rodrigues(pose6[:3])
    t = pose6[3:]
    cam = model_xy @ R[:, :2].T + t
    z = cam[:, 2]
    x, y = cam[:, 0] / z, cam[:, 1] / z
    u = k[0] * x + k[2] * y + k[3]
    v = k[1] * y + k[4]
    return np.column_stack([u - observed[:, 0], v - observed[:, 1]]).ravel()


def _sorted_views(corrs: Sequence[PlanarCorrespondences]):
    return sorted(corrs, key=lambda c: c.view_id)


def reprojection_residuals(result: CalibrationResult, corrs) -> np.ndarray:
    k = result.intrinsics.as_array()
    by_id = dict(zip(result.view_ids, result.poses)) if result.view_ids else None
    out = []
    for i, c in enumerate(_sorted_views(corrs)):
        pose = by_id[c.view_id] if by_id else result.poses[i]
        p6 = np.concatenate([pose.rvec, pose.t])
        out.append(_view_residuals(k, p6, c.model, c.image))
    return np.concatenate(out)


def rms_of(residuals: np.ndarray) -> float:
    n_points = residuals.size // 2
    return math.sqrt(float(residuals @ residuals) / n_points) if n_points else 0.0


@dataclass
class LMSettings:
    initial_damping: float = 1e-3
    damping_up: float = 10.0
    damping_down: float = 10.0
    rel_cost_tol: float = 1e-12
    grad_tol: float = 1e-10
    max_iterations: int = 200
    fd_rel_step: float = 1e-6
    fd_abs_floor: float = 1e-8


class _Problem:
    """Stacked reprojection residuals with a block-sparse finite-difference Jacobian."""

    def __init__(self, views: Sequence[PlanarCorrespondences], settings: LMSettings):
        self.views = views
        self.settings = settings
        self.n_views = len(views)
        self.sizes = [2 * len(v) for v in views]
        self.offsets = np.concatenate([[0], np.cumsum(self.sizes)])

    def residuals(self, x: np.ndarray) -> np.ndarray:
        k, poses = _unpack(x, self.n_views)
        return np.concatenate(
            [_view_residuals(k, poses[i], v.model, v.image) for i, v in enumerate(self.views)]
        )

    def _step(self, value: float) -> float:
        s = self.settings
        return max(s.fd_rel_step * abs(value), s.fd_abs_floor)

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        # central differences; a view's residuals depend only on K and that view's pose
        k, poses = _unpack(x, self.n_views)
        J = np.zeros((self.offsets[-1], x.size))
        for i, view in enumerate(self.views):
            rows = slice(self.offsets[i], self.offsets[i + 1])
            for j in range(5):
                h = self._step(k[j])
                kp, km = k.copy(), k.copy()
                kp[j] += h
                km[j] -= h
                J[rows, j] = (
                    _view_residuals(kp, poses[i], view.model, view.image)
                    - _view_residuals(km, poses[i], view.model, view.image)
                ) / (2 * h)
            for j in range(6):
                h = self._step(poses[i, j])
                pp, pm = poses[i].copy(), poses[i].copy()
                pp[j] += h
                pm[j] -= h
                J[rows, 5 + 6 * i + j] = (
                    _view_residuals(k, pp, view.model, view.image)
                    - _view_residuals(k, pm, view.model, view.image)
                ) / (2 * h)
        return J


def _pack(result: CalibrationResult, view_ids: Sequence[int]) -> np.ndarray:
    by_id = dict(zip(result.view_ids, result.poses)) if result.view_ids else None
    parts = [result.intrinsics.as_array()]
    for i, vid in enumerate(view_ids):
        pose = by_id[vid] if by_id else result.poses[i]
        parts.append(np.concatenate([pose.rvec, pose.t]))
    return np.concatenate(parts)


def cost_gradient(result: CalibrationResult, corrs, settings: LMSettings | None = None) -> np.ndarray:
    """Gradient of 0.5 * sum(residual^2) by finite differences over the packed parameters."""
    views = _sorted_views(corrs)
    problem = _Problem(views, settings or LMSettings())
    x = _pack(result, [v.view_id for v in views])
    return problem.jacobian(x).T @ problem.residuals(x)


def refine_calibration(
    initial: CalibrationResult,
    corrs: Sequence[PlanarCorrespondences],
    settings: LMSettings | None = None,
) -> CalibrationResult:
    """Levenberg-Marquardt over intrinsics and per-view (axis-angle, t) poses.

    Only cost-decreasing steps are accepted, so the returned rms never exceeds
    the initial one. ``converged`` is False when the iteration cap is hit.
    """
    settings = settings or LMSettings()
    views = _sorted_views(corrs)
    if len(views) != len(initial.poses):
        raise ValueError(f"{len(initial.poses)} poses for {len(views)} views")
    view_ids = [v.view_id for v in views]
    problem = _Problem(views, settings)

    x = _pack(initial, view_ids)
    r = problem.residuals(x)
    cost = 0.5 * float(r @ r)
    mu = settings.initial_damping
    converged = False
    iterations = 0

    while iterations < settings.max_iterations:
        iterations += 1
        J = problem.jacobian(x)
        g = J.T @ r
        if np.max(np.abs(g)) < settings.grad_tol:
            converged = True
            break
        A = J.T @ J
        diag = np.diag(A).copy()
        diag[diag == 0] = 1.0
        accepted = False
        while not accepted:
            try:
                delta = np.linalg.solve(A + mu * np.diag(diag), -g)
            except np.linalg.LinAlgError:
                mu *= settings.damping_up
                continue
            x_new = x + delta
            r_new = problem.residuals(x_new)
            cost_new = 0.5 * float(r_new @ r_new)
            if np.isfinite(cost_new) and cost_new < cost:
                accepted = True
                mu /= settings.damping_down
            else:
                mu *= settings.damping_up
                if mu > 1e16:
                    break
        if not accepted:
            # no descent direction left at machine precision
            converged = True
            break
        rel_change = (cost - cost_new) / cost if cost > 0 else 0.0
        x, r, cost = x_new, r_new, cost_new
        if rel_change < settings.rel_cost_tol or cost == 0.0:
            converged = True
            break

    k, poses = _unpack(x, len(views))
    intr = CameraIntrinsics.from_array(k)
    pose_objs = tuple(ExtrinsicPose.from_rvec(p[:3], p[3:]) for p in poses)
    return CalibrationResult(
        intrinsics=intr,
        poses=pose_objs,
        rms_reprojection=rms_of(r),
        view_ids=tuple(view_ids),
        converged=converged,
        iterations=iterations,
    )


def calibrate(corrs: Sequence[PlanarCorrespondences], refine: bool = True) -> CalibrationResult:
    """Full chain: homographies, closed-form intrinsics, extrinsics, optional refinement."""
    views = _sorted_views(corrs)
    if len(views) < 3:
        raise InsufficientDataError(f"insufficient views: need >= 3, got {len(views)}")
    Hs = [estimate_homography(v) for v in views]
    K = intrinsics_from_homographies(Hs)
    poses = []
    for v, H in zip(views, Hs):
        try:
            poses.append(extrinsics_for_view(K, H))
        except DegenerateGeometryError as exc:
            exc.view_id = v.view_id
            raise
    initial = CalibrationResult(K, tuple(poses), 0.0, tuple(v.view_id for v in views))
    initial = replace(initial, rms_reprojection=rms_of(reprojection_residuals(initial, views)))
    if not refine:
        return initial
    return refine_calibration(initial, views)


# --- file formats ----------------------------------------------------------------

def _fmt_exact(x: float) -> str:
    return repr(float(x))


def write_correspondences(corrs: Sequence[PlanarCorrespondences]) -> str:
    lines = ["# view_id X_cm Y_cm u_px v_px"]
    for c in corrs:
        for X, Y, u, v in c.points:
            lines.append(f"{c.view_id} {_fmt_exact(X)} {_fmt_exact(Y)} {_fmt_exact(u)} {_fmt_exact(v)}")
    return "\n".join(lines) + "\n"


def read_correspondences(text: str) -> list[PlanarCorrespondences]:
    """Parse ``view_id X Y u v`` lines; views are returned in first-appearance order."""
    grouped: dict[int, list] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 5:
            raise CorrespondenceFormatError(f"expected 5 fields, got {len(fields)}", lineno)
        try:
            vid = int(fields[0])
            vals = [float(f) for f in fields[1:]]
        except ValueError:
            raise CorrespondenceFormatError(f"cannot parse numbers in {raw.strip()!r}", lineno) from None
        if not all(math.isfinite(v) for v in vals):
            raise CorrespondenceFormatError("non-finite value", lineno)
        grouped.setdefault(vid, []).append(vals)
    return [PlanarCorrespondences(vid, np.array(pts)) for vid, pts in grouped.items()]


def load_correspondences(path) -> list[PlanarCorrespondences]:
    return read_correspondences(Path(path).read_text())


def save_correspondences(corrs, path) -> None:
    Path(path).write_text(write_correspondences(corrs))


def _g9(x: float) -> str:
    return f"{float(x):.9g}"


def _pose_line(tag: str, pose: ExtrinsicPose) -> str:
    R = " ".join(_g9(x) for x in pose.R.ravel())
    t = " ".join(_g9(x) for x in pose.t)
    return f"{tag} R {R} t {t}"


def write_calibration(result: CalibrationResult, floor_view: int | None = None) -> str:
    k = result.intrinsics
    lines = [
        f"fx= {_g9(k.fx)}",
        f"fy= {_g9(k.fy)}",
        f"skew= {_g9(k.skew)}",
        f"cx= {_g9(k.cx)}",
        f"cy= {_g9(k.cy)}",
        f"rms= {_g9(result.rms_reprojection)}",
    ]
    ids = result.view_ids or tuple(range(len(result.poses)))
    for vid, pose in zip(ids, result.poses):
        lines.append(_pose_line(f"view {vid}", pose))
    if floor_view is not None:
        lines.append(f"floor {floor_view}")
    return "\n".join(lines) + "\n"


@dataclass
class CalibrationFile:
    intrinsics: CameraIntrinsics
    rms: float
    poses: dict[int, ExtrinsicPose] = field(default_factory=dict)
    floor_view: int | None = None

    @property
    def floor_pose(self) -> ExtrinsicPose:
        """Pose of the arena floor: the designated floor view, else the lowest view id."""
        if not self.poses:
            raise ValueError("calibration file lists no view poses")
        vid = self.floor_view if self.floor_view is not None else min(self.poses)
        return self.poses[vid]

    def ground_map(self) -> GroundMap:
        return ground_metric_map(self.intrinsics, self.floor_pose)


def read_calibration(text: str) -> CalibrationFile:
    scalars: dict[str, float] = {}
    poses: dict[int, ExtrinsicPose] = {}
    floor_view = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        try:
            if fields[0].endswith("="):
                scalars[fields[0][:-1]] = float(fields[1])
            elif fields[0] == "view":
                vid = int(fields[1])
                if fields[2] != "R" or fields[12] != "t" or len(fields) != 16:
                    raise ValueError
                R = [float(f) for f in fields[3:12]]
                t = [float(f) for f in fields[13:16]]
                poses[vid] = ExtrinsicPose(nearest_rotation(np.reshape(R, (3, 3))), t)
            elif fields[0] == "floor":
                floor_view = int(fields[1])
            else:
                raise ValueError
        except (ValueError, IndexError):
            raise CorrespondenceFormatError(f"malformed calibration line {raw.strip()!r}", lineno) from None
    missing = {"fx", "fy", "skew", "cx", "cy", "rms"} - scalars.keys()
    if missing:
        raise CorrespondenceFormatError(f"missing keys {sorted(missing)}", 0)
    K = CameraIntrinsics(scalars["fx"], scalars["fy"], scalars["skew"], scalars["cx"], scalars["cy"])
    if floor_view is not None and floor_view not in poses:
        raise CorrespondenceFormatError(f"floor view {floor_view} has no pose", 0)
    return CalibrationFile(K, scalars["rms"], poses, floor_view)
