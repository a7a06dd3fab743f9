"""Rotation distances, symmetry reduction, RMSE and Chamfer metrics."""

from logging import getLogger

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.transform import Rotation

from ..core.errors import ContractViolation
from . import PointCloud, RigidTransform, SymmetryGroup, axis_rotation

logger = getLogger(__name__)

EULER_CONVENTION = "XYZ"


def _skew(u):
    return np.array(
        [
            [0.0, -u[2], u[1]],
            [u[2], 0.0, -u[0]],
            [-u[1], u[0], 0.0],
        ]
    )


def geodesic(Ra, Rb) -> float:
    """Rotation angle of Ra Rb^T in [0, pi].

    Evaluated with atan2 of the sine and cosine parts, which equals the
    clamped arccos((tr - 1) / 2) and keeps precision near 0 and pi.
    """
    M = np.asarray(Ra) @ np.asarray(Rb).T
    c = (np.trace(M) - 1.0) / 2.0
    w = np.array([M[2, 1] - M[1, 2], M[0, 2] - M[2, 0], M[1, 0] - M[0, 1]])
    s = np.linalg.norm(w) / 2.0
    return float(np.arctan2(s, c))


def sym_reduced_error(R_pred, R_gt, sym: SymmetryGroup):
    """Smallest geodesic(R_pred, S R_gt) over S in ``sym``.

    Returns (error, S R_gt). For a continuous axis u the best angle for
    A = F R_gt R_pred^T maximizes tr(Rot_u(t) A), reached at
    t* = atan2(tr([u]x A), tr A - u^T A u).
    """
    R_pred = np.asarray(R_pred, dtype=np.float64)
    R_gt = np.asarray(R_gt, dtype=np.float64)
    if sym is None:
        return geodesic(R_pred, R_gt), R_gt
    best_err, best = np.inf, R_gt
    for F in sym.finite:
        S = F
        if sym.continuous_axis is not None:
            u = sym.axis_vector
            A = F @ R_gt @ R_pred.T
            theta = np.arctan2(np.trace(_skew(u) @ A), np.trace(A) - u @ A @ u)
            S = axis_rotation(u, theta) @ F
        candidate = S @ R_gt
        err = geodesic(R_pred, candidate)
        if err < best_err:
            best_err, best = err, candidate
    return best_err, best


def wrap_degrees(a):
    """Wrap to (-180, 180]."""
    return 180.0 - np.mod(180.0 - np.asarray(a, dtype=np.float64), 360.0)


def pose_errors(pred: RigidTransform, gt: RigidTransform, sym: SymmetryGroup):
    """Squared translation components and wrapped residual Euler angles (deg)."""
    sq_t = (pred.translation - gt.translation) ** 2
    _, R_best = sym_reduced_error(pred.rotation, gt.rotation, sym)
    residual = pred.rotation @ R_best.T
    euler = Rotation.from_matrix(residual).as_euler(EULER_CONVENTION, degrees=True)
    return sq_t, wrap_degrees(euler)


def pose_metrics(samples):
    """Component-mean RMSE of translation and residual Euler angles.

    samples: list of (pred, gt, sym).
    """
    if not samples:
        raise ContractViolation("pose_metrics needs at least one sample")
    sq_t = np.zeros(3)
    sq_r = np.zeros(3)
    for pred, gt, sym in samples:
        t, r = pose_errors(pred, gt, sym)
        sq_t += t
        sq_r += r**2
    n = 3 * len(samples)
    return {
        "rmse_t": float(np.sqrt(sq_t.sum() / n)),
        "rmse_r_deg": float(np.sqrt(sq_r.sum() / n)),
    }


def _points(cloud):
    pts = cloud.valid if isinstance(cloud, PointCloud) else np.asarray(cloud)
    if len(pts) == 0:
        raise ContractViolation("chamfer of an empty cloud")
    return pts


def _nearest_sq(src, dst):
    _, idx = cKDTree(dst).query(src)
    diff = src - dst[idx]
    return np.sum(diff * diff, axis=1)


def chamfer(P, Q) -> float:
    """Mean squared nearest distance, both directions, valid points only."""
    p, q = _points(P), _points(Q)
    return float(np.mean(_nearest_sq(p, q)) + np.mean(_nearest_sq(q, p)))


def pair_chamfer(pred_a, gt_a, pred_b, gt_b) -> float:
    return 0.5 * (chamfer(pred_b, gt_b) + chamfer(pred_a, gt_a))
