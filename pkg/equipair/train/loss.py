from ..autodiff import ops
from ..geometry.metrics import sym_reduced_error
from . import LossConfig


def rotation_loss(R_pred, R_target):
    """Geodesic angle arccos((tr(R_target R_pred^T) - 1) / 2)."""
    tr = ops.sum(R_pred * R_target)
    return ops.acos(ops.clamp((tr - 1.0) / 2.0, -1.0, 1.0))


def translation_loss(T_pred, T_target):
    """Mean absolute component error."""
    return ops.mean(ops.abs(T_pred - T_target))


def loss(pred, gt, cfg: LossConfig, sym=None):
    """lambda_rot * geodesic + lambda_trans * L1.

    With ``cfg.symmetry_aware`` the rotation target is the symmetry-equivalent
    ground truth closest to the prediction.
    """
    R_target = gt.rotation
    if cfg.symmetry_aware and sym is not None:
        _, R_target = sym_reduced_error(pred.rotation.value, gt.rotation, sym)
    return cfg.lambda_rot * rotation_loss(pred.rotation, R_target) + cfg.lambda_trans * translation_loss(
        pred.translation, gt.translation
    )
