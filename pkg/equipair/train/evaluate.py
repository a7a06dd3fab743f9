from concurrent.futures import ThreadPoolExecutor
from logging import getLogger

import numpy as np

from ..core import config as global_config
from ..core.errors import ContractViolation
from ..data.canonical import augment
from ..geometry import apply
from ..geometry.metrics import pair_chamfer, pose_errors
from ..model import AssemblyModel, ModelParams
from . import EvalReport, SampleRecord

logger = getLogger(__name__)


def _record(pair, aug, pose_a, pose_b):
    sq_tb, eul_b = pose_errors(pose_b, aug.gt_b, pair.sym_b)
    sq_ta, eul_a = pose_errors(pose_a, aug.gt_a, pair.sym_a)
    ch = pair_chamfer(
        apply(pose_a, aug.obs_a),
        apply(aug.gt_a, aug.obs_a),
        apply(pose_b, aug.obs_b),
        apply(aug.gt_b, aug.obs_b),
    )
    return SampleRecord(
        pair_id=pair.pair_id,
        task=pair.task,
        sq_err_t=float(np.sum(sq_ta) + np.sum(sq_tb)),
        sq_err_r_deg=float(np.sum(eul_a**2) + np.sum(eul_b**2)),
        chamfer=ch,
    )


def _run(pairs, seed, predict, threads):
    pairs = list(pairs)
    if not pairs:
        raise ContractViolation("cannot evaluate an empty test set")

    def one(i):
        pair = pairs[i]
        aug = augment(pair, [seed, i])
        pose_a, pose_b = predict(pair, aug)
        logger.debug(f"evaluated {pair.pair_id}")
        return _record(pair, aug, pose_a, pose_b)

    if threads is None:
        threads = global_config.threads
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, range(len(pairs))))


def evaluate_two_step(params_b: ModelParams, params_a: ModelParams, pairs, seed=0, oracle=False, threads=None):
    """Predict B, place it, then predict A against the placed B.

    With ``oracle`` the ground-truth poses stand in for both predictions, so
    ``params_b``/``params_a`` may be None.
    """
    if oracle:
        echo = {"variant": "two_step", "oracle_gt": True, "seed": seed}

        def predict(pair, aug):
            return aug.gt_a, aug.gt_b

    else:
        params = params_b.merged(params_a)
        model = AssemblyModel(params.config, "two_step")
        bound = params.variables(requires_grad=False)
        echo = {
            "variant": "two_step",
            "oracle_gt": False,
            "seed": seed,
            "encoder": params.config.to_dict(),
        }

        def predict(pair, aug):
            pose_b = model.predict_b(aug.obs_b, bound).transform
            placed_b = apply(pose_b, aug.obs_b)
            pose_a = model.predict_a(aug.obs_a, placed_b, bound).transform
            return pose_a, pose_b

    samples = _run(pairs, seed, predict, threads)
    report = EvalReport.from_samples(samples, echo)
    logger.info(
        f"two-step: rmse_t {report.overall.rmse_t:.4g}, rmse_r {report.overall.rmse_r_deg:.4g} deg "
        f"over {report.overall.n} pairs"
    )
    return report


def evaluate_joint(params: ModelParams, pairs, seed=0, threads=None):
    """Both poses from one forward pass on the two observations."""
    model = AssemblyModel(params.config, "joint")
    bound = params.variables(requires_grad=False)

    def predict(pair, aug):
        pred_a, pred_b = model.joint_forward(aug.obs_a, aug.obs_b, bound)
        return pred_a.transform, pred_b.transform

    samples = _run(pairs, seed, predict, threads)
    echo = {"variant": "joint", "oracle_gt": False, "seed": seed, "encoder": params.config.to_dict()}
    report = EvalReport.from_samples(samples, echo)
    logger.info(
        f"joint: rmse_t {report.overall.rmse_t:.4g}, rmse_r {report.overall.rmse_r_deg:.4g} deg "
        f"over {report.overall.n} pairs"
    )
    return report
