"""Branch training under per-epoch SO(3) re-augmentation.

Branch B learns the canonical pose of the receiving object from a randomly
rotated observation. Branch A learns the fitting object's pose given the
canonical (ground truth) receiving object. ``joint`` trains both poses in
one graph, with A conditioned on the observed B.
"""

from dataclasses import dataclass, field
from logging import getLogger

import numpy as np

from ..autodiff import backward
from ..core.errors import ContractViolation, DivergenceError, NumericFault
from ..data.canonical import augment
from ..model import BRANCH_PREFIXES, AssemblyModel, EncoderConfig, ModelParams
from . import BRANCHES, LossConfig, TrainConfig
from .loss import loss
from .optim import AdamState, adam_step

logger = getLogger(__name__)


@dataclass(eq=False)
class TrainResult:
    params: ModelParams
    history: list = field(default_factory=list)
    branch: str = "B"

    @property
    def trained(self):
        """The tensors this run updated."""
        return self.params.subset(BRANCH_PREFIXES[self.branch])


def sample_loss(model, which, pair, bound, seed, loss_cfg):
    aug = augment(pair, seed)
    if which == "B":
        pred = model.predict_b(aug.obs_b, bound)
        return loss(pred, aug.gt_b, loss_cfg, pair.sym_b)
    if which == "A":
        pred = model.predict_a(aug.obs_a, pair.cloud_b, bound)
        return loss(pred, aug.gt_a, loss_cfg, pair.sym_a)
    pred_a, pred_b = model.joint_forward(aug.obs_a, aug.obs_b, bound)
    return loss(pred_b, aug.gt_b, loss_cfg, pair.sym_b) + loss(pred_a, aug.gt_a, loss_cfg, pair.sym_a)


def train_branch(
    which,
    pairs,
    train_cfg: TrainConfig,
    loss_cfg: LossConfig,
    encoder_config: EncoderConfig = None,
    params: ModelParams = None,
) -> TrainResult:
    """Minimize the mean batch loss; returns params and per-epoch history.

    Only the tensors under the branch's prefixes change. ``params`` defaults
    to a fresh initialization seeded with ``train_cfg.seed``.
    """
    if which not in BRANCHES:
        raise ContractViolation(f"Unknown branch '{which}', expected one of {BRANCHES}")
    pairs = list(pairs)
    if not pairs:
        raise ContractViolation("cannot train on an empty dataset")
    variant = "joint" if which == "joint" else "two_step"
    if params is None:
        model = AssemblyModel(encoder_config or EncoderConfig(), variant)
        params = model.init_params(train_cfg.seed)
    else:
        model = AssemblyModel(params.config, variant)
        params = ModelParams(params.config, variant, dict(params.tensors))

    prefixes = BRANCH_PREFIXES[which]
    trainable = {n: params.tensors[n] for n in params.names(prefixes)}
    state = AdamState.fresh(trainable)
    history = []
    logger.info(
        f"Training branch {which} on {len(pairs)} pairs for {train_cfg.epochs} epochs "
        f"({len(trainable)} tensors)"
    )
    for epoch in range(train_cfg.epochs):
        order = np.random.default_rng([train_cfg.seed, epoch]).permutation(len(pairs))
        total = 0.0
        try:
            for start in range(0, len(order), train_cfg.batch_size):
                batch = order[start : start + train_cfg.batch_size]
                bound = params.variables(prefixes)
                for idx in batch:
                    value = sample_loss(
                        model, which, pairs[idx], bound, [train_cfg.seed, epoch, int(idx)], loss_cfg
                    )
                    total += value.item()
                    backward(value * (1.0 / len(batch)))
                grads = {n: v.grad for n, v in bound.items()}
                trainable, state = adam_step(trainable, grads, state, train_cfg)
                params.tensors.update(trainable)
        except NumericFault as e:
            logger.error(f"Diverged at epoch {epoch}", exc_info=True)
            raise DivergenceError(epoch, e) from e
        epoch_loss = total / len(pairs)
        if not np.isfinite(epoch_loss):
            raise DivergenceError(epoch, f"mean loss {epoch_loss}")
        history.append(epoch_loss)
        logger.debug(f"epoch {epoch}: loss {epoch_loss:.6g}")
        if (epoch + 1) % 10 == 0:
            logger.info(f"epoch {epoch + 1}/{train_cfg.epochs}: loss {epoch_loss:.6g}")
    return TrainResult(params, history, which)
