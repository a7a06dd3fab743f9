import abc
from logging import getLogger

from ..autodiff import ops
from ..core.errors import ContractViolation
from ..geometry import PointCloud
from ..geometry.knn import knn_indices
from ..layers.vn import (
    init_weight,
    lift,
    vn_edge_conv,
    vn_invariant,
    vn_linear,
    vn_relu,
)
from . import EncoderBase

logger = getLogger(__name__)


class _VNEncoder(EncoderBase):
    """Vector-neuron DGCNN stacks over one or more static KNN graphs.

    Each stack runs ``depth`` edge convolutions; stack outputs are
    concatenated and mixed by one more vn_linear + vn_relu.
    """

    equivariant = True

    @abc.abstractmethod
    def _get_scales(self):
        """Ordered mapping scale name -> k."""

    def init_params(self, rng, prefix):
        cfg = self.config
        out = {}
        for scale in self.scales:
            c_in = 1
            for i in range(cfg.depth):
                c_out = cfg.widths[i]
                out[f"{prefix}.{scale}.conv{i}.W"] = init_weight(rng, c_out, 2 * c_in)
                out[f"{prefix}.{scale}.conv{i}.U"] = init_weight(rng, c_out, c_out)
                c_in = c_out
        c_mix = cfg.widths[cfg.depth]
        out[f"{prefix}.mix.W"] = init_weight(
            rng, c_mix, cfg.widths[cfg.depth - 1] * len(self.scales)
        )
        out[f"{prefix}.mix.U"] = init_weight(rng, c_mix, c_mix)
        return out

    def encode(self, points, params, prefix):
        cloud = PointCloud(points)
        f0 = lift(cloud)
        # smaller graphs are prefixes of the largest one
        table = knn_indices(cloud, max(self.scales.values()))
        stacks = []
        for scale, k in self.scales.items():
            f, knn = f0, table[:, :k]
            for i in range(self.config.depth):
                f = vn_edge_conv(
                    f,
                    knn,
                    params[f"{prefix}.{scale}.conv{i}.W"],
                    params[f"{prefix}.{scale}.conv{i}.U"],
                )
            stacks.append(f)
        f = ops.concat(stacks, axis=0)
        return vn_relu(vn_linear(f, params[f"{prefix}.mix.W"]), params[f"{prefix}.mix.U"])

    def init_invariant_params(self, rng, prefix):
        return {f"{prefix}.frame": init_weight(rng, 3, self.out_channels)}

    def invariant(self, feature, params, prefix):
        return vn_invariant(feature, params[f"{prefix}.frame"])

    def init_head_params(self, rng, prefix):
        c, h = self.out_channels, self.config.head_width
        out = {}
        for name, n_out in (("trans", 1), ("rot", 2)):
            out[f"{prefix}.{name}.W0"] = init_weight(rng, h, c)
            out[f"{prefix}.{name}.U0"] = init_weight(rng, h, h)
            out[f"{prefix}.{name}.W1"] = init_weight(rng, n_out, h)
        return out

    def _mlp(self, feature, params, prefix):
        h = vn_relu(vn_linear(feature, params[f"{prefix}.W0"]), params[f"{prefix}.U0"])
        return ops.mean(vn_linear(h, params[f"{prefix}.W1"]), axis=-1)

    def head(self, feature, params, prefix):
        t_hat = ops.reshape(self._mlp(feature, params, f"{prefix}.trans"), (3,))
        r = self._mlp(feature, params, f"{prefix}.rot")
        return t_hat, r[0], r[1]

    def fuse(self, invariant, feature):
        c = feature.shape[0]
        if invariant.shape != (c,):
            raise ContractViolation(
                f"cannot fuse {invariant.shape} invariants into {c} vector channels"
            )
        return ops.reshape(invariant, (c, 1, 1)) * feature


class TwoScaleVNEncoder(_VNEncoder):
    def _get_scales(self):
        return {"small": self.config.k_small, "large": self.config.k_large}


class SingleScaleVNEncoder(_VNEncoder):
    def _get_scales(self):
        return {"large": self.config.k_large}


def encode_two_scale(cloud, cfg, params, prefix="enc", inv_prefix="inv"):
    """(E, I) of a centered cloud: (C, 3, M) equivariant and (C,) invariant."""
    encoder = TwoScaleVNEncoder(cfg)
    points = cloud.valid if isinstance(cloud, PointCloud) else cloud
    feature = encoder.encode(points, params, prefix)
    return feature, encoder.invariant(feature, params, inv_prefix)
