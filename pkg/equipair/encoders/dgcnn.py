"""Non-equivariant encoders over scalar (N, C) point features."""

from ..autodiff import Variable, ops
from ..core.errors import ContractViolation
from ..geometry import PointCloud
from ..geometry.knn import knn_indices
from ..layers.plain import edge_conv, init_linear, linear, relu
from . import EncoderBase


class ScalarEncoderBase(EncoderBase):
    """Invariant map, pose heads and fusion shared by the scalar encoders."""

    def init_invariant_params(self, rng, prefix):
        W, b = init_linear(rng, self.out_channels, self.out_channels)
        return {f"{prefix}.W": W, f"{prefix}.b": b}

    def invariant(self, feature, params, prefix):
        h = relu(linear(feature, params[f"{prefix}.W"], params[f"{prefix}.b"]))
        return ops.mean(h, axis=0)

    def init_head_params(self, rng, prefix):
        c, h = self.out_channels, self.config.head_width
        out = {}
        for name, n_out in (("trans", 3), ("rot", 6)):
            out[f"{prefix}.{name}.W0"], out[f"{prefix}.{name}.b0"] = init_linear(rng, c, h)
            out[f"{prefix}.{name}.W1"], out[f"{prefix}.{name}.b1"] = init_linear(rng, h, n_out)
        return out

    def _mlp(self, feature, params, prefix):
        h = relu(linear(feature, params[f"{prefix}.W0"], params[f"{prefix}.b0"]))
        return ops.mean(linear(h, params[f"{prefix}.W1"], params[f"{prefix}.b1"]), axis=0)

    def head(self, feature, params, prefix):
        t_hat = self._mlp(feature, params, f"{prefix}.trans")
        r = self._mlp(feature, params, f"{prefix}.rot")
        return t_hat, r[0:3], r[3:6]

    def fuse(self, invariant, feature):
        c = feature.shape[1]
        if invariant.shape != (c,):
            raise ContractViolation(
                f"cannot fuse {invariant.shape} invariants into {c} channels"
            )
        return feature * invariant


class EdgeConvEncoder(ScalarEncoderBase):
    """DGCNN-style edge convolutions on one static graph of k_large neighbors."""

    def init_params(self, rng, prefix):
        cfg = self.config
        out = {}
        c_in = 3
        for i in range(cfg.depth):
            out[f"{prefix}.conv{i}.W"], out[f"{prefix}.conv{i}.b"] = init_linear(
                rng, 2 * c_in, cfg.widths[i]
            )
            c_in = cfg.widths[i]
        out[f"{prefix}.mix.W"], out[f"{prefix}.mix.b"] = init_linear(
            rng, c_in, cfg.widths[cfg.depth]
        )
        return out

    def encode(self, points, params, prefix):
        cloud = PointCloud(points)
        knn = knn_indices(cloud, self.config.k_large)
        x = Variable.constant(cloud.points)
        for i in range(self.config.depth):
            x = edge_conv(x, knn, params[f"{prefix}.conv{i}.W"], params[f"{prefix}.conv{i}.b"])
        return relu(linear(x, params[f"{prefix}.mix.W"], params[f"{prefix}.mix.b"]))


def baseline_encoder(cloud, cfg, params, prefix="enc"):
    """(M, C) scalar features of a centered cloud; not rotation-equivariant."""
    points = cloud.valid if isinstance(cloud, PointCloud) else cloud
    return EdgeConvEncoder(cfg).encode(points, params, prefix)
