from ..autodiff import Variable
from ..layers.plain import init_linear, linear, relu
from .dgcnn import ScalarEncoderBase


class PointNetEncoder(ScalarEncoderBase):
    """Shared per-point MLP, no neighborhood graph."""

    def init_params(self, rng, prefix):
        cfg = self.config
        out = {}
        c_in = 3
        for i, c_out in enumerate(cfg.widths[: cfg.depth + 1]):
            out[f"{prefix}.fc{i}.W"], out[f"{prefix}.fc{i}.b"] = init_linear(rng, c_in, c_out)
            c_in = c_out
        return out

    def encode(self, points, params, prefix):
        x = Variable.constant(points)
        for i in range(self.config.depth + 1):
            x = relu(linear(x, params[f"{prefix}.fc{i}.W"], params[f"{prefix}.fc{i}.b"]))
        return x
