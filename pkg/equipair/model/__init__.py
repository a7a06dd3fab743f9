"""Two-branch assembly network.

Branch B predicts the receiving object's canonical pose. Branch A predicts
the fitting object's pose from its own equivariant feature scaled channel by
channel with the invariant feature of B.

Parameter names live under five prefixes: ``b.enc``, ``b.head`` (branch B)
and ``a.enc``, ``a.inv``, ``a.head`` (branch A). Both variants use the same
set, so their parameter counts match.
"""

from dataclasses import asdict, dataclass, field, fields
from logging import getLogger

import numpy as np

from ..autodiff import Variable, ops
from ..core import config as global_config
from ..core.errors import ContractViolation
from ..geometry import PointCloud, RigidTransform, center, orthonormalize

logger = getLogger(__name__)

VARIANTS = ("two_step", "joint")
BRANCH_PREFIXES = {"B": ("b.",), "A": ("a.",), "joint": ("a.", "b.")}

# Gram-Schmidt columns are read as the canonical (z, x, y) axes seen from
# the input frame; rows of the rotation are therefore (e2, e3, e1).
AXIS_ORDER = [1, 2, 0]


@dataclass(frozen=True)
class EncoderConfig:
    kind: str = "vn_two_scale"
    k_small: int = 10
    k_large: int = 30
    widths: tuple = (32, 64, 128)
    depth: int = 2
    head_width: int = 64

    def __post_init__(self):
        object.__setattr__(self, "widths", tuple(int(w) for w in self.widths))
        if not 0 < self.k_small < self.k_large:
            raise ContractViolation(
                f"need 0 < k_small < k_large, got {self.k_small}, {self.k_large}"
            )
        if self.depth < 1:
            raise ContractViolation(f"depth must be positive, got {self.depth}")
        if len(self.widths) != self.depth + 1:
            raise ContractViolation(
                f"widths {self.widths} must list depth + 1 = {self.depth + 1} stages"
            )
        if min(self.widths) <= 0 or self.head_width <= 0:
            raise ContractViolation("widths must be positive")

    def to_dict(self):
        d = asdict(self)
        d["widths"] = list(self.widths)
        return d

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ContractViolation(f"Unknown encoder config keys: {sorted(unknown)}")
        return cls(**d)

    def first_difference(self, other):
        """Name of the first field that differs, or None."""
        for f in fields(self):
            if getattr(self, f.name) != getattr(other, f.name):
                return f.name
        return None


@dataclass(eq=False)
class ModelParams:
    config: EncoderConfig
    variant: str = "two_step"
    tensors: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ContractViolation(f"Unknown model variant '{self.variant}'")

    @property
    def count(self):
        return int(sum(t.size for t in self.tensors.values()))

    def names(self, prefixes=None):
        names = sorted(self.tensors)
        if prefixes is None:
            return names
        return [n for n in names if n.startswith(tuple(prefixes))]

    def subset(self, prefixes):
        return ModelParams(
            self.config, self.variant, {n: self.tensors[n] for n in self.names(prefixes)}
        )

    def merged(self, other: "ModelParams"):
        diff = self.config.first_difference(other.config)
        if diff:
            raise ContractViolation(f"encoder configs differ in '{diff}'")
        return ModelParams(self.config, self.variant, {**self.tensors, **other.tensors})

    def variables(self, prefixes=None, requires_grad=True):
        return {
            n: Variable(self.tensors[n], requires_grad=requires_grad, name=n)
            for n in self.names(prefixes)
        }


@dataclass(eq=False)
class PosePrediction:
    rotation: Variable
    translation: Variable
    t_hat: Variable
    v1: Variable
    v2: Variable

    @property
    def transform(self):
        return RigidTransform(self.rotation.value, self.translation.value)


def fuse(iB, eA):
    """Scale channel c of eA by iB[c], at every point."""
    iB, eA = ops.as_variable(iB), ops.as_variable(eA)
    c = eA.shape[0] if eA.ndim == 3 else eA.shape[-1]
    if iB.shape != (c,):
        raise ContractViolation(f"cannot fuse {iB.shape} invariants into {c} channels")
    if eA.ndim == 3:
        return ops.reshape(iB, (c, 1, 1)) * eA
    return eA * iB


def compose_pose(t_hat, v1, v2, centroid) -> PosePrediction:
    """Rotation from the two head vectors; T = R (t_hat - centroid)."""
    M = orthonormalize(v1, v2)
    R = ops.transpose(ops.take(M, AXIS_ORDER, axis=1))
    offset = ops.reshape(t_hat - centroid, (3, 1))
    T = ops.reshape(ops.matmul(R, offset), (3,))
    return PosePrediction(R, T, t_hat, v1, v2)


class AssemblyModel:
    def __init__(self, config: EncoderConfig, variant="two_step"):
        if variant not in VARIANTS:
            raise ContractViolation(f"Unknown model variant '{variant}'")
        self.config = config
        self.variant = variant
        self.encoder = global_config.get_encoder(config.kind, config)

    def init_params(self, seed=0) -> ModelParams:
        rng = np.random.default_rng(seed)
        enc = self.encoder
        tensors = {}
        tensors.update(enc.init_params(rng, "b.enc"))
        tensors.update(enc.init_head_params(rng, "b.head"))
        tensors.update(enc.init_params(rng, "a.enc"))
        tensors.update(enc.init_invariant_params(rng, "a.inv"))
        tensors.update(enc.init_head_params(rng, "a.head"))
        return ModelParams(self.config, self.variant, tensors)

    def encode(self, cloud: PointCloud, params, prefix):
        """Equivariant feature of the centered valid points, plus the centroid."""
        centered, centroid = center(cloud)
        return self.encoder.encode(centered.valid, params, prefix), centroid

    def pose_head(self, feature, params, prefix, centroid) -> PosePrediction:
        t_hat, v1, v2 = self.encoder.head(feature, params, prefix)
        return compose_pose(t_hat, v1, v2, centroid)

    def predict_b(self, cloud_b: PointCloud, params) -> PosePrediction:
        feature, centroid = self.encode(cloud_b, params, "b.enc")
        return self.pose_head(feature, params, "b.head", centroid)

    def invariant_b(self, cloud_b_canonical: PointCloud, params):
        feature, _ = self.encode(cloud_b_canonical, params, "a.enc")
        return self.encoder.invariant(feature, params, "a.inv")

    def predict_a(self, cloud_a: PointCloud, cloud_b_canonical: PointCloud, params) -> PosePrediction:
        i_b = self.invariant_b(cloud_b_canonical, params)
        e_a, centroid = self.encode(cloud_a, params, "a.enc")
        return self.pose_head(self.encoder.fuse(i_b, e_a), params, "a.head", centroid)

    def joint_forward(self, cloud_a: PointCloud, cloud_b: PointCloud, params):
        """Both poses in one graph; returns (pred_a, pred_b)."""
        e_b, c_b = self.encode(cloud_b, params, "b.enc")
        pred_b = self.pose_head(e_b, params, "b.head", c_b)
        i_b = self.encoder.invariant(e_b, params, "a.inv")
        e_a, c_a = self.encode(cloud_a, params, "a.enc")
        pred_a = self.pose_head(self.encoder.fuse(i_b, e_a), params, "a.head", c_a)
        return pred_a, pred_b
