"""Vector-neuron layers.

Features are (C, 3, N) Variables, or (C, 3, N, k) over a neighbor axis. Every
layer commutes with rotating all 3-vectors, so stacks of them are exactly
SO(3)-equivariant.
"""

from logging import getLogger

import numpy as np

from ..autodiff import Variable, ops
from ..core.errors import ContractViolation
from ..geometry import PointCloud

logger = getLogger(__name__)

CENTERED_TOL = 1e-6


def init_weight(rng, c_out, c_in):
    bound = np.sqrt(6.0 / (c_in + c_out))
    return rng.uniform(-bound, bound, size=(c_out, c_in))


def lift(cloud) -> Variable:
    """(N, 3) centered points -> (1, 3, N) constant feature."""
    if isinstance(cloud, PointCloud):
        points, valid = cloud.points, cloud.valid
    else:
        points = valid = np.asarray(cloud, dtype=np.float64)
    if len(valid) and np.linalg.norm(valid.mean(axis=0)) > CENTERED_TOL:
        raise ContractViolation(
            f"lift needs a centered cloud, centroid is {valid.mean(axis=0)}"
        )
    return Variable.constant(points.T[None])


def vn_linear(f, W) -> Variable:
    """out[c', :, ...] = sum_c W[c', c] f[c, :, ...]; no bias."""
    f, W = ops.as_variable(f), ops.as_variable(W)
    if W.ndim != 2 or W.shape[1] != f.shape[0]:
        raise ContractViolation(
            f"vn_linear weight {W.shape} does not take {f.shape[0]} channels"
        )
    flat = ops.reshape(f, (f.shape[0], -1))
    return ops.reshape(ops.matmul(W, flat), (W.shape[0],) + f.shape[1:])


def vn_relu(f, U) -> Variable:
    """Keep the half-space <v, k> >= 0 of the learned direction k = U f."""
    f = ops.as_variable(f)
    k = vn_linear(f, U)
    if k.shape != f.shape:
        raise ContractViolation(f"vn_relu direction weights must map C -> C, got {U.shape}")
    dot = ops.sum(f * k, axis=1, keepdims=True)
    kk = ops.sum(k * k, axis=1, keepdims=True)
    # k = 0 passes v through: coef is 0 there
    coef = ops.minimum(dot, 0.0) / ops.where(kk.value > 0, kk, 1.0)
    return f - coef * k


def vn_pool(f, mode="max", axis="points") -> Variable:
    """Pool the last axis (neighbors of a (C,3,N,k) or points of a (C,3,N) feature).

    max keeps, per channel, the vector with the largest inner product against
    the mean of the pooled set; the index is shared by the three components.
    """
    f = ops.as_variable(f)
    expected = {"neighbors": 4, "points": 3}
    if axis not in expected:
        raise ContractViolation(f"Unknown pooling axis '{axis}'")
    if f.ndim != expected[axis]:
        raise ContractViolation(
            f"pooling over {axis} needs a {expected[axis]}-D feature, got {f.shape}"
        )
    if mode == "mean":
        return ops.mean(f, axis=-1)
    if mode != "max":
        raise ContractViolation(f"Unknown pooling mode '{mode}'")
    direction = f.value.mean(axis=-1, keepdims=True)
    scores = np.sum(f.value * direction, axis=1, keepdims=True)
    idx = np.argmax(scores, axis=-1)[..., None]
    idx = np.broadcast_to(idx, f.shape[:-1] + (1,))
    picked = ops.take_along_axis(f, idx, axis=-1)
    return ops.reshape(picked, f.shape[:-1])


def vn_invariant(f, W_frame) -> Variable:
    """(C, 3, N) -> (C,) rotation-invariant scalars.

    A per-point frame of three equivariant directions comes from
    vn_linear(C -> 3); each channel is projected onto the frame, the three
    projections summed, then averaged over points.
    """
    f = ops.as_variable(f)
    if ops.as_variable(W_frame).shape[0] != 3:
        raise ContractViolation(f"frame weights must produce 3 channels, got {W_frame.shape}")
    frame = vn_linear(f, W_frame)
    frame_sum = ops.sum(frame, axis=0, keepdims=True)
    per_point = ops.sum(f * frame_sum, axis=1)
    return ops.mean(per_point, axis=-1)


def vn_edge_conv(f, knn, W, U) -> Variable:
    """Edge features (f_i, f_j - f_i) -> vn_linear -> vn_relu -> max over j."""
    f = ops.as_variable(f)
    knn = np.asarray(knn)
    c, _, n = f.shape
    if knn.ndim != 2 or knn.shape[0] != n:
        raise ContractViolation(
            f"neighbor table {knn.shape} does not match {n} points"
        )
    k = knn.shape[1]
    neighbors = ops.take(f, knn, axis=2)
    centers = ops.broadcast_to(ops.reshape(f, (c, 3, n, 1)), (c, 3, n, k))
    edges = ops.concat([centers, neighbors - centers], axis=0)
    h = vn_relu(vn_linear(edges, W), U)
    return vn_pool(h, "max", "neighbors")
