"""Scalar point layers for the non-equivariant encoders. Features are (N, C)."""

import numpy as np

from ..autodiff import ops
from ..core.errors import ContractViolation


def init_linear(rng, c_in, c_out):
    bound = np.sqrt(6.0 / (c_in + c_out))
    return rng.uniform(-bound, bound, size=(c_in, c_out)), np.zeros(c_out)


def linear(x, W, b):
    return ops.matmul(x, W) + b


def relu(x):
    return ops.relu(x)


def edge_conv(x, knn, W, b):
    """Edge features (x_i, x_j - x_i) -> linear -> relu -> max over j."""
    x = ops.as_variable(x)
    knn = np.asarray(knn)
    n, c = x.shape
    if knn.ndim != 2 or knn.shape[0] != n:
        raise ContractViolation(f"neighbor table {knn.shape} does not match {n} points")
    k = knn.shape[1]
    neighbors = ops.take(x, knn, axis=0)
    centers = ops.broadcast_to(ops.reshape(x, (n, 1, c)), (n, k, c))
    edges = ops.reshape(ops.concat([centers, neighbors - centers], axis=2), (n * k, 2 * c))
    h = relu(linear(edges, W, b))
    return ops.max(ops.reshape(h, (n, k, -1)), axis=1)
