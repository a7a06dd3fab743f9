from .vn import (
    init_weight,
    lift,
    vn_edge_conv,
    vn_invariant,
    vn_linear,
    vn_pool,
    vn_relu,
)

__all__ = [
    "init_weight",
    "lift",
    "vn_edge_conv",
    "vn_invariant",
    "vn_linear",
    "vn_pool",
    "vn_relu",
]
