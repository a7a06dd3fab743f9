from collections import namedtuple

import numpy as np

from ..core.errors import ContractViolation
from ..geometry import PointCloud, RigidTransform, apply, random_rotation
from . import AssemblyPair

BASE_FRACTION = 0.02
GRAVITY_AXIS = {"xy": 2, "xz": 1}

Augmented = namedtuple("Augmented", "obs_a obs_b gt_a gt_b")


def base_center(points, rest_plane="xy"):
    """(lowest gravity coordinate, centroid of the base slab)."""
    g = GRAVITY_AXIS[rest_plane]
    h = points[:, g]
    lo = h.min()
    base = points[h <= lo + BASE_FRACTION * (h.max() - lo)]
    return lo, base.mean(axis=0)


def canonicalize(cloud: PointCloud, rest_plane="xy"):
    """Rest the lowest point on the plane and put the base center on the up axis."""
    if rest_plane not in GRAVITY_AXIS:
        raise ContractViolation(f"Unknown rest plane '{rest_plane}'")
    if cloud.valid_count < 1:
        raise ContractViolation("cannot canonicalize an empty cloud")
    g = GRAVITY_AXIS[rest_plane]
    lo, bc = base_center(cloud.valid, rest_plane)
    t = -bc
    t[g] = -lo
    transform = RigidTransform(np.eye(3), t)
    return apply(transform, cloud), transform


def _observe(cloud, rotation):
    """Rotate about the valid centroid and center; gt maps the result back."""
    c = cloud.valid.mean(axis=0)
    obs = cloud.with_points((cloud.points - c) @ rotation.T)
    return obs, RigidTransform(rotation.T, c)


def augment(pair: AssemblyPair, seed) -> Augmented:
    """Independent uniform rotations of A and B, each centered at its centroid."""
    rng = np.random.default_rng(seed)
    obs_a, gt_a = _observe(pair.cloud_a, random_rotation(rng))
    obs_b, gt_b = _observe(pair.cloud_b, random_rotation(rng))
    return Augmented(obs_a, obs_b, gt_a, gt_b)
