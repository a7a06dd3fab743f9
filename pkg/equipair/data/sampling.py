"""Blue-noise surface sampling and padding."""

from logging import getLogger
from math import floor

import numpy as np

from ..core.errors import ContractViolation
from ..geometry import PointCloud
from . import NUM_POINTS, TriMesh

logger = getLogger(__name__)

RELAXATION = 0.9
TRIALS_PER_TARGET = 4
MAX_ROUNDS = 200


def sample_surface(mesh: TriMesh, count, rng):
    """Area-weighted uniform points on the mesh surface."""
    areas = mesh.areas()
    face = rng.choice(len(areas), size=count, p=areas / areas.sum())
    r1 = np.sqrt(rng.random(count))
    r2 = rng.random(count)
    a, b, c = (mesh.vertices[mesh.triangles[face, i]] for i in range(3))
    return (
        (1.0 - r1)[:, None] * a
        + (r1 * (1.0 - r2))[:, None] * b
        + (r1 * r2)[:, None] * c
    )


class _HashGrid:
    def __init__(self, radius):
        self.radius = radius
        self.r2 = radius * radius
        self.cells = {}

    def key(self, p):
        s = self.radius
        return (floor(p[0] / s), floor(p[1] / s), floor(p[2] / s))

    def fits(self, p):
        i, j, k = self.key(p)
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                for dk in (-1, 0, 1):
                    for q in self.cells.get((i + di, j + dj, k + dk), ()):
                        dx, dy, dz = p[0] - q[0], p[1] - q[1], p[2] - q[2]
                        if dx * dx + dy * dy + dz * dz < self.r2:
                            return False
        return True

    def add(self, p):
        self.cells.setdefault(self.key(p), []).append(p)


def dart_throw(mesh: TriMesh, target, rng):
    """Accepted points (at least ``target``) and the final radius.

    Starts at r = sqrt(area / target) and shrinks r by RELAXATION each round,
    keeping points accepted at larger radii.
    """
    area = mesh.total_area
    if not area > 0:
        raise ContractViolation("cannot sample a mesh with zero surface area")
    radius = np.sqrt(area / target)
    accepted = []
    for round_ in range(MAX_ROUNDS):
        grid = _HashGrid(radius)
        for p in accepted:
            grid.add(p)
        for p in sample_surface(mesh, TRIALS_PER_TARGET * target, rng).tolist():
            if grid.fits(p):
                grid.add(p)
                accepted.append(p)
        logger.debug(f"round {round_}: r={radius:.5g}, accepted {len(accepted)}")
        if len(accepted) >= target:
            return np.array(accepted), radius
        radius *= RELAXATION
    raise ContractViolation(
        f"dart throwing stalled at {len(accepted)} of {target} points"
    )


def poisson_disk_sample(mesh: TriMesh, target=NUM_POINTS, seed=0, return_radius=False):
    """Exactly ``target`` blue-noise surface points."""
    if target < 1:
        raise ContractViolation(f"target must be positive, got {target}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    points, radius = dart_throw(mesh, target, rng)
    if len(points) > target:
        keep = np.sort(rng.choice(len(points), size=target, replace=False))
        points = points[keep]
    cloud = PointCloud(points)
    return (cloud, radius) if return_radius else cloud


def pad_cloud(points, target=NUM_POINTS) -> PointCloud:
    """Fill rows M..target by cycling the real points."""
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    m = len(points)
    if not 1 <= m <= target:
        raise ContractViolation(f"cannot pad {m} points to {target}")
    return PointCloud(points[np.arange(target) % m], m)
