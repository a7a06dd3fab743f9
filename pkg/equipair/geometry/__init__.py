"""Rigid-body types and transforms."""

from dataclasses import dataclass, field
from logging import getLogger

import numpy as np
from scipy.spatial.transform import Rotation

from ..autodiff import Variable, ops
from ..core.errors import ContractViolation

logger = getLogger(__name__)

AXES = {"x": 0, "y": 1, "z": 2}
ROTATION_TOL = 1e-9
DEGENERATE_ANGLE = 1e-6


def check_rotation(R, tol=ROTATION_TOL, what="rotation"):
    R = np.asarray(R, dtype=np.float64)
    if R.shape != (3, 3):
        raise ContractViolation(f"{what} must be 3x3, got {R.shape}")
    if not np.all(np.isfinite(R)):
        raise ContractViolation(f"{what} has non-finite entries")
    if np.max(np.abs(R.T @ R - np.eye(3))) > tol:
        raise ContractViolation(f"{what} is not orthonormal:\n{R}")
    if abs(np.linalg.det(R) - 1.0) > tol:
        raise ContractViolation(f"{what} has det {np.linalg.det(R)} != +1")
    return R


@dataclass(eq=False)
class PointCloud:
    """N x 3 points; rows at and past ``valid_count`` are padding."""

    points: np.ndarray
    valid_count: int = None

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64)
        if self.points.ndim != 2 or self.points.shape[1] != 3:
            raise ContractViolation(f"points must be N x 3, got {self.points.shape}")
        n = len(self.points)
        if self.valid_count is None:
            self.valid_count = n
        self.valid_count = int(self.valid_count)
        if not 0 <= self.valid_count <= n:
            raise ContractViolation(
                f"valid_count {self.valid_count} outside [0, {n}]"
            )

    def __len__(self):
        return len(self.points)

    @property
    def valid(self):
        return self.points[: self.valid_count]

    def with_points(self, points):
        return PointCloud(points, self.valid_count)


@dataclass(eq=False)
class RigidTransform:
    """p -> R p + T."""

    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.rotation = check_rotation(self.rotation)
        self.translation = np.asarray(self.translation, dtype=np.float64).reshape(-1)
        if self.translation.shape != (3,):
            raise ContractViolation(
                f"translation must be a 3-vector, got {self.translation.shape}"
            )

    @classmethod
    def identity(cls):
        return cls(np.eye(3), np.zeros(3))

    def compose(self, other: "RigidTransform") -> "RigidTransform":
        """self after other."""
        return RigidTransform(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation,
        )

    def inverse(self) -> "RigidTransform":
        Rt = self.rotation.T
        return RigidTransform(Rt, -Rt @ self.translation)

    def apply_points(self, points):
        return np.asarray(points) @ self.rotation.T + self.translation

    @property
    def matrix(self):
        m = np.eye(4)
        m[:3, :3] = self.rotation
        m[:3, 3] = self.translation
        return m

    def allclose(self, other, atol=1e-9):
        return np.allclose(self.rotation, other.rotation, atol=atol) and np.allclose(
            self.translation, other.translation, atol=atol
        )


@dataclass(eq=False)
class SymmetryGroup:
    """Rotations leaving an object's appearance unchanged.

    ``continuous_axis`` names the axis of full rotational symmetry, if any.
    ``finite`` always starts with the identity.
    """

    continuous_axis: str = None
    finite: tuple = ()

    def __post_init__(self):
        if self.continuous_axis is not None and self.continuous_axis not in AXES:
            raise ContractViolation(f"Unknown symmetry axis '{self.continuous_axis}'")
        elements = [np.eye(3)]
        for F in self.finite:
            F = check_rotation(F, tol=1e-6, what="symmetry element")
            if not any(np.allclose(F, E, atol=1e-9) for E in elements):
                elements.append(F)
        self.finite = tuple(elements)
        if self.continuous_axis is not None:
            u = self.axis_vector
            for F in self.finite:
                if abs(abs(u @ F @ u) - 1.0) > 1e-6:
                    raise ContractViolation(
                        f"finite symmetry element does not preserve the {self.continuous_axis} axis"
                    )

    @classmethod
    def generated(cls, generators, continuous_axis=None, tol=1e-9):
        """Closure of ``generators`` under composition."""
        elements = [np.eye(3)]
        queue = [check_rotation(G, tol=1e-6, what="symmetry generator") for G in generators]
        while queue:
            G = queue.pop(0)
            if any(np.allclose(G, E, atol=tol) for E in elements):
                continue
            elements.append(G)
            if len(elements) > 720:
                raise ContractViolation("symmetry generators do not close to a finite group")
            for E in list(elements):
                queue.append(G @ E)
                queue.append(E @ G)
        return cls(continuous_axis, tuple(elements))

    @property
    def continuous_z(self):
        return self.continuous_axis == "z"

    @property
    def axis_vector(self):
        u = np.zeros(3)
        u[AXES[self.continuous_axis]] = 1.0
        return u

    def is_closed(self, tol=1e-6):
        for A in self.finite:
            for B in self.finite:
                if not any(np.allclose(A @ B, E, atol=tol) for E in self.finite):
                    return False
        return True

    def same_as(self, other):
        return (
            self.continuous_axis == other.continuous_axis
            and len(self.finite) == len(other.finite)
            and all(np.array_equal(a, b) for a, b in zip(self.finite, other.finite))
        )


def axis_rotation(axis, angle):
    """Rotation by ``angle`` radians about a unit axis (name or vector)."""
    if isinstance(axis, str):
        v = np.zeros(3)
        v[AXES[axis]] = 1.0
        axis = v
    axis = np.asarray(axis, dtype=np.float64)
    return Rotation.from_rotvec(axis / np.linalg.norm(axis) * angle).as_matrix()


def center(cloud: PointCloud):
    """Translate the valid centroid to the origin; returns (cloud, centroid)."""
    if cloud.valid_count < 1:
        raise ContractViolation("cannot center an empty cloud")
    centroid = cloud.valid.mean(axis=0)
    return cloud.with_points(cloud.points - centroid), centroid


def apply(transform: RigidTransform, cloud: PointCloud) -> PointCloud:
    return cloud.with_points(transform.apply_points(cloud.points))


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_rotation(seed=None):
    """Uniform sample on SO(3) from a normalized Gaussian quaternion."""
    return Rotation.random(None, _rng(seed)).as_matrix()


def orthonormalize(v1, v2):
    """Gram-Schmidt frame with columns (e1, e2, e1 x e2).

    Accepts arrays or Variables; returns the same kind.
    """
    plain = not isinstance(v1, Variable) and not isinstance(v2, Variable)
    a = np.asarray(v1.value if isinstance(v1, Variable) else v1, dtype=np.float64)
    b = np.asarray(v2.value if isinstance(v2, Variable) else v2, dtype=np.float64)
    if a.shape != (3,) or b.shape != (3,):
        raise ContractViolation(f"orthonormalize needs two 3-vectors: {a.shape}, {b.shape}")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na < 1e-12 or nb < 1e-12:
        raise ContractViolation(f"degenerate frame vectors v1={a} v2={b}: zero length")
    sin = np.linalg.norm(np.cross(a, b)) / (na * nb)
    if sin <= DEGENERATE_ANGLE:
        raise ContractViolation(f"degenerate frame vectors v1={a} v2={b}: parallel")

    v1, v2 = ops.as_variable(v1), ops.as_variable(v2)
    e1 = v1 / ops.norm(v1)
    u = v2 - ops.sum(v2 * e1) * e1
    e2 = u / ops.norm(u)
    e3 = ops.cross(e1, e2)
    M = ops.stack([e1, e2, e3], axis=1)
    return M.value if plain else M


def relative_pose(pose_a: RigidTransform, pose_b: RigidTransform) -> RigidTransform:
    """A's placement expressed in B's body frame."""
    return pose_b.inverse().compose(pose_a)
