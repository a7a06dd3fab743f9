from dataclasses import dataclass, field

import numpy as np

from ..core.errors import ContractViolation
from ..geometry import PointCloud, SymmetryGroup

REST_PLANES = ("xy", "xz")
GLOBAL_SCALE = 3.0
NUM_POINTS = 1024


@dataclass(eq=False)
class TriMesh:
    vertices: np.ndarray
    triangles: np.ndarray

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        self.triangles = np.asarray(self.triangles, dtype=np.intp).reshape(-1, 3)
        if self.triangles.size and (
            self.triangles.min() < 0 or self.triangles.max() >= len(self.vertices)
        ):
            raise ContractViolation("triangle index out of range")

    def areas(self):
        a, b, c = (self.vertices[self.triangles[:, i]] for i in range(3))
        return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)

    @property
    def total_area(self):
        return float(self.areas().sum()) if len(self.triangles) else 0.0

    def transformed(self, scale=1.0, offset=(0.0, 0.0, 0.0)):
        return TriMesh(self.vertices * scale + np.asarray(offset), self.triangles)


def merge_meshes(meshes):
    vertices, triangles, base = [], [], 0
    for m in meshes:
        vertices.append(m.vertices)
        triangles.append(m.triangles + base)
        base += len(m.vertices)
    return TriMesh(np.concatenate(vertices), np.concatenate(triangles))


@dataclass(eq=False)
class AssemblyPair:
    """Both objects in their canonical (assembled) pose."""

    pair_id: str
    task: str
    cloud_a: PointCloud
    cloud_b: PointCloud
    sym_a: SymmetryGroup = field(default_factory=SymmetryGroup)
    sym_b: SymmetryGroup = field(default_factory=SymmetryGroup)
    meta: dict = field(default_factory=dict)


@dataclass
class DatasetManifest:
    task: str
    rest_plane: str = "xy"
    global_scale: float = GLOBAL_SCALE
    train: list = field(default_factory=list)
    test: list = field(default_factory=list)
    num_points: int = NUM_POINTS
    pair_tasks: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.rest_plane not in REST_PLANES:
            raise ContractViolation(f"Unknown rest plane '{self.rest_plane}'")

    def task_of(self, pair_id):
        return self.pair_tasks.get(pair_id, self.task)

    def to_dict(self):
        return {
            "task": self.task,
            "rest_plane": self.rest_plane,
            "global_scale": self.global_scale,
            "num_points": self.num_points,
            "train": list(self.train),
            "test": list(self.test),
            "pair_tasks": dict(self.pair_tasks),
        }


class Dataset:
    """Manifest plus lazily loaded pairs of a dataset directory."""

    def __init__(self, root, manifest: DatasetManifest):
        self.root = root
        self.manifest = manifest
        self._pairs = {}

    def pair(self, pair_id) -> AssemblyPair:
        if pair_id not in self._pairs:
            from .io import load_pair
            from ..core import file_manager

            self._pairs[pair_id] = load_pair(
                file_manager.pair_dir(self.root, pair_id),
                task=self.manifest.task_of(pair_id),
                num_points=self.manifest.num_points,
            )
        return self._pairs[pair_id]

    def split(self, name):
        ids = {"train": self.manifest.train, "test": self.manifest.test}[name]
        return [self.pair(i) for i in ids]
