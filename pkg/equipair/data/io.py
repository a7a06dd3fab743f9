"""Text formats: .xyz clouds, symmetry JSON, manifest.json and OFF meshes."""

import json
import os
from logging import getLogger

import numpy as np

from ..core import file_manager
from ..core.errors import ContractViolation, LoadError
from ..geometry import AXES, PointCloud, SymmetryGroup, axis_rotation
from . import AssemblyPair, Dataset, DatasetManifest, TriMesh
from .sampling import pad_cloud

logger = getLogger(__name__)

SYMMETRY_KEYS = ("rotational_axes", "mirror_axes", "finite_rotational", "elements")


# clouds


def save_xyz(path, cloud: PointCloud):
    """Header with the count, then the valid rows at 17 significant digits."""
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{cloud.valid_count}\n")
        for x, y, z in cloud.valid:
            f.write(f"{x:.17g} {y:.17g} {z:.17g}\n")


def load_xyz(path, num_points=None) -> PointCloud:
    with open(path, "r", encoding="utf-8") as f:
        lines = f.read().splitlines()
    if not lines:
        raise LoadError("empty file", path, 1)
    try:
        n = int(lines[0].strip())
    except ValueError:
        raise LoadError(f"expected a point count, got {lines[0]!r}", path, 1) from None
    if n < 1:
        raise LoadError(f"point count must be positive, got {n}", path, 1)
    body = [(i, line) for i, line in enumerate(lines[1:], start=2) if line.strip()]
    if len(body) != n:
        raise LoadError(f"header says {n} points, found {len(body)}", path)
    points = np.empty((n, 3))
    for row, (lineno, line) in enumerate(body):
        parts = line.split()
        if len(parts) != 3:
            raise LoadError(f"expected 'x y z', got {line!r}", path, lineno)
        try:
            points[row] = [float(p) for p in parts]
        except ValueError:
            raise LoadError(f"malformed coordinate in {line!r}", path, lineno) from None
        if not np.all(np.isfinite(points[row])):
            raise LoadError(f"non-finite coordinate in {line!r}", path, lineno)
    if num_points is None:
        return PointCloud(points)
    if n > num_points:
        raise LoadError(f"{n} points exceed the {num_points} row limit", path)
    return pad_cloud(points, num_points)


# symmetry annotations


def _line_of(text, token):
    for i, line in enumerate(text.splitlines(), start=1):
        if token in line:
            return i
    return None


def _axis_name(value, path, text):
    if value not in AXES:
        raise LoadError(f"unknown axis {value!r}", path, _line_of(text, json.dumps(value)))
    return value


def parse_symmetry(doc, path="", text="") -> SymmetryGroup:
    if not isinstance(doc, dict):
        raise LoadError("symmetry annotation must be a JSON object", path, 1)
    for key in doc:
        if key not in SYMMETRY_KEYS:
            raise LoadError(
                f"unknown symmetry key {key!r}", path, _line_of(text, f'"{key}"')
            )

    continuous = [_axis_name(a, path, text) for a in doc.get("rotational_axes", [])]
    if len(set(continuous)) > 1:
        raise LoadError(
            "at most one continuous rotational axis is supported",
            path,
            _line_of(text, '"rotational_axes"'),
        )

    generators = []
    for a in doc.get("mirror_axes", []):
        generators.append(axis_rotation(_axis_name(a, path, text), np.pi))

    finite = doc.get("finite_rotational", [])
    if isinstance(finite, dict):
        finite = [finite]
    for entry in finite:
        line = _line_of(text, '"finite_rotational"')
        try:
            axis, order = entry["axis"], int(entry["order"])
        except (KeyError, TypeError, ValueError):
            raise LoadError(f"finite_rotational needs {{axis, order}}, got {entry!r}", path, line) from None
        if order < 1:
            raise LoadError(f"rotation order must be positive, got {order}", path, line)
        generators.append(axis_rotation(_axis_name(axis, path, text), 2 * np.pi / order))

    for element in doc.get("elements", []):
        line = _line_of(text, '"elements"')
        try:
            E = np.array(element, dtype=np.float64)
        except (TypeError, ValueError):
            raise LoadError(f"malformed symmetry element {element!r}", path, line) from None
        if E.shape != (3, 3):
            raise LoadError(f"symmetry element must be 3x3, got {E.shape}", path, line)
        det = np.linalg.det(E)
        if det < 0:
            raise LoadError(
                f"improper symmetry element (det {det:.6g}); use a pi rotation instead",
                path,
                line,
            )
        if np.max(np.abs(E.T @ E - np.eye(3))) > 1e-6:
            raise LoadError("symmetry element is not a rotation", path, line)
        generators.append(E)

    try:
        return SymmetryGroup.generated(generators, continuous[0] if continuous else None)
    except ContractViolation as e:
        raise LoadError(str(e), path) from None


def symmetry_to_dict(sym: SymmetryGroup):
    return {
        "rotational_axes": [sym.continuous_axis] if sym.continuous_axis else [],
        "elements": [E.tolist() for E in sym.finite],
    }


def save_symmetry(path, sym: SymmetryGroup):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(symmetry_to_dict(sym), f, indent=4)
        f.write("\n")


def load_symmetry(path) -> SymmetryGroup:
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise LoadError(f"not valid JSON: {e.msg}", path, e.lineno) from None
    return parse_symmetry(doc, path, text)


# meshes


def load_off(path) -> TriMesh:
    """OFF reader; polygon faces are fan-triangulated."""
    with open(path, "r", encoding="utf-8") as f:
        raw = f.read().splitlines()
    lines = []
    for i, line in enumerate(raw, start=1):
        line = line.split("#", 1)[0].strip()
        if line:
            lines.append((i, line.split()))
    if not lines or not lines[0][1][0].endswith("OFF"):
        raise LoadError("missing OFF header", path, lines[0][0] if lines else 1)
    header_line, header = lines.pop(0)
    counts = header[1:]
    if not counts:
        if not lines:
            raise LoadError("missing vertex/face counts", path, header_line)
        header_line, counts = lines.pop(0)
    try:
        n_vertices, n_faces = int(counts[0]), int(counts[1])
    except (IndexError, ValueError):
        raise LoadError(f"malformed counts {' '.join(counts)!r}", path, header_line) from None

    if len(lines) < n_vertices + n_faces:
        raise LoadError(
            f"expected {n_vertices} vertices and {n_faces} faces, file ends early",
            path,
            len(raw),
        )
    vertices = np.empty((n_vertices, 3))
    for row in range(n_vertices):
        lineno, parts = lines[row]
        if len(parts) < 3:
            raise LoadError(f"vertex needs 3 coordinates, got {len(parts)}", path, lineno)
        try:
            vertices[row] = [float(p) for p in parts[:3]]
        except ValueError:
            raise LoadError(f"malformed vertex {' '.join(parts)!r}", path, lineno) from None

    triangles = []
    for lineno, parts in lines[n_vertices : n_vertices + n_faces]:
        try:
            k = int(parts[0])
            idx = [int(p) for p in parts[1 : 1 + k]]
        except ValueError:
            raise LoadError(f"malformed face {' '.join(parts)!r}", path, lineno) from None
        if k < 3 or len(idx) != k:
            raise LoadError("face needs at least 3 vertex indices", path, lineno)
        if min(idx) < 0 or max(idx) >= n_vertices:
            raise LoadError(f"face index out of range [0, {n_vertices})", path, lineno)
        for j in range(1, k - 1):
            triangles.append((idx[0], idx[j], idx[j + 1]))
    return TriMesh(vertices, np.array(triangles, dtype=np.intp).reshape(-1, 3))


# pairs and datasets


def save_pair(pair: AssemblyPair, path):
    file_manager.ensure_dir(path)
    save_xyz(os.path.join(path, "A.xyz"), pair.cloud_a)
    save_xyz(os.path.join(path, "B.xyz"), pair.cloud_b)
    save_symmetry(os.path.join(path, "A.json"), pair.sym_a)
    save_symmetry(os.path.join(path, "B.json"), pair.sym_b)


def load_pair(path, task="", num_points=None) -> AssemblyPair:
    for name in ("A.xyz", "B.xyz", "A.json", "B.json"):
        if not os.path.isfile(os.path.join(path, name)):
            raise LoadError("missing file", os.path.join(path, name))
    return AssemblyPair(
        pair_id=os.path.basename(os.path.normpath(path)),
        task=task,
        cloud_a=load_xyz(os.path.join(path, "A.xyz"), num_points),
        cloud_b=load_xyz(os.path.join(path, "B.xyz"), num_points),
        sym_a=load_symmetry(os.path.join(path, "A.json")),
        sym_b=load_symmetry(os.path.join(path, "B.json")),
    )


def save_manifest(root, manifest: DatasetManifest):
    with open(file_manager.manifest_path(root), "w", encoding="utf-8") as f:
        json.dump(manifest.to_dict(), f, indent=4, ensure_ascii=False)
        f.write("\n")


def load_manifest(root) -> DatasetManifest:
    path = file_manager.manifest_path(root)
    if not os.path.isfile(path):
        raise LoadError("missing manifest", path)
    with open(path, "r", encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise LoadError(f"not valid JSON: {e.msg}", path, e.lineno) from None
    try:
        return DatasetManifest(
            task=doc["task"],
            rest_plane=doc.get("rest_plane", "xy"),
            global_scale=float(doc.get("global_scale", 3.0)),
            train=list(doc.get("train", [])),
            test=list(doc.get("test", [])),
            num_points=int(doc.get("num_points", 1024)),
            pair_tasks=dict(doc.get("pair_tasks", {})),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise LoadError(f"malformed manifest: {e}", path) from None


def save_dataset(root, manifest: DatasetManifest, pairs):
    file_manager.ensure_dir(root)
    for pair in pairs:
        save_pair(pair, file_manager.pair_dir(root, pair.pair_id))
    save_manifest(root, manifest)
    logger.info(f"Wrote {len(pairs)} pairs to {root}")


def load_dataset(root) -> Dataset:
    return Dataset(root, load_manifest(root))
