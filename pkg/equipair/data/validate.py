import os
from logging import getLogger

import numpy as np

from ..core import file_manager
from ..core.errors import LoadError
from .canonical import GRAVITY_AXIS, base_center
from .io import load_manifest, load_pair

logger = getLogger(__name__)

REST_TOL = 1e-6


def check_pair(pair, manifest):
    problems = []
    pid = pair.pair_id
    for name, cloud in (("A", pair.cloud_a), ("B", pair.cloud_b)):
        if len(cloud) != manifest.num_points:
            problems.append(f"{pid}: cloud {name} has {len(cloud)} rows, expected {manifest.num_points}")
    for name, sym in (("A", pair.sym_a), ("B", pair.sym_b)):
        if not sym.is_closed():
            problems.append(f"{pid}: symmetry {name} is not closed under composition")

    g = GRAVITY_AXIS[manifest.rest_plane]
    lo, bc = base_center(pair.cloud_b.valid, manifest.rest_plane)
    if abs(lo) > REST_TOL:
        problems.append(f"{pid}: B rests at {'xyz'[g]}={lo:.9g}, not 0")
    off_axis = np.delete(bc, g)
    if np.max(np.abs(off_axis)) > REST_TOL:
        problems.append(f"{pid}: B base center {bc.tolist()} is off the up axis")

    both = np.concatenate([pair.cloud_a.valid, pair.cloud_b.valid])
    extent = float(np.max(both.max(axis=0) - both.min(axis=0)))
    if extent > manifest.global_scale * (1 + 1e-6):
        problems.append(f"{pid}: extent {extent:.6g} exceeds global scale {manifest.global_scale}")
    return problems


def validate_dataset(root):
    """Every dataset invariant violated under ``root``, one message each."""
    try:
        manifest = load_manifest(root)
    except LoadError as e:
        return [str(e)]
    problems = []
    overlap = sorted(set(manifest.train) & set(manifest.test))
    if overlap:
        problems.append(f"train and test splits share {overlap}")
    for split in ("train", "test"):
        ids = getattr(manifest, split)
        if len(set(ids)) != len(ids):
            problems.append(f"{split} split lists a pair twice")
    listed = set(manifest.train) | set(manifest.test)
    unlisted = [pid for pid in file_manager.get_all_pair_ids(root) if pid not in listed]
    if unlisted:
        problems.append(f"pair directories not in the manifest: {unlisted}")
    for pid in dict.fromkeys(manifest.train + manifest.test):
        path = file_manager.pair_dir(root, pid)
        if not os.path.isdir(path):
            problems.append(f"{pid}: pair directory missing")
            continue
        try:
            pair = load_pair(path, manifest.task_of(pid), manifest.num_points)
        except LoadError as e:
            problems.append(f"{pid}: {e}")
            continue
        problems.extend(check_pair(pair, manifest))
    for problem in problems:
        logger.debug(problem)
    return problems
