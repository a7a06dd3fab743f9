"""Procedural lid-covering and peg-insertion pairs."""

from logging import getLogger

import numpy as np

from ..core.errors import ContractViolation
from ..geometry import SymmetryGroup, apply, axis_rotation
from . import GLOBAL_SCALE, NUM_POINTS, AssemblyPair, DatasetManifest
from .canonical import canonicalize
from .sampling import pad_cloud, poisson_disk_sample
from .shapes import container, lid, prism, cross_section, slotted_board

logger = getLogger(__name__)

TASKS = ("lid", "peg", "all")
PEG_SHAPES = ("circle", "square", "cross")
PEG_CLEARANCE = 0.97
TRAIN_FRACTION = 0.6


def _lid_meshes(rng):
    r_outer = rng.uniform(0.8, 1.2)
    wall = rng.uniform(0.08, 0.15)
    r_inner = r_outer - wall
    height = rng.uniform(0.8, 1.6)
    thickness = rng.uniform(0.08, 0.15)
    skirt_depth = rng.uniform(0.1, 0.25)
    mesh_b = container(r_outer, r_inner, height, floor=wall)
    mesh_a = lid(r_outer, r_inner, height, thickness, skirt_depth)
    meta = {
        "shape": "cylinder",
        "r_outer": r_outer,
        "r_inner": r_inner,
        "rim_height": height,
        "extent": max(2 * r_outer, height + thickness),
    }
    sym = SymmetryGroup(continuous_axis="z")
    return mesh_a, mesh_b, sym, sym, meta


def _peg_meshes(rng):
    shape = PEG_SHAPES[rng.integers(len(PEG_SHAPES))]
    width = rng.uniform(2.0, 2.6)
    depth = rng.uniform(2.0, 2.6)
    thickness = rng.uniform(0.3, 0.5)
    half = rng.uniform(0.25, 0.4)
    peg_height = rng.uniform(0.8, 1.4)
    mesh_b, depth = slotted_board(width, depth, thickness, shape, half)
    seat = 0.3 * thickness
    mesh_a = prism(cross_section(shape, PEG_CLEARANCE * half), seat, seat + peg_height)
    if shape == "circle":
        sym_a = SymmetryGroup(continuous_axis="z")
    else:
        sym_a = SymmetryGroup.generated([axis_rotation("z", np.pi / 2)])
    sym_b = SymmetryGroup.generated([axis_rotation("z", np.pi)])
    meta = {
        "shape": shape,
        "half_width": half,
        "extent": max(width, depth, seat + peg_height),
    }
    return mesh_a, mesh_b, sym_a, sym_b, meta


def make_pair(kind, pair_id, rng, num_points=NUM_POINTS) -> AssemblyPair:
    """One canonical pair scaled so the assembly's largest extent is GLOBAL_SCALE."""
    build = {"lid": _lid_meshes, "peg": _peg_meshes}[kind]
    mesh_a, mesh_b, sym_a, sym_b, meta = build(rng)
    scale = GLOBAL_SCALE / meta["extent"]
    mesh_a, mesh_b = mesh_a.transformed(scale), mesh_b.transformed(scale)
    cloud_a = poisson_disk_sample(mesh_a, num_points, rng)
    cloud_b = poisson_disk_sample(mesh_b, num_points, rng)
    cloud_b, rest = canonicalize(cloud_b, "xy")
    cloud_a = apply(rest, cloud_a)
    meta.update(
        scale=scale,
        rest_offset=rest.translation.tolist(),
    )
    return AssemblyPair(
        pair_id=pair_id,
        task=kind,
        cloud_a=pad_cloud(cloud_a.valid, num_points),
        cloud_b=pad_cloud(cloud_b.valid, num_points),
        sym_a=sym_a,
        sym_b=sym_b,
        meta=meta,
    )


def split_sizes(count):
    n_train = min(max(1, int(round(TRAIN_FRACTION * count))), count - 1)
    return n_train, count - n_train


def gen_synthetic(task, count, seed=0, num_points=NUM_POINTS):
    """(manifest, pairs); every pair has its own shape parameters."""
    if task not in TASKS:
        raise ContractViolation(f"Unknown task '{task}', expected one of {TASKS}")
    if count < 2:
        raise ContractViolation(f"count must be at least 2, got {count}")
    pairs = []
    for i in range(count):
        kind = task if task != "all" else ("lid", "peg")[i % 2]
        rng = np.random.default_rng([seed, i])
        pairs.append(make_pair(kind, f"{kind}_{i:04d}", rng, num_points))
        logger.debug(f"generated {pairs[-1].pair_id}")
    n_train, _ = split_sizes(count)
    ids = [p.pair_id for p in pairs]
    manifest = DatasetManifest(
        task=task,
        rest_plane="xy",
        global_scale=GLOBAL_SCALE,
        train=ids[:n_train],
        test=ids[n_train:],
        num_points=num_points,
        pair_tasks={p.pair_id: p.task for p in pairs},
    )
    return manifest, pairs
