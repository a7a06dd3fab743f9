"""Tessellated primitives for the synthetic assembly tasks."""

import numpy as np

from . import TriMesh, merge_meshes

SEGMENTS = 64


def _ring(radius, z, segments):
    t = 2 * np.pi * np.arange(segments) / segments
    return np.stack([radius * np.cos(t), radius * np.sin(t), np.full(segments, z)], axis=1)


def cylinder_side(radius, z0, z1, segments=SEGMENTS):
    vertices = np.concatenate([_ring(radius, z0, segments), _ring(radius, z1, segments)])
    i = np.arange(segments)
    j = (i + 1) % segments
    tris = np.concatenate(
        [np.stack([i, j, i + segments], 1), np.stack([j, j + segments, i + segments], 1)]
    )
    return TriMesh(vertices, tris)


def disk(radius, z, segments=SEGMENTS):
    vertices = np.concatenate([[[0.0, 0.0, z]], _ring(radius, z, segments)])
    i = np.arange(segments)
    return TriMesh(vertices, np.stack([np.zeros(segments, int), 1 + i, 1 + (i + 1) % segments], 1))


def annulus(r_in, r_out, z, segments=SEGMENTS):
    vertices = np.concatenate([_ring(r_in, z, segments), _ring(r_out, z, segments)])
    i = np.arange(segments)
    j = (i + 1) % segments
    tris = np.concatenate(
        [np.stack([i, j, i + segments], 1), np.stack([j, j + segments, i + segments], 1)]
    )
    return TriMesh(vertices, tris)


def quad(a, b, c, d):
    return TriMesh(np.array([a, b, c, d], dtype=float), [[0, 1, 2], [0, 2, 3]])


def prism(polygon, z0, z1, caps=True):
    """Extrude a star-shaped (P, 2) polygon between z0 and z1."""
    polygon = np.asarray(polygon, dtype=float)
    p = len(polygon)
    bottom = np.column_stack([polygon, np.full(p, z0)])
    top = np.column_stack([polygon, np.full(p, z1)])
    i = np.arange(p)
    j = (i + 1) % p
    parts = [
        TriMesh(
            np.concatenate([bottom, top]),
            np.concatenate([np.stack([i, j, i + p], 1), np.stack([j, j + p, i + p], 1)]),
        )
    ]
    if caps:
        center = polygon.mean(axis=0)
        for ring, z in ((bottom, z0), (top, z1)):
            vertices = np.concatenate([[[center[0], center[1], z]], ring])
            parts.append(TriMesh(vertices, np.stack([np.zeros(p, int), 1 + i, 1 + j], 1)))
    return merge_meshes(parts)


def cross_section(shape, half, segments=SEGMENTS):
    """Outline of a peg cross-section with half-width ``half``."""
    if shape == "circle":
        return _ring(half, 0.0, segments)[:, :2]
    if shape == "square":
        return np.array([[-half, -half], [half, -half], [half, half], [-half, half]])
    if shape == "cross":
        a, b = half, half / 3.0
        return np.array(
            [
                [b, -a], [b, -b], [a, -b], [a, b], [b, b], [b, a],
                [-b, a], [-b, b], [-a, b], [-a, -b], [-b, -b], [-b, -a],
            ]
        )
    raise ValueError(f"Unknown cross-section '{shape}'")


def inside_section(shape, half, x, y):
    if shape == "circle":
        return x * x + y * y < half * half
    if shape == "square":
        return (np.abs(x) < half) & (np.abs(y) < half)
    if shape == "cross":
        ax, ay = np.abs(x), np.abs(y)
        return ((ax < half) & (ay < half / 3.0)) | ((ay < half) & (ax < half / 3.0))
    raise ValueError(f"Unknown cross-section '{shape}'")


def container(r_outer, r_inner, height, floor):
    """Open cylindrical cup resting on z = 0."""
    return merge_meshes(
        [
            disk(r_outer, 0.0),
            cylinder_side(r_outer, 0.0, height),
            annulus(r_inner, r_outer, height),
            cylinder_side(r_inner, floor, height),
            disk(r_inner, floor),
        ]
    )


def lid(r_outer, skirt_radius, rim_height, thickness, skirt_depth):
    """Cap resting on the rim at ``rim_height`` with a skirt reaching into the cup."""
    top = rim_height + thickness
    bottom = rim_height - skirt_depth
    return merge_meshes(
        [
            disk(r_outer, top),
            cylinder_side(r_outer, rim_height, top),
            annulus(skirt_radius, r_outer, rim_height),
            cylinder_side(skirt_radius, bottom, rim_height),
            disk(skirt_radius, bottom),
        ]
    )


def slotted_board(width, depth, thickness, shape, half, cells=48):
    """Board on z in [0, thickness] with a through-slot centered on the z axis.

    Top and bottom faces are a grid with cells inside the slot removed; the
    slot wall is the exact extruded outline.
    """
    c = width / cells
    ny = max(2, int(round(depth / c)))
    depth = ny * c
    xs = -width / 2 + c * np.arange(cells)
    ys = -depth / 2 + c * np.arange(ny)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    keep = ~inside_section(shape, half, gx + c / 2, gy + c / 2)
    parts = []
    for x0, y0 in zip(gx[keep], gy[keep]):
        x1, y1 = x0 + c, y0 + c
        for z in (0.0, thickness):
            parts.append(quad((x0, y0, z), (x1, y0, z), (x1, y1, z), (x0, y1, z)))
    w, d = width / 2, depth / 2
    corners = [(-w, -d), (w, -d), (w, d), (-w, d)]
    for (ax, ay), (bx, by) in zip(corners, corners[1:] + corners[:1]):
        parts.append(quad((ax, ay, 0.0), (bx, by, 0.0), (bx, by, thickness), (ax, ay, thickness)))
    parts.append(prism(cross_section(shape, half), 0.0, thickness, caps=False))
    return merge_meshes(parts), depth
