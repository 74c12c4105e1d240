"""Legacy ASCII VTK export of global functions and test fields.

Point positions are the embedded function values mapped to three components
(sphere values directly, rotations as axis-angle vectors, flat values zero
padded), so a viewer shows the image of the function.  An optional test
field is written as per-point 3-component vector data (rotation tangents as
the axis coordinates of Q^T W).
"""

from __future__ import annotations

import numpy as np

from .errors import CutLocusError
from .grid import GFEFunction, GlobalTestFunction
from .manifold import Euclidean, Rotation3, Sphere, _logm_rotation, _vee

# (dim, order) -> VTK cell type and local-node permutation
_CELLS = {
    (1, 1): (3, [0, 1]),             # line
    (1, 2): (21, [0, 2, 1]),         # quadratic edge: ends then midpoint
    (2, 1): (5, [0, 1, 2]),          # triangle
    (2, 2): (22, [0, 2, 5, 1, 4, 3]),  # quadratic triangle: corners, then mid 01/12/20
}


def _point3(manifold, value) -> np.ndarray:
    if isinstance(manifold, Sphere) or isinstance(manifold, Euclidean):
        v = np.asarray(value, dtype=float).reshape(-1)
        out = np.zeros(3)
        out[: min(3, v.size)] = v[:3]
        return out
    if isinstance(manifold, Rotation3):
        try:
            return _vee(_logm_rotation(np.asarray(value, dtype=float)))
        except CutLocusError:
            return np.array([np.nan, np.nan, np.nan])
    raise TypeError(f"no VTK embedding for manifold kind {manifold.kind!r}")


def _vector3(manifold, base, vec) -> np.ndarray:
    if isinstance(manifold, Sphere) or isinstance(manifold, Euclidean):
        v = np.asarray(vec, dtype=float).reshape(-1)
        out = np.zeros(3)
        out[: min(3, v.size)] = v[:3]
        return out
    if isinstance(manifold, Rotation3):
        S = np.asarray(base, dtype=float).T @ np.asarray(vec, dtype=float)
        return _vee(0.5 * (S - S.T))
    raise TypeError(f"no VTK embedding for manifold kind {manifold.kind!r}")


def write_vtk(
    path,
    u: GFEFunction,
    field: GlobalTestFunction | None = None,
    field_name: str = "testfield",
    title: str = "gfe output",
) -> None:
    """Write a function (and optionally a test field) as an unstructured grid."""
    grid = u.grid
    key = (grid.dim, grid.order)
    if key not in _CELLS:
        raise ValueError(f"no VTK cell for dim/order {key}")
    cell_type, perm = _CELLS[key]

    lines = [
        "# vtk DataFile Version 3.0",
        title,
        "ASCII",
        "DATASET UNSTRUCTURED_GRID",
        f"POINTS {grid.n_nodes} double",
    ]
    for value in u.values:
        p = _point3(u.manifold, value)
        lines.append(" ".join(f"{x:.12g}" for x in p))

    ne = grid.n_elements
    lines.append(f"CELLS {ne} {ne * (len(perm) + 1)}")
    for e in range(ne):
        ids = [grid.element_nodes[e][loc] for loc in perm]
        lines.append(" ".join([str(len(ids))] + [str(int(i)) for i in ids]))
    lines.append(f"CELL_TYPES {ne}")
    lines.extend([str(cell_type)] * ne)

    if field is not None:
        lines.append(f"POINT_DATA {grid.n_nodes}")
        lines.append(f"VECTORS {field_name} double")
        for tv in field.vectors:
            w = _vector3(u.manifold, tv.base, tv.vec)
            lines.append(" ".join(f"{x:.12g}" for x in w))

    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
