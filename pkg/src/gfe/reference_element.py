"""Scalar Lagrange machinery on reference simplices.

The reference simplex in d dimensions is {xi >= 0, sum(xi) <= 1}.  Nodes are
the equispaced lattice points with denominator p (vertices for p = 1, plus
edge midpoints for p = 2), enumerated lexicographically with the last
reference coordinate slowest, so the 1d quadratic element has nodes at
0, 1/2, 1 in that order.  Shape functions are the classical barycentric
closed forms, which satisfy the Kronecker property exactly as evaluated.

Order 0 (single node at the barycenter, constant shape function) is
supported as a degenerate case; the finite element orders used on grids are
1 and 2.
"""

from __future__ import annotations

import itertools
from math import comb

import numpy as np

from .errors import OutsideElementError

_INSIDE_TOL = 1e-12


class ReferenceElement:
    """Lagrange nodes and shape functions on the unit simplex.

    Attributes
    ----------
    dim : int
        Spatial dimension d (1, 2 or 3).
    order : int
        Polynomial order p (0, 1 or 2).
    m : int
        Number of Lagrange nodes, binomial(d + p, p).
    nodes : ndarray, shape (m, d)
        Node coordinates in the reference simplex.
    """

    def __init__(self, dim: int, order: int):
        if dim not in (1, 2, 3):
            raise ValueError(f"unsupported reference dimension {dim}")
        if order not in (0, 1, 2):
            raise ValueError(f"unsupported polynomial order {order}")
        self.dim = dim
        self.order = order

        if order == 0:
            lattice = [tuple([0] * dim)]
            nodes = np.full((1, dim), 1.0 / (dim + 1))
        else:
            lattice = sorted(
                (
                    idx
                    for idx in itertools.product(range(order + 1), repeat=dim)
                    if sum(idx) <= order
                ),
                key=lambda idx: idx[::-1],
            )
            nodes = np.array(lattice, dtype=float) / order
        self.nodes = nodes
        self.m = len(lattice)
        assert self.m == comb(dim + order, order)

        # Barycentric multi-index per node: alpha_0 counts the vertex at the
        # origin, alpha_k (k >= 1) the k-th coordinate vertex; |alpha| = p.
        self._alphas = np.array(
            [(self.order - sum(idx),) + idx for idx in lattice], dtype=int
        )

    # ------------------------------------------------------------------

    def barycentric(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float).reshape(self.dim)
        return np.concatenate(([1.0 - xi.sum()], xi))

    def contains(self, xi, tol: float = _INSIDE_TOL) -> bool:
        return bool(self.barycentric(xi).min() >= -tol)

    def _require_inside(self, xi) -> np.ndarray:
        lam = self.barycentric(xi)
        if lam.min() < -_INSIDE_TOL:
            raise OutsideElementError(
                f"reference point {np.asarray(xi)} lies outside the closed simplex"
            )
        return lam

    # ------------------------------------------------------------------

    def shape_values(self, xi) -> np.ndarray:
        """Values (phi_1(xi), ..., phi_m(xi)); sums to 1 by partition of unity."""
        lam = self._require_inside(xi)
        if self.order == 0:
            return np.ones(1)
        out = np.empty(self.m)
        for i, alpha in enumerate(self._alphas):
            if self.order == 1:
                (k,) = np.nonzero(alpha)[0]
                out[i] = lam[k]
            else:
                support = np.nonzero(alpha)[0]
                if len(support) == 1:
                    k = support[0]
                    out[i] = lam[k] * (2.0 * lam[k] - 1.0)
                else:
                    k, l = support
                    out[i] = 4.0 * lam[k] * lam[l]
        return out

    def shape_gradients(self, xi) -> np.ndarray:
        """Reference gradients, shape (m, d); rows sum to the zero vector."""
        self._require_inside(xi)
        lam = self.barycentric(xi)
        # gradients of the barycentric coordinates
        glam = np.vstack([-np.ones(self.dim), np.eye(self.dim)])
        if self.order == 0:
            return np.zeros((1, self.dim))
        out = np.empty((self.m, self.dim))
        for i, alpha in enumerate(self._alphas):
            if self.order == 1:
                (k,) = np.nonzero(alpha)[0]
                out[i] = glam[k]
            else:
                support = np.nonzero(alpha)[0]
                if len(support) == 1:
                    k = support[0]
                    out[i] = (4.0 * lam[k] - 1.0) * glam[k]
                else:
                    k, l = support
                    out[i] = 4.0 * (lam[l] * glam[k] + lam[k] * glam[l])
        return out

    # ------------------------------------------------------------------

    def local_nodes_on_face(self, opposite_vertex: int) -> list[int]:
        """Indices of nodes on the face opposite the given barycentric vertex."""
        return [i for i, a in enumerate(self._alphas) if a[opposite_vertex] == 0]

    def __repr__(self) -> str:
        return f"ReferenceElement(dim={self.dim}, order={self.order}, m={self.m})"
