"""Geometric finite elements: manifold-valued interpolation on simplicial
grids, test-function fields along the interpolants, and harmonic-map
energies with Riemannian descent.

The public surface re-exported here:

- manifolds: ``Euclidean``, ``Sphere``, ``Rotation3``, ``TangentVector``,
  ``polar_decompose``
- reference elements: ``ReferenceElement``
- local interpolation: ``GeodesicInterpolant``, ``ProjectionInterpolant``,
  ``KarcherCheck``, ``karcher_check``
- test fields: ``ElementTestField``, ``nodal_basis_fields``
- grids and global functions: ``Grid``, ``GFEFunction``,
  ``GlobalTestFunction``, ``global_nodal_basis``, ``read_mesh``,
  ``write_mesh``, ``unit_interval_grid``, ``unit_square_grid``,
  ``write_vtk``
- energy: ``QuadratureRule``, ``simplex_quadrature``, ``EnergyReport``,
  ``dirichlet_energy``, ``directional_derivative``, ``algebraic_gradient``,
  ``minimize``, ``equivalence_audit``
"""

from . import errors
from .energy import (
    EnergyReport,
    QuadratureRule,
    algebraic_gradient,
    directional_derivative,
    dirichlet_energy,
    equivalence_audit,
    minimize,
    simplex_quadrature,
)
from .geodesic import GeodesicInterpolant, KarcherCheck, karcher_check
from .grid import (
    GFEFunction,
    GlobalTestFunction,
    Grid,
    global_nodal_basis,
    read_mesh,
    unit_interval_grid,
    unit_square_grid,
    write_mesh,
    zero_test_function,
)
from .jacobi import ElementTestField, nodal_basis_fields
from .manifold import Euclidean, Rotation3, Sphere, TangentVector, polar_decompose
from .projection import ProjectionInterpolant
from .reference_element import ReferenceElement
from .vtkio import write_vtk

__all__ = [
    "errors",
    "EnergyReport",
    "QuadratureRule",
    "algebraic_gradient",
    "directional_derivative",
    "dirichlet_energy",
    "equivalence_audit",
    "minimize",
    "simplex_quadrature",
    "GeodesicInterpolant",
    "KarcherCheck",
    "karcher_check",
    "GFEFunction",
    "GlobalTestFunction",
    "Grid",
    "global_nodal_basis",
    "read_mesh",
    "unit_interval_grid",
    "unit_square_grid",
    "write_mesh",
    "zero_test_function",
    "ElementTestField",
    "nodal_basis_fields",
    "Euclidean",
    "Rotation3",
    "Sphere",
    "TangentVector",
    "polar_decompose",
    "ProjectionInterpolant",
    "ReferenceElement",
    "write_vtk",
]

__version__ = "0.1.0"
