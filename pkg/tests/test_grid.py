import numpy as np
import pytest

import gfe
from gfe import (
    GFEFunction,
    GlobalTestFunction,
    Grid,
    global_nodal_basis,
    read_mesh,
    unit_interval_grid,
    unit_square_grid,
    write_mesh,
)
from gfe.errors import AdmissibilityError, PointOutsideDomainError
from gfe.sampling import random_configuration, random_point
from gfe.vtkio import write_vtk
from helpers import as_tangent_vectors, random_field_vectors

S2 = gfe.Sphere(2)
E1V = gfe.Euclidean(1)


def sphere_function(grid, seed, rule="geodesic", radius=0.3):
    values = random_configuration(S2, grid.n_nodes, np.random.default_rng(seed), radius=radius)
    return GFEFunction(grid, S2, rule, values)


def interior_faces(grid):
    seen = {}
    for e, el in enumerate(grid.elements):
        for k in range(grid.dim + 1):
            face = tuple(sorted(int(v) for j, v in enumerate(el) if j != k))
            seen.setdefault(face, []).append(e)
    return {f: es for f, es in seen.items() if len(es) == 2}


# ----------------------------------------------------------------------
# mesh I/O


def test_mesh_roundtrip(tmp_path):
    grid = unit_square_grid(2, 1)
    path = tmp_path / "square.mesh"
    write_mesh(path, 2, grid.vertices, grid.elements)
    dim, vertices, elements = read_mesh(path)
    assert dim == 2
    assert np.array_equal(vertices, grid.vertices)
    assert np.array_equal(elements, grid.elements)


def test_mesh_comments_and_bad_header(tmp_path):
    path = tmp_path / "line.mesh"
    path.write_text("# a comment\ngfe-mesh 1\n2\n0.0\n1.0 # trailing\n1\n0 1\n")
    dim, vertices, elements = read_mesh(path)
    assert dim == 1 and len(vertices) == 2 and len(elements) == 1
    bad = tmp_path / "bad.mesh"
    bad.write_text("not-a-mesh 1\n")
    with pytest.raises(ValueError):
        read_mesh(bad)


# ----------------------------------------------------------------------
# grid construction


def test_interval_grid_nodes_and_boundary():
    g1 = unit_interval_grid(4, 1)
    assert g1.n_nodes == 5
    assert sorted(g1.boundary_nodes) == [0, 4]
    g2 = unit_interval_grid(4, 2)
    assert g2.n_nodes == 9
    assert sorted(g2.boundary_nodes) == [0, 4]


def test_square_grid_nodes_and_boundary():
    g1 = unit_square_grid(2, 1)
    assert g1.n_nodes == 9
    assert g1.n_elements == 8
    assert len(g1.boundary_nodes) == 8
    g2 = unit_square_grid(2, 2)
    assert g2.n_nodes == 25  # 9 vertices + 16 edges
    assert len(g2.boundary_nodes) == 16


def test_shared_nodes_have_identical_coordinates():
    grid = unit_square_grid(3, 2)
    for e in range(grid.n_elements):
        mapped = grid._origin[e] + grid.ref.nodes @ grid._B[e].T
        assert np.max(np.abs(mapped - grid.lagrange_nodes[grid.element_nodes[e]])) <= 1e-12


def test_negative_orientation_rejected():
    vertices = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(ValueError):
        Grid(2, vertices, np.array([[0, 2, 1]]), 1)


def test_point_location():
    grid = unit_square_grid(2, 1)
    e, xi = grid.locate([0.2, 0.1])
    assert grid.ref.contains(xi)
    with pytest.raises(PointOutsideDomainError):
        grid.locate([1.5, 0.0])


# ----------------------------------------------------------------------
# global functions


def test_constant_function_evaluates_constantly():
    grid = unit_square_grid(2, 1)
    p = random_point(S2, np.random.default_rng(1))
    u = GFEFunction(grid, S2, "geodesic", np.tile(p, (grid.n_nodes, 1)))
    rng = np.random.default_rng(2)
    for _ in range(10):
        x = rng.uniform(0, 1, size=2)
        assert np.allclose(u.evaluate(x), p, atol=1e-13)


@pytest.mark.parametrize("rule", ["geodesic", "projection"])
def test_evaluation_at_lagrange_nodes_reproduces_values(rule):
    grid = unit_square_grid(2, 2)
    u = sphere_function(grid, seed=3, rule=rule)
    for i, x in enumerate(grid.lagrange_nodes):
        assert np.linalg.norm(u.evaluate(x) - u.values[i]) <= 1e-12


def test_nodal_evaluate_roundtrip():
    grid = unit_interval_grid(4, 2)
    u = sphere_function(grid, seed=4)
    assert np.array_equal(u.nodal_evaluate(), u.values)


def test_flat_function_matches_classical_interpolation():
    grid = unit_interval_grid(2, 1)
    values = np.array([[0.0], [0.25], [1.0]])
    u = GFEFunction(grid, E1V, "geodesic", values)
    for x in np.linspace(0, 1, 20):
        e, xi = grid.locate([x])
        expected = grid.ref.shape_values(xi) @ values[grid.element_nodes[e]]
        assert abs(u.evaluate([x])[0] - expected[0]) <= 1e-13


def test_admissibility_reported_with_element_index():
    grid = unit_interval_grid(2, 1)
    near_antipode = np.array([np.sin(0.05), -np.cos(0.05), 0.0])
    values = np.array([[1.0, 0, 0], [0.0, 1, 0], near_antipode])
    with pytest.raises(AdmissibilityError) as err:
        GFEFunction(grid, S2, "geodesic", np.array(values))
    assert "element 1" in str(err.value)


@pytest.mark.parametrize("order", [1, 2])
@pytest.mark.parametrize("rule", ["geodesic", "projection"])
def test_two_sided_face_continuity(order, rule):
    grid = unit_square_grid(2, order)
    u = sphere_function(grid, seed=5, rule=rule)
    rng = np.random.default_rng(6)
    faces = interior_faces(grid)
    checked = 0
    for (a, b), (ea, eb) in faces.items():
        for _ in range(13):
            t = rng.uniform(0.05, 0.95)
            x = (1 - t) * grid.vertices[a] + t * grid.vertices[b]
            qa = u.evaluate(x, element=ea)
            qb = u.evaluate(x, element=eb)
            assert np.linalg.norm(qa - qb) <= 1e-10
            checked += 1
    assert checked >= 100


def test_two_sided_test_function_continuity():
    grid = unit_square_grid(2, 2)
    u = sphere_function(grid, seed=7)
    rng = np.random.default_rng(8)
    vecs = random_field_vectors(S2, u.values, rng)
    eta = GlobalTestFunction(u, list(as_tangent_vectors(S2, u.values, vecs)))
    checked = 0
    for (a, b), (ea, eb) in interior_faces(grid).items():
        for _ in range(13):
            t = rng.uniform(0.05, 0.95)
            x = (1 - t) * grid.vertices[a] + t * grid.vertices[b]
            va = eta.evaluate(x, element=ea)
            vb = eta.evaluate(x, element=eb)
            assert np.linalg.norm(va.vec - vb.vec) <= 1e-10
            checked += 1
    assert checked >= 100


def test_test_function_at_nodes_and_zero_field():
    grid = unit_interval_grid(4, 1)
    u = sphere_function(grid, seed=9)
    rng = np.random.default_rng(10)
    vecs = random_field_vectors(S2, u.values, rng)
    eta = GlobalTestFunction(u, list(as_tangent_vectors(S2, u.values, vecs)))
    for i, x in enumerate(grid.lagrange_nodes):
        assert np.allclose(eta.evaluate(x).vec, vecs[i], atol=1e-10)
    zero = gfe.zero_test_function(u)
    assert np.linalg.norm(zero.evaluate([0.37]).vec) <= 1e-14


def test_global_nodal_basis_structure_and_reproduction():
    grid = unit_interval_grid(2, 1)
    u = sphere_function(grid, seed=11)
    basis = global_nodal_basis(u)
    dim = S2.intrinsic_dim
    assert len(basis) == grid.n_nodes * dim
    bases = [S2.tangent_basis(v) for v in u.values]
    for i in range(grid.n_nodes):
        for j in range(dim):
            f = basis[i * dim + j]
            for k, x in enumerate(grid.lagrange_nodes):
                expected = bases[i][j] if k == i else np.zeros(3)
                assert np.allclose(f.evaluate(x).vec, expected, atol=1e-10)
    # arbitrary test function equals its nodal expansion
    rng = np.random.default_rng(12)
    vecs = random_field_vectors(S2, u.values, rng)
    eta = GlobalTestFunction(u, list(as_tangent_vectors(S2, u.values, vecs)))
    coeffs = [bases[i].reshape(dim, -1) @ vecs[i].reshape(-1) for i in range(grid.n_nodes)]
    for _ in range(50):
        x = rng.uniform(0, 1, size=1)
        expansion = np.zeros(3)
        for i in range(grid.n_nodes):
            for j in range(dim):
                expansion += coeffs[i][j] * basis[i * dim + j].evaluate(x).vec
        assert np.linalg.norm(eta.evaluate(x).vec - expansion) <= 1e-12


# ----------------------------------------------------------------------
# VTK export


def test_vtk_output_structure(tmp_path):
    grid = unit_square_grid(1, 2)
    u = sphere_function(grid, seed=13)
    rng = np.random.default_rng(14)
    vecs = random_field_vectors(S2, u.values, rng)
    eta = GlobalTestFunction(u, list(as_tangent_vectors(S2, u.values, vecs)))
    path = tmp_path / "out.vtk"
    write_vtk(path, u, field=eta)
    lines = path.read_text().splitlines()
    assert lines[0] == "# vtk DataFile Version 3.0"
    assert "DATASET UNSTRUCTURED_GRID" in lines
    assert f"POINTS {grid.n_nodes} double" in lines
    assert f"CELL_TYPES {grid.n_elements}" in lines
    idx = lines.index(f"CELL_TYPES {grid.n_elements}")
    assert lines[idx + 1] == "22"  # quadratic triangle
    assert f"POINT_DATA {grid.n_nodes}" in lines
    assert any(line.startswith("VECTORS testfield double") for line in lines)
    # deterministic output
    path2 = tmp_path / "out2.vtk"
    write_vtk(path2, u, field=eta)
    assert path.read_text() == path2.read_text()


def test_vtk_rotation_axis_embedding(tmp_path):
    grid = unit_interval_grid(2, 1)
    SO3 = gfe.Rotation3()
    values = random_configuration(SO3, grid.n_nodes, np.random.default_rng(15), radius=0.4)
    u = GFEFunction(grid, SO3, "projection", values)
    path = tmp_path / "rot.vtk"
    write_vtk(path, u)
    lines = path.read_text().splitlines()
    k = lines.index(f"POINTS {grid.n_nodes} double")
    first = np.array([float(t) for t in lines[k + 1].split()])
    assert first.shape == (3,)
