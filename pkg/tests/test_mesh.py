import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mclafc.mesh import (Boundary, InvalidMeshError, Mesh1D, build_uniform, hierarchy,
                         min_spacing, perturb, refine)


def test_build_uniform_periodic_101():
    mesh = build_uniform(101, 1.0, Boundary.PERIODIC)
    assert mesh.n_vertices == 101
    assert mesh.n_unknowns == 100
    np.testing.assert_allclose(mesh.h, 0.01, rtol=1e-14)


def test_build_uniform_three_vertices():
    mesh = build_uniform(3, 1.0, Boundary.INFLOW_OUTFLOW)
    np.testing.assert_array_equal(mesh.vertices, [0.0, 0.5, 1.0])
    assert mesh.n_unknowns == 3


def test_build_uniform_coarsest_table_mesh():
    assert build_uniform(33, 1.0, "inflow-outflow").h == pytest.approx(0.03125, rel=1e-14)


@pytest.mark.parametrize("vertices", [[0.0, 1.0], [0.0, 0.5, 0.5, 1.0], [0.1, 0.5, 1.0],
                                      [0.0, 0.7, 0.3, 1.0]])
def test_invalid_meshes(vertices):
    with pytest.raises(InvalidMeshError):
        Mesh1D(np.array(vertices), Boundary.PERIODIC)


def test_vertices_read_only():
    mesh = build_uniform(5)
    with pytest.raises(ValueError):
        mesh.vertices[1] = 0.3


def test_periodic_element_nodes_wrap():
    mesh = build_uniform(5, boundary=Boundary.PERIODIC)
    np.testing.assert_array_equal(mesh.element_nodes()[-1], [3, 0])
    np.testing.assert_array_equal(np.sort(mesh.stencil(0)), [0, 1, 3])


def test_perturb_zero_is_identity():
    mesh = build_uniform(101)
    np.testing.assert_array_equal(perturb(mesh, 0.0, seed=7).vertices, mesh.vertices)


@pytest.mark.parametrize("seed", [0, 1, 42])
def test_perturb_displacement_bound(seed):
    mesh = build_uniform(101)
    h = mesh.h
    pert = perturb(mesh, 0.5, seed)
    disp = pert.vertices - mesh.vertices
    assert np.all(np.abs(disp) <= 0.25 * h + 1e-15)
    assert disp[0] == 0.0 and disp[-1] == 0.0
    assert 0.5 * h - 1e-15 <= min_spacing(pert) <= h


def test_perturb_deterministic():
    a = perturb(build_uniform(5), 0.1, seed=3)
    b = perturb(build_uniform(5), 0.1, seed=3)
    assert a.vertices.tobytes() == b.vertices.tobytes()


@pytest.mark.parametrize("zeta", [-0.1, 1.0])
def test_perturb_rejects_bad_zeta(zeta):
    with pytest.raises(InvalidMeshError):
        perturb(build_uniform(5), zeta)


def test_refine_examples():
    fine = refine(build_uniform(33, boundary="inflow-outflow"))
    np.testing.assert_allclose(fine.vertices, build_uniform(65).vertices, atol=1e-15)
    mesh = Mesh1D(np.array([0.0, 0.4, 1.0]), Boundary.INFLOW_OUTFLOW)
    np.testing.assert_allclose(refine(mesh).vertices, [0.0, 0.2, 0.4, 0.7, 1.0])
    np.testing.assert_allclose(refine(refine(build_uniform(3))).vertices, build_uniform(9).vertices)


def test_min_spacing_examples():
    assert min_spacing(build_uniform(101)) == pytest.approx(0.01)
    mesh = Mesh1D(np.array([0.0, 0.2, 0.4, 0.7, 1.0]), Boundary.INFLOW_OUTFLOW)
    assert min_spacing(mesh) == pytest.approx(0.2)


def test_hierarchy_perturbs_coarsest_once():
    levels = hierarchy(9, 3, zeta=0.5, seed=2)
    assert [m.n_vertices for m in levels] == [9, 17, 33]
    np.testing.assert_array_equal(levels[1].vertices[0::2], levels[0].vertices)
    np.testing.assert_allclose(levels[2].h, levels[0].h / 4)


def test_write_csv(tmp_path):
    path = tmp_path / "mesh.csv"
    build_uniform(3).write_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "x"
    assert len(lines) == 4


@settings(max_examples=50, deadline=None)
@given(n=st.integers(3, 60), zeta=st.floats(0.0, 0.99), seed=st.integers(0, 2**32 - 1))
def test_perturbed_mesh_properties(n, zeta, seed):
    mesh = perturb(build_uniform(n), zeta, seed)
    h = 1.0 / (n - 1)
    assert np.all(np.diff(mesh.vertices) > 0)
    assert mesh.vertices[-1] == 1.0
    assert min_spacing(mesh) >= (1.0 - zeta) * h - 1e-15
    assert refine(mesh).n_vertices == 2 * n - 1
