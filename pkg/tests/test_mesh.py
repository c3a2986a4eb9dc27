import numpy as np
import pytest

from dpcg.mesh import (
    CONTACT,
    DIRICHLET,
    FESpace,
    Mesh,
    MeshError,
    build_hierarchy,
    integrate_boundary2,
    integrate_domain,
    interval_mesh,
    l2_error,
    mesh_from_spec,
    prolongate,
    read_mesh,
    rectangle_mesh,
    refine,
    write_mesh,
)


def test_interval_refinement_counts():
    m = refine(interval_mesh(2))
    assert m.num_cells == 4 and m.num_vertices == 5
    assert m.is_refinement_of(interval_mesh(2))


def test_unit_integrals():
    for m in (interval_mesh(3), rectangle_mesh(2, 3)):
        assert integrate_domain(1.0, m) == pytest.approx(1.0, abs=1e-14)
    assert integrate_boundary2(1.0, interval_mesh(3)) == 1.0
    # right, bottom and top sides of the unit square
    assert integrate_boundary2(1.0, rectangle_mesh(2, 2)) == pytest.approx(3.0, abs=1e-14)


def test_square_refines_to_eight_cells():
    m = rectangle_mesh(1, 1)
    assert m.num_cells == 2
    r = refine(m)
    assert r.num_cells == 8
    assert r.contact_measure == pytest.approx(3.0)


def test_stiffness_1d():
    s = FESpace(interval_mesh(2))
    K = s.stiffness.toarray()
    # free vertices at 1/2 (interior) and 1 (contact end)
    np.testing.assert_allclose(K, [[4.0, -2.0], [-2.0, 2.0]])


def test_hat_mass():
    s = FESpace(interval_mesh(2))
    load = s.load(np.ones(s.mesh.qp_weights.shape))
    np.testing.assert_allclose(s.restrict(load), [0.5, 0.25])


def test_quadrature_exact_for_quadratics():
    for m in (interval_mesh(3), rectangle_mesh(3, 2)):
        f = m.qp_points[..., 0] ** 2
        assert integrate_domain(f, m) == pytest.approx(1 / 3, rel=1e-13)


def test_bad_sample_shape():
    m = interval_mesh(2)
    with pytest.raises(ValueError):
        integrate_domain(np.ones(3), m)


def test_gradients_of_linear_field():
    s = FESpace(rectangle_mesh(3, 3))
    w = s.mesh.vertices @ np.array([2.0, -1.0])
    g = s.cell_gradients(w)
    np.testing.assert_allclose(g, np.tile([2.0, -1.0], (len(g), 1)), atol=1e-12)


@pytest.mark.parametrize("base", [interval_mesh(4), rectangle_mesh(2, 2)])
def test_prolongation_exact_for_p1(base):
    H = build_hierarchy(base, 3)
    s0 = H.spaces[0]
    w = s0.mesh.vertices.sum(axis=1)
    w2 = H.prolongate(w, 0, 2)
    np.testing.assert_allclose(w2, H.spaces[2].mesh.vertices.sum(axis=1), atol=1e-14)
    np.testing.assert_allclose(prolongate(w, s0, H.spaces[1]), H.spaces[1].mesh.vertices.sum(axis=1))
    with pytest.raises(ValueError):
        prolongate(w, s0, H.spaces[2])


def test_old_vertices_keep_their_indices():
    m = rectangle_mesh(2, 1)
    r = refine(m)
    np.testing.assert_array_equal(r.vertices[: m.num_vertices], m.vertices)


@pytest.mark.parametrize("base", [interval_mesh(2), rectangle_mesh(2, 2)])
def test_interpolation_errors_decrease_at_order_two(base):
    errs = build_hierarchy(base, 5).interpolation_errors()
    ratios = errs[:-1] / errs[1:]
    assert np.all(ratios > 3.5) and np.all(ratios < 4.5)


def test_l2_error_of_exact_interpolant():
    s = FESpace(interval_mesh(4))
    w = s.interpolate("z1")
    assert l2_error(s, w, "z1") < 1e-15


def test_mesh_file_round_trip(tmp_path):
    m = refine(rectangle_mesh(2, 1))
    write_mesh(m, tmp_path / "m.txt")
    r = read_mesh(tmp_path / "m.txt")
    np.testing.assert_array_equal(r.vertices, m.vertices)
    np.testing.assert_array_equal(r.cells, m.cells)
    np.testing.assert_array_equal(r.facet_tags, m.facet_tags)


def test_mesh_file_comments_and_errors(tmp_path):
    p = tmp_path / "m.txt"
    p.write_text("# unit interval\nVERTICES 3\n0\n0.5\n1\nCELLS 2\n0 1\n1 2\nFACETS 2\n0 DIRICHLET\n2 CONTACT\n")
    m = read_mesh(p)
    assert m.num_cells == 2 and list(m.facet_tags) == [DIRICHLET, CONTACT]
    p.write_text("VERTICES 3\n0\n0.5\n1\nCELLS 2\n0 1\n1 2\nFACETS 2\n0 DIRICHLET\n2 SLIP\n")
    with pytest.raises(MeshError):
        read_mesh(p)


def test_mesh_requires_both_boundary_parts():
    with pytest.raises(MeshError):
        Mesh(np.array([[0.0], [1.0]]), [[0, 1]], [[0], [1]], [DIRICHLET, DIRICHLET])


def test_mesh_from_spec_variants(tmp_path):
    m = mesh_from_spec({"type": "interval", "cells": 3})
    assert m.num_cells == 3
    sq = mesh_from_spec({"type": "rectangle", "cells": 2, "boundary": {"dirichlet": ["left", "bottom"], "contact": ["right", "top"]}})
    assert sq.contact_measure == pytest.approx(2.0)
    write_mesh(m, tmp_path / "m.txt")
    assert mesh_from_spec({"type": "file", "path": "m.txt"}, tmp_path).num_cells == 3
    with pytest.raises(MeshError):
        mesh_from_spec({"type": "sphere"})
