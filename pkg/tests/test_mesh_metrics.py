import numpy as np
import pytest
from numpy.testing import assert_allclose

from dgsem.basis import build_operators
from dgsem.errors import MeshError
from dgsem.mesh import (
    build_box_mesh,
    build_line_mesh,
    check_watertight,
    element_side_traces,
    face_pairs,
    orientation_permutation,
    read_mesh_file,
    write_mesh_file,
)
from dgsem.metrics import (
    check_metric_identities,
    compute_metrics_cross_product,
    compute_metrics_curl_form,
    face_geometry,
)


def test_single_affine_element():
    mesh = build_box_mesh([[0.0, 2.0 * np.pi]] * 3, [1, 1, 1], 2)
    half = np.pi
    assert_allclose(mesh.metrics.jacobian, half ** 3, rtol=1e-13)
    expected = np.diag([half ** 2] * 3)
    assert_allclose(mesh.metrics.contravariant[0, 1, 1, 1], expected, rtol=1e-13, atol=1e-12)
    assert len(mesh.faces) == 3
    assert all(face.periodic for face in mesh.faces)


def test_affine_jacobian_and_zero_residual(affine_mesh):
    assert_allclose(affine_mesh.metrics.jacobian, (1.0 * 0.5 * 1.5) / 8.0, rtol=1e-13)
    assert check_metric_identities(affine_mesh.metrics, affine_mesh.ops) <= 1e-13
    assert affine_mesh.volume() == pytest.approx(6.0, rel=1e-13)


@pytest.mark.parametrize("degree", [3, 4, 6])
def test_curl_form_metric_identities_on_warped_box(degree):
    mesh = build_box_mesh([[0.0, 1.0]] * 3, [4, 4, 4], degree, warp="sine", amplitude=0.1)
    assert check_metric_identities(mesh.metrics, mesh.ops) <= 1e-12
    assert np.all(mesh.metrics.jacobian > 0.0)


def test_cross_product_metrics_violate_identities():
    mesh = build_box_mesh([[0.0, 1.0]] * 3, [2, 2, 2], 4, warp="sine", amplitude=0.1)
    naive = compute_metrics_cross_product(mesh.geometry, mesh.ops)
    assert check_metric_identities(naive, mesh.ops) > 1e-8


def test_face_counts_and_conformity(warped_mesh):
    assert len(warped_mesh.faces) == 3 * warped_mesh.n_elements
    sides = {(f.master, f.master_side) for f in warped_mesh.faces} | {(f.slave, f.slave_side) for f in warped_mesh.faces}
    assert len(sides) == 6 * warped_mesh.n_elements
    assert all(face.master < face.slave or face.master == face.slave for face in warped_mesh.faces)


def test_watertight_faces(warped_mesh):
    assert check_watertight(warped_mesh) <= 1e-12
    assert_allclose(np.linalg.norm(warped_mesh.normals, axis=-1), 1.0, rtol=1e-14)
    assert np.all(warped_mesh.surface > 0.0)


def test_face_geometry_unit_cube_side():
    mesh = build_box_mesh([[0.0, 1.0]] * 3, [1, 1, 1], 2)
    normal, surface = face_geometry(mesh.metrics, 2)
    assert_allclose(normal[0], np.broadcast_to([1.0, 0.0, 0.0], normal[0].shape), atol=1e-14)
    assert_allclose(surface, 0.25, rtol=1e-13)
    with pytest.raises(MeshError):
        face_geometry(mesh.metrics, 7)


def test_face_pairs_match_on_periodic_box(affine_mesh):
    geometry_left, geometry_right = face_pairs(affine_mesh, element_side_traces(affine_mesh.geometry))
    interior = [index for index, face in enumerate(affine_mesh.faces) if not face.periodic]
    assert interior
    assert_allclose(geometry_left[interior], geometry_right[interior], atol=1e-14)


@pytest.mark.parametrize("code", range(8))
def test_orientation_permutation_is_bijection(code):
    permutation = orientation_permutation(code, 4)
    assert sorted(permutation.tolist()) == list(range(16))


def test_orientation_code_out_of_range():
    with pytest.raises(MeshError):
        orientation_permutation(8, 3)


def test_inverted_element_rejected():
    ops = build_operators(2)
    mesh = build_box_mesh([[0.0, 1.0]] * 3, [1, 1, 1], 2)
    flipped = mesh.geometry.copy()
    flipped[..., 0] *= -1.0
    with pytest.raises(MeshError) as error:
        compute_metrics_curl_form(flipped, ops)
    assert error.value.element == 0


def test_invalid_box_arguments():
    with pytest.raises(MeshError):
        build_box_mesh([[0.0, 1.0]] * 3, [0, 1, 1], 2)
    with pytest.raises(MeshError):
        build_box_mesh([[0.0, 1.0]] * 3, [1, 1, 1], 2, warp="twist")


def test_mesh_file_round_trip(tmp_path, warped_mesh):
    path = tmp_path / "box.mesh"
    write_mesh_file(warped_mesh, str(path))
    loaded = read_mesh_file(str(path))
    assert loaded.n_elements == warped_mesh.n_elements
    assert_allclose(loaded.geometry, warped_mesh.geometry, rtol=0.0, atol=1e-15)
    assert [(f.master, f.master_side, f.slave, f.slave_side) for f in loaded.faces] == \
        [(f.master, f.master_side, f.slave, f.slave_side) for f in warped_mesh.faces]
    assert [f.periodic for f in loaded.faces] == [f.periodic for f in warped_mesh.faces]
    assert check_watertight(loaded) <= 1e-12


def test_malformed_mesh_file(tmp_path):
    path = tmp_path / "broken.mesh"
    path.write_text("degree 2\nelements one\n")
    with pytest.raises(MeshError):
        read_mesh_file(str(path))


def test_line_mesh():
    mesh = build_line_mesh(2.0, 4, 3, origin=-1.0)
    assert_allclose(mesh.vertices, [-1.0, -0.5, 0.0, 0.5, 1.0])
    assert_allclose(mesh.jacobian, 0.25)
    x = mesh.physical_nodes()
    assert x.shape == (4, 4)
    assert x[0, 0] == pytest.approx(-1.0) and x[-1, -1] == pytest.approx(1.0)
    with pytest.raises(MeshError):
        build_line_mesh(1.0, 2, 2, vertices=[0.0, 0.5, 0.5])
