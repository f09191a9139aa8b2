import math

import mpmath
import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import random_states
from dgsem.errors import StateError
from dgsem.fluxes import (
    br1_average_flux,
    br1_average_state,
    burgers_ec_flux,
    burgers_lax_friedrichs_penalty,
    contravariant_ec_flux,
    es_dissipation,
    es_surface_flux,
    kepec_flux,
    linear_flux,
    log_mean,
    matrix_dissipation_operator,
    tangent_frame,
)
from dgsem.physics import (
    conservative_from_primitive,
    entropy_and_flux,
    entropy_variables,
    euler_flux,
)


def ec_residual(u_left, u_right, direction, flux, gas):
    """F^T [w] - [psi] with psi = w^T f.n - f^ent.n."""
    w_left, w_right = entropy_variables(u_left, gas), entropy_variables(u_right, gas)

    def potential(u, w):
        _, entropy_flux = entropy_and_flux(u, gas)
        normal_flux = np.einsum("...i,...iv->...v", direction, euler_flux(u, gas))
        return np.sum(w * normal_flux, axis=-1) - np.sum(direction * entropy_flux, axis=-1)

    return np.sum(flux * (w_right - w_left), axis=-1) - (potential(u_right, w_right) - potential(u_left, w_left))


def test_log_mean_examples():
    assert log_mean(np.array(2.5), np.array(2.5)) == pytest.approx(2.5, rel=1e-15)
    assert log_mean(np.array(1.0), np.array(math.e)) == pytest.approx(math.e - 1.0, rel=1e-14)
    with pytest.raises(StateError):
        log_mean(np.array(0.0), np.array(1.0))


@pytest.mark.parametrize("offset", [1e-9, 1e-6, 3e-3, 2e-2, 0.5])
def test_log_mean_extended_precision(offset):
    a, b = 1.0, 1.0 + offset
    with mpmath.workdps(50):
        exact = (mpmath.mpf(b) - mpmath.mpf(a)) / (mpmath.log(mpmath.mpf(b)) - mpmath.log(mpmath.mpf(a)))
    assert float(log_mean(np.array(a), np.array(b))) == pytest.approx(float(exact), rel=1e-13)


def test_log_mean_bounds(rng):
    a = rng.uniform(0.1, 10.0, size=1000)
    b = rng.uniform(0.1, 10.0, size=1000)
    mean = log_mean(a, b)
    assert np.all(mean >= np.minimum(a, b) * (1 - 1e-15))
    assert np.all(mean <= 0.5 * (a + b) * (1 + 1e-15))
    assert_allclose(mean, log_mean(b, a), rtol=1e-15)


@pytest.mark.parametrize("direction", [0, 1, 2])
def test_kepec_consistency_and_symmetry(rng, gas, direction):
    u = random_states(rng, (1000,), gas)
    v = random_states(rng, (1000,), gas)
    assert_allclose(kepec_flux(u, u, direction, gas), euler_flux(u, gas)[:, direction], rtol=1e-13, atol=1e-13)
    assert_allclose(kepec_flux(u, v, direction, gas), kepec_flux(v, u, direction, gas), rtol=1e-14, atol=1e-14)


@pytest.mark.parametrize("direction", [0, 1, 2])
def test_kepec_entropy_conservation(rng, gas, direction):
    u = random_states(rng, (10000,), gas)
    v = random_states(rng, (10000,), gas)
    unit = np.eye(3)[direction]
    residual = ec_residual(u, v, unit, kepec_flux(u, v, direction, gas), gas)
    assert np.max(np.abs(residual)) <= 1e-11


def test_kepec_mass_flux_example(gas):
    u = conservative_from_primitive(np.array([1.0, 2.0]), np.array([[0.1, 0.0, 0.0], [0.2, 0.0, 0.0]]),
                                    np.array([1.0, 2.0]), gas)
    flux = kepec_flux(u[0], u[1], 0, gas)
    assert flux[0] == pytest.approx((1.0 / math.log(2.0)) * 0.15, rel=1e-14)


def test_contravariant_reduces_to_cartesian(rng, gas):
    u = random_states(rng, (50,), gas)
    v = random_states(rng, (50,), gas)
    metric = np.array([2.5, 0.0, 0.0])
    assert_allclose(contravariant_ec_flux(u, v, metric, gas), 2.5 * kepec_flux(u, v, 0, gas), rtol=1e-14)


def test_contravariant_entropy_condition_on_faces(warped_mesh, rng, gas):
    n_faces = warped_mesh.normals.shape[:2]
    u = random_states(rng, n_faces, gas)
    v = random_states(rng, n_faces, gas)
    scaled = warped_mesh.normals * warped_mesh.surface[..., None]
    flux = contravariant_ec_flux(u, v, scaled, gas)
    assert np.max(np.abs(ec_residual(u, v, scaled, flux, gas))) <= 1e-11
    swapped = contravariant_ec_flux(v, u, scaled, gas)
    assert_allclose(flux, swapped, rtol=1e-14, atol=1e-15)


def test_tangent_frame_orthonormal(rng):
    normals = rng.normal(size=(200, 3))
    normals /= np.linalg.norm(normals, axis=-1, keepdims=True)
    t1, t2 = tangent_frame(normals)
    frame = np.stack([normals, t1, t2], axis=-2)
    assert_allclose(frame @ np.swapaxes(frame, -1, -2), np.broadcast_to(np.eye(3), frame.shape), atol=1e-14)


def test_dissipation_operator_positive_semidefinite(rng, gas):
    u = random_states(rng, (500,), gas)
    v = random_states(rng, (500,), gas)
    normals = rng.normal(size=(500, 3))
    normals /= np.linalg.norm(normals, axis=-1, keepdims=True)
    operator = matrix_dissipation_operator(u, v, normals, gas)
    assert_allclose(operator, np.swapaxes(operator, -1, -2), rtol=1e-12, atol=1e-12)
    jump = entropy_variables(v, gas) - entropy_variables(u, gas)
    assert np.min(np.einsum("ni,nij,nj->n", jump, operator, jump)) >= -1e-12


def test_es_dissipation_sign_and_zero_jump(rng, gas):
    u = random_states(rng, (1000,), gas)
    v = random_states(rng, (1000,), gas)
    normals = rng.normal(size=(1000, 3))
    normals /= np.linalg.norm(normals, axis=-1, keepdims=True)
    surface = rng.uniform(0.5, 2.0, size=1000)
    penalty = es_dissipation(u, v, normals, surface, gas)
    jump = entropy_variables(v, gas) - entropy_variables(u, gas)
    assert np.max(np.sum(jump * penalty, axis=-1)) <= 1e-12
    assert_allclose(es_dissipation(u, u, normals, surface, gas), 0.0, atol=1e-14)

    ec = es_surface_flux(u, v, normals, surface, gas, dissipation=False)
    es = es_surface_flux(u, v, normals, surface, gas)
    assert np.max(np.sum(jump * (es - ec), axis=-1)) <= 1e-12


def test_stationary_contact_preserved(gas):
    velocity = np.zeros((2, 3))
    u = conservative_from_primitive(np.array([1.0, 3.0]), velocity, np.array([1.0, 1.0]), gas)
    normal = np.array([1.0, 0.0, 0.0])
    penalty = es_dissipation(u[0], u[1], normal, np.array(1.0), gas)
    assert_allclose(penalty, 0.0, atol=1e-14)
    flux = es_surface_flux(u[0], u[1], normal, np.array(1.0), gas)
    assert_allclose(flux, [0.0, 1.0, 0.0, 0.0, 0.0], atol=1e-14)


def test_br1_averages():
    assert_allclose(br1_average_state(np.full(5, 2.0), np.full(5, 2.0)), 2.0)
    assert_allclose(br1_average_state(np.zeros(5), np.arange(5.0)), np.arange(5.0) / 2.0)
    assert_allclose(br1_average_flux(np.zeros((3, 5)), np.ones((3, 5))), 0.5)


def test_burgers_ec_flux(rng):
    assert burgers_ec_flux(1.0, 2.0) == pytest.approx(7.0 / 6.0)
    u = rng.uniform(-2.0, 2.0, size=1000)
    v = rng.uniform(-2.0, 2.0, size=1000)
    assert_allclose(burgers_ec_flux(u, u), 0.5 * u ** 2)
    residual = burgers_ec_flux(u, v) * (v - u) - (0.5 * v ** 3 - 0.5 * u ** 3) + (v ** 3 / 3.0 - u ** 3 / 3.0)
    assert np.max(np.abs(residual)) <= 1e-13


def test_burgers_penalty_dissipates(rng):
    u = rng.uniform(-2.0, 2.0, size=1000)
    v = rng.uniform(-2.0, 2.0, size=1000)
    assert np.all((v - u) * burgers_lax_friedrichs_penalty(u, v) <= 0.0)


def test_linear_flux_variants():
    assert linear_flux(1.0, 3.0, 2.0, 1.0) == pytest.approx(2.0)
    assert linear_flux(1.0, 3.0, 2.0, 0.0) == pytest.approx(4.0)
    assert linear_flux(1.0, 3.0, 2.0, 0.5) == pytest.approx(3.0)
