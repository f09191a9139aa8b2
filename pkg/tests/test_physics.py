import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import random_states
from dgsem.errors import PositivityError, StateError
from dgsem.physics import (
    GasParams,
    burgers_entropy,
    burgers_entropy_flux,
    burgers_entropy_variable,
    burgers_flux,
    burgers_viscosity,
    check_state,
    conservative_from_entropy,
    conservative_from_primitive,
    entropy_and_flux,
    entropy_potential,
    entropy_variables,
    euler_flux,
    linear_advdiff_coeffs,
    pressure,
    primitive_from_conservative,
    velocity_gradient_from_entropy,
    viscous_flux,
)


def test_pressure_examples(gas):
    at_rest = np.array([1.0, 0.0, 0.0, 0.0, 1.0 / (gas.gamma - 1.0)])
    moving = np.array([1.0, 1.0, 0.0, 0.0, 1.0 / (gas.gamma - 1.0) + 0.5])
    assert pressure(at_rest, gas) == pytest.approx(1.0)
    assert pressure(moving, gas) == pytest.approx(1.0)
    with pytest.raises(StateError):
        pressure(np.array([0.0, 0.0, 0.0, 0.0, 1.0]), gas)


def test_primitive_round_trip(rng, gas):
    u = random_states(rng, (200,), gas)
    rho, v, p = primitive_from_conservative(u, gas)
    assert_allclose(conservative_from_primitive(rho, v, p, gas), u, rtol=1e-15, atol=1e-15)


def test_euler_flux_stagnant_and_energy_row(rng, gas):
    still = conservative_from_primitive(1.3, np.zeros(3), 0.7, gas)
    flux = euler_flux(still, gas)
    assert_allclose(flux, 0.7 * np.hstack([np.zeros((3, 1)), np.eye(3), np.zeros((3, 1))]), atol=1e-15)

    u = random_states(rng, (50,), gas)
    rho, v, p = primitive_from_conservative(u, gas)
    enthalpy = u[:, 4] / rho + p / rho
    assert_allclose(euler_flux(u, gas)[:, 0, 4], rho * v[:, 0] * enthalpy, rtol=1e-14)


def test_euler_flux_mirror_symmetry(rng, gas):
    u = random_states(rng, (20,), gas)
    mirrored = u.copy()
    mirrored[:, 1:4] *= -1.0
    flux, flipped = euler_flux(u, gas), euler_flux(mirrored, gas)
    assert_allclose(flipped[..., [0, 4]], -flux[..., [0, 4]], rtol=1e-14, atol=1e-14)
    assert_allclose(flipped[..., 1:4], flux[..., 1:4], rtol=1e-14, atol=1e-14)


def test_entropy_variables_reference_state(gas):
    u = conservative_from_primitive(1.0, np.zeros(3), 1.0, gas)
    assert_allclose(entropy_variables(u, gas), [3.5, 0.0, 0.0, 0.0, -1.0], atol=1e-15)


def test_entropy_variables_round_trip(rng, gas):
    u = random_states(rng, (500,), gas)
    w = entropy_variables(u, gas)
    rho, v, p = primitive_from_conservative(u, gas)
    assert_allclose(w[:, 1:4], (rho / p)[:, None] * v, rtol=1e-14)
    assert np.all(w[:, 4] < 0.0)
    assert_allclose(conservative_from_entropy(w, gas), u, rtol=1e-13)
    with pytest.raises(StateError):
        conservative_from_entropy(np.array([1.0, 0.0, 0.0, 0.0, 0.5]), gas)


def test_entropy_variables_inverse_for_moving_state(gas):
    u = np.array([1.0, 0.5, 0.0, 0.0, 2.625])
    assert_allclose(conservative_from_entropy(entropy_variables(u, gas), gas), u, rtol=1e-13)


def test_entropy_values(gas):
    s, flux = entropy_and_flux(conservative_from_primitive(1.0, np.array([0.3, 0.0, 0.0]), 1.0, gas), gas)
    assert s == pytest.approx(0.0)
    assert_allclose(flux, 0.0, atol=1e-15)
    s, _ = entropy_and_flux(conservative_from_primitive(1.0, np.zeros(3), math.e, gas), gas)
    assert s == pytest.approx(-1.0 / (gas.gamma - 1.0))


def test_entropy_contraction_along_path(rng, gas):
    u0 = random_states(rng, (30,), gas)
    direction = 0.05 * rng.normal(size=u0.shape)
    eps = 1e-6
    s_plus, _ = entropy_and_flux(u0 + eps * direction, gas)
    s_minus, _ = entropy_and_flux(u0 - eps * direction, gas)
    derivative = (s_plus - s_minus) / (2.0 * eps)
    contraction = np.sum(entropy_variables(u0, gas) * direction, axis=-1)
    assert_allclose(derivative, contraction, atol=1e-6)


def test_entropy_potential_is_momentum(rng, gas):
    u = random_states(rng, (100,), gas)
    assert_allclose(entropy_potential(u, gas), u[:, 1:4], rtol=1e-12, atol=1e-13)


def test_inverse_entropy_jacobian_positive_definite(rng, gas):
    w0 = entropy_variables(random_states(rng, (20,), gas), gas)
    eps = 1e-6
    for w in w0:
        jacobian = np.empty((5, 5))
        for j in range(5):
            step = np.zeros(5)
            step[j] = eps
            jacobian[:, j] = (conservative_from_entropy(w + step, gas) - conservative_from_entropy(w - step, gas)) / (2 * eps)
        assert np.min(np.linalg.eigvalsh(0.5 * (jacobian + jacobian.T))) > 0.0


def test_viscous_flux_vanishes_without_gradients(rng, gas):
    u = random_states(rng, (10,), gas)
    assert_allclose(viscous_flux(u, np.zeros((10, 3, 5)), gas), 0.0)


def test_viscous_quadratic_form_nonnegative(rng, gas):
    u = random_states(rng, (10000,), gas)
    grad_w = rng.normal(size=(10000, 3, 5))
    fv = viscous_flux(u, grad_w, gas)
    assert np.min(np.sum(grad_w * fv, axis=(-2, -1))) >= -1e-10


def test_pure_shear_stress(gas):
    u = conservative_from_primitive(1.0, np.array([0.2, 0.0, 0.0]), 1.0, gas)
    # dv1/dy = 0.5 at constant rho, p: grad w_{2} = beta grad v1, grad w5 = 0
    grad_w = np.zeros((3, 5))
    grad_w[1, 1] = 0.5 * 1.0 / 1.0
    grad_v = velocity_gradient_from_entropy(u, grad_w, gas)
    assert grad_v[1, 0] == pytest.approx(0.5)
    fv = viscous_flux(u, grad_w, gas)
    tau = fv[:, 1:4]
    expected = np.zeros((3, 3))
    expected[0, 1] = expected[1, 0] = gas.viscosity * 0.5
    assert_allclose(tau, expected, atol=1e-15)
    assert fv[1, 4] == pytest.approx(0.2 * gas.viscosity * 0.5)


def test_check_state_reports_location(gas):
    u = np.tile(conservative_from_primitive(1.0, np.zeros(3), 1.0, gas), (2, 3, 1))
    u[1, 2, 0] = -1.0
    with pytest.raises(PositivityError) as error:
        check_state(u, gas)
    assert error.value.element == 1 and error.value.node == (2,)


def test_gas_parameters_validated():
    with pytest.raises(StateError):
        GasParams(gamma=1.0)
    with pytest.raises(StateError):
        GasParams(reynolds=-5.0)
    assert not GasParams().is_viscous
    assert GasParams(reynolds=100.0).is_viscous


def test_burgers_functions():
    assert burgers_flux(0.0) == 0.0
    assert burgers_flux(2.0) == pytest.approx(2.0)
    assert burgers_entropy(2.0) == pytest.approx(2.0)
    assert burgers_entropy_flux(2.0) == pytest.approx(8.0 / 3.0)
    assert burgers_entropy_variable(1.7) == 1.7
    assert burgers_viscosity(2.0, 0.1, 0.5) == pytest.approx(0.3)


def test_linear_advdiff_coefficients():
    x = np.linspace(0.0, 2.0 * np.pi, 50)
    a, b = linear_advdiff_coeffs(x, 1.0, 1.0, 0.5)
    assert a == 1.0 and np.all(b > 0.0)
    with pytest.raises(StateError):
        linear_advdiff_coeffs(x, 1.0, 0.5, 1.0)
    with pytest.raises(StateError):
        linear_advdiff_coeffs(x, -1.0, 1.0)
