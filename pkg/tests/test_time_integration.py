import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.linalg import expm

from dgsem.errors import ConfigError, StateError
from dgsem.initial_conditions import free_stream
from dgsem.mesh import build_box_mesh, build_line_mesh
from dgsem.physics import GasParams
from dgsem.time_integration import (
    SCHEMES,
    advance,
    estimate_dt,
    estimate_dt_1d,
    get_scheme,
    mesh_scale,
    step,
)


def decay(u):
    return -u


def final_error(scheme, steps):
    u, _, _ = advance(np.array([1.0]), decay, 0.0, 1.0, lambda v: 1.0 / steps, scheme)
    return abs(u[0] - math.exp(-1.0))


@pytest.mark.parametrize("scheme", sorted(SCHEMES))
def test_convergence_order(scheme):
    order = math.log2(final_error(scheme, 10) / final_error(scheme, 20))
    assert order == pytest.approx(SCHEMES[scheme].order, abs=0.3)


@pytest.mark.parametrize("scheme", sorted(SCHEMES))
def test_constant_rate_is_integrated_exactly(scheme):
    result = step(np.zeros(3), lambda u: np.ones_like(u), 0.25, scheme)
    assert_allclose(result, 0.25, rtol=1e-10)


def test_stage_counts():
    assert get_scheme("lsrk54").stages == 5
    assert get_scheme("lsrk33").stages == 3
    with pytest.raises(ConfigError):
        get_scheme("rk4")


def test_zero_step_returns_copy():
    u = np.array([1.0, 2.0])
    result = step(u, decay, 0.0)
    assert_allclose(result, u)
    assert result is not u
    with pytest.raises(StateError):
        step(u, decay, -1e-3)


def test_failed_step_leaves_state_untouched():
    u = np.array([1.0, 2.0, 3.0])
    calls = []

    def failing(v):
        calls.append(1)
        if len(calls) == 3:
            raise StateError("negative density")
        return -v

    with pytest.raises(StateError):
        step(u, failing, 0.1)
    assert_allclose(u, [1.0, 2.0, 3.0])


def test_non_finite_step_rejected():
    with pytest.raises(StateError):
        step(np.ones(2), lambda v: np.full_like(v, np.inf), 0.1)


def test_linear_system_matches_matrix_exponential():
    A = np.array([[-0.1, 2.0, 0.0], [-2.0, -0.1, 0.5], [0.0, -0.5, -1.0]])
    u0 = np.array([1.0, 0.0, -0.5])
    u, t, steps = advance(u0, lambda v: A @ v, 0.0, 2.0, lambda v: 1.0 / 256.0)
    assert t == 2.0 and steps == 512
    assert_allclose(u, expm(2.0 * A) @ u0, atol=1e-9)


def test_advance_clips_last_step_and_reports():
    seen = []
    u, t, steps = advance(np.array([1.0]), decay, 0.0, 1.0, lambda v: 0.3,
                          callback=lambda n, time, v: seen.append((n, time)))
    assert steps == 4 and t == 1.0
    assert [n for n, _ in seen] == [1, 2, 3, 4]
    assert seen[-1][1] == 1.0
    assert all(a[1] < b[1] for a, b in zip(seen, seen[1:]))


def test_advance_respects_step_limit():
    _, t, steps = advance(np.array([1.0]), decay, 0.0, 1.0, lambda v: 0.1, max_steps=3)
    assert steps == 3 and t == pytest.approx(0.3)


def test_advance_rejects_vanishing_step():
    with pytest.raises(StateError):
        advance(np.array([1.0]), decay, 0.0, 1.0, lambda v: 0.0)


def test_estimate_dt_on_affine_box(affine_mesh, gas):
    assert_allclose(mesh_scale(affine_mesh), 0.5, rtol=1e-13)
    still = free_stream(affine_mesh.geometry, gas, velocity=(0.0, 0.0, 0.0))
    expected = 0.4 * 0.5 / (math.sqrt(1.4) * 9)
    assert estimate_dt(affine_mesh, still, 0.4, gas) == pytest.approx(expected, rel=1e-12)
    assert estimate_dt(affine_mesh, still, 0.8, gas) == pytest.approx(2.0 * expected, rel=1e-12)
    viscous = GasParams(reynolds=1e-3)
    assert estimate_dt(affine_mesh, still, 0.4, viscous) < expected


def test_estimate_dt_scales_with_element_size_and_degree(gas):
    def dt(elements, degree):
        mesh = build_box_mesh([[0.0, 1.0]] * 3, [elements] * 3, degree)
        return estimate_dt(mesh, free_stream(mesh.geometry, gas), 0.5, gas)

    assert dt(4, 3) == pytest.approx(0.5 * dt(2, 3), rel=1e-12)
    by_degree = [dt(2, degree) for degree in range(1, 7)]
    assert all(later < earlier for earlier, later in zip(by_degree, by_degree[1:]))


def test_estimate_dt_1d():
    mesh = build_line_mesh(1.0, 4, 2)
    assert estimate_dt_1d(mesh, 2.0, 0.0, 0.5) == pytest.approx(0.5 * 0.25 / (2.0 * 4))
    assert estimate_dt_1d(mesh, 0.0, 0.1, 0.5) == pytest.approx(0.5 * 0.0625 / (0.1 * 16))
    assert estimate_dt_1d(mesh, 0.0, 0.0, 0.5) == math.inf
