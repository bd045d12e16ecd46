import math
from dataclasses import replace

import numpy as np
import pytest
from scipy.linalg import solve_discrete_lyapunov

from app.models import WaveAxisParams, WaveAxisState, WaveField
from app.services.disturbance import (
    assemble_wrench,
    draw_samples,
    field_step,
    make_wave_field,
    stationary_variance,
    wave_output,
    wave_step,
)

REFERENCE_AXIS = WaveAxisParams()


def _run(field: WaveField, steps: int, Ts: float = 0.1) -> np.ndarray:
    out = []
    for _ in range(steps):
        field, wrench = field_step(field, Ts)
        out.append(wrench)
    return np.array(out)


def test_reference_axis_defaults():
    assert REFERENCE_AXIS.xi == 0.2573
    assert REFERENCE_AXIS.omega0 == 0.8
    assert REFERENCE_AXIS.Kw == 1.5
    assert REFERENCE_AXIS.noise_std == 0.15
    assert REFERENCE_AXIS.bias_bounds == (-100.0, 100.0)


@pytest.mark.parametrize(
    "kwargs",
    [{"xi": 0.0}, {"omega0": -1.0}, {"noise_std": -0.1}, {"bias_bounds": (1.0, -1.0)}],
)
def test_axis_params_validation(kwargs):
    with pytest.raises(ValueError):
        WaveAxisParams(**kwargs)


def test_noise_free_filter_follows_damped_oscillator():
    xi, w0, Ts = REFERENCE_AXIS.xi, REFERENCE_AXIS.omega0, 0.1
    wd = w0 * math.sqrt(1.0 - xi * xi)
    state = WaveAxisState(z1=1.0, z2=0.0)
    for k in range(1, 501):
        state = wave_step(state, REFERENCE_AXIS, 0.0, 0.0, Ts)
        t = k * Ts
        envelope = math.exp(-xi * w0 * t)
        z1 = envelope * (math.cos(wd * t) + xi * w0 / wd * math.sin(wd * t))
        z2 = -envelope * (w0 * w0 / wd) * math.sin(wd * t)
        assert state.z1 == pytest.approx(z1, abs=1e-8)
        assert state.z2 == pytest.approx(z2, abs=1e-8)


@pytest.mark.slow
def test_stationary_variance_matches_filter():
    params = replace(REFERENCE_AXIS, bias_step_std=0.0)
    Ts, burn_in, samples = 0.1, 2_000, 600_000
    draws = np.random.default_rng(11).standard_normal(burn_in + samples) * params.noise_std
    state = WaveAxisState()
    z2 = np.empty(samples)
    for k, w in enumerate(draws):
        state = wave_step(state, params, float(w), 0.0, Ts)
        if k >= burn_in:
            z2[k - burn_in] = wave_output(state)

    a11, a12, a21, a22 = params.transition(Ts)
    Phi = np.array([[a11, a12], [a21, a22]])
    noise_cov = np.diag([0.0, (params.Kw * params.noise_std) ** 2 * Ts])
    discrete = solve_discrete_lyapunov(Phi, noise_cov)[1, 1]

    variance = float(np.var(z2))
    assert variance == pytest.approx(discrete, rel=0.10)
    assert variance == pytest.approx(stationary_variance(params), rel=0.10)


def test_stationary_variance_formula():
    params = WaveAxisParams(xi=0.5, omega0=2.0, Kw=2.0, noise_std=0.5)
    assert stationary_variance(params) == pytest.approx(1.0 / 4.0)


def test_bias_stays_in_bounds():
    params = WaveAxisParams(bias_bounds=(-1.0, 2.0))
    state = WaveAxisState()
    state = wave_step(state, params, 0.0, 1e6, 0.1)
    assert state.d == 2.0
    state = wave_step(state, params, 0.0, -1e6, 0.1)
    assert state.d == -1.0


@pytest.mark.parametrize("z2, d, expected", [(0.0, 0.0, 0.0), (3.2, -1.0, 2.2)])
def test_wave_output(z2, d, expected):
    assert wave_output(WaveAxisState(z1=5.0, z2=z2, d=d)) == pytest.approx(expected)


def test_assemble_wrench_only_forces():
    field = make_wave_field(
        [REFERENCE_AXIS],
        seed=0,
        initial=[WaveAxisState(z2=1.0), WaveAxisState(z2=2.0, d=1.0), WaveAxisState(z2=-1.0)],
    )
    assert np.array_equal(assemble_wrench(field), [1.0, 3.0, -1.0, 0.0, 0.0, 0.0])


def test_quiet_field_stays_zero():
    quiet = WaveAxisParams(noise_std=0.0, bias_step_std=0.0)
    wrenches = _run(make_wave_field([quiet], seed=3), 200)
    assert np.all(wrenches == 0.0)


def test_same_seed_same_sequence():
    a = _run(make_wave_field([REFERENCE_AXIS], seed=42), 300)
    b = _run(make_wave_field([REFERENCE_AXIS], seed=42), 300)
    c = _run(make_wave_field([REFERENCE_AXIS], seed=43), 300)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_common_mode_axes_are_equal():
    wrenches = _run(make_wave_field([REFERENCE_AXIS], seed=5, common_mode=True), 200)
    assert np.array_equal(wrenches[:, 0], wrenches[:, 1])
    assert np.array_equal(wrenches[:, 1], wrenches[:, 2])
    assert np.any(wrenches[:, 0] != 0.0)


def test_independent_axes_differ():
    wrenches = _run(make_wave_field([REFERENCE_AXIS], seed=5, common_mode=False), 200)
    assert not np.array_equal(wrenches[:, 0], wrenches[:, 1])


def test_draws_depend_only_on_seed_and_step():
    field = make_wave_field([REFERENCE_AXIS], seed=9)
    for _ in range(5):
        field, _ = field_step(field, 0.1)
    assert field.step_index == 5
    fresh = replace(make_wave_field([REFERENCE_AXIS], seed=9), step_index=5)
    assert np.array_equal(draw_samples(field), draw_samples(fresh))


def test_field_needs_three_axes():
    with pytest.raises(ValueError):
        WaveField(axes=((REFERENCE_AXIS, WaveAxisState()),) * 2)


def test_field_step_rejects_nonpositive_ts():
    with pytest.raises(ValueError):
        field_step(make_wave_field([REFERENCE_AXIS], seed=0), 0.0)
