"""Ocean-wave force generator: per-axis second-order wave filter driven by white noise,
plus a slowly varying bias kept inside its bounds.

Per axis i (X, Y, Z):
    z1' = z2
    z2' = -omega0^2 z1 - 2 xi omega0 z2 + Kw w
    tau_w_i = z2 + d_i

The deterministic part is propagated with the exact transition matrix of the
2x2 companion system; white noise and the bias random walk enter as
Euler-Maruyama increments (sqrt(Ts) scaling).
"""

import logging
import math
from dataclasses import replace
from typing import Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from app.models.waves import WaveAxisParams, WaveAxisState, WaveField, clamp

logger = logging.getLogger(__name__)


def wave_step(
    state: WaveAxisState,
    params: WaveAxisParams,
    noise_sample: float,
    bias_sample: float,
    Ts: float,
) -> WaveAxisState:
    """Advance one axis by Ts.

    The filter drift is the exact transition over Ts; the noise and bias
    increments are Euler–Maruyama. noise_sample and bias_sample are already
    scaled by their standard deviations (noise_std, bias_step_std).
    """
    if not Ts > 0.0:
        raise ValueError("Ts must be positive")
    a11, a12, a21, a22 = params.transition(Ts)
    sqrt_ts = math.sqrt(Ts)
    z1 = a11 * state.z1 + a12 * state.z2
    z2 = a21 * state.z1 + a22 * state.z2 + params.Kw * noise_sample * sqrt_ts
    lo, hi = params.bias_bounds
    d = clamp(state.d + bias_sample * sqrt_ts, lo, hi)
    return WaveAxisState(z1=z1, z2=z2, d=d)


def wave_output(state: WaveAxisState) -> float:
    return state.z2 + state.d


def assemble_wrench(field: WaveField) -> NDArray[np.float64]:
    """tau_w = [tau_w_X, tau_w_Y, tau_w_Z, 0, 0, 0]."""
    wrench = np.zeros(6)
    for i, (_, state) in enumerate(field.axes):
        wrench[i] = wave_output(state)
    return wrench


def draw_samples(field: WaveField) -> NDArray[np.float64]:
    """Standard-normal draws for the field's current step, shape (3, 2): (noise, bias) per axis.

    PCG64 seeded with (rng_seed, step_index); common mode reuses one pair for all axes.
    """
    rng = np.random.Generator(np.random.PCG64([field.rng_seed, field.step_index]))
    if field.common_mode:
        pair = rng.standard_normal(2)
        return np.tile(pair, (3, 1))
    return rng.standard_normal(6).reshape(3, 2)


def field_step(field: WaveField, Ts: float) -> tuple[WaveField, NDArray[np.float64]]:
    """Advance all three axes with the step's draws; return the new field and its wrench."""
    if not Ts > 0.0:
        raise ValueError("Ts must be positive")
    draws = draw_samples(field)
    axes = []
    for (params, state), (n, b) in zip(field.axes, draws):
        new_state = wave_step(
            state,
            params,
            noise_sample=params.noise_std * float(n),
            bias_sample=params.bias_step_std * float(b),
            Ts=Ts,
        )
        axes.append((params, new_state))
    new_field = replace(field, axes=tuple(axes), step_index=field.step_index + 1)
    return new_field, assemble_wrench(new_field)


def make_wave_field(
    axis_params: Sequence[WaveAxisParams],
    seed: int,
    common_mode: bool = False,
    initial: Optional[Sequence[WaveAxisState]] = None,
) -> WaveField:
    """Build a field from one shared or three per-axis parameter sets."""
    params = list(axis_params)
    if len(params) == 1:
        params = params * 3
    states = list(initial) if initial is not None else [WaveAxisState() for _ in range(3)]
    if common_mode and len(set(params)) > 1:
        logger.warning("Common-mode waves with differing axis parameters: outputs will differ")
    return WaveField(
        axes=tuple(zip(params, states)),
        rng_seed=int(seed),
        common_mode=common_mode,
    )


def stationary_variance(params: WaveAxisParams) -> float:
    """Variance of z2 for the continuous filter under white noise of intensity (Kw*noise_std)^2."""
    intensity = (params.Kw * params.noise_std) ** 2
    return intensity / (4.0 * params.xi * params.omega0)
