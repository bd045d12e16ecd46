"""Wave-disturbance value types (second-order wave filter + bounded bias, per axis)."""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import expm


@dataclass(frozen=True)
class WaveAxisParams:
    """Filter and bias parameters for one line direction.

    noise_std is the intensity of the white noise driving the filter;
    bias_step_std is the Wiener increment standard deviation per sqrt(second).
    """

    xi: float = 0.2573
    omega0: float = 0.8
    Kw: float = 1.5
    noise_std: float = 0.15
    bias_bounds: tuple[float, float] = (-100.0, 100.0)
    bias_step_std: float = 2.0

    def __post_init__(self):
        lo, hi = self.bias_bounds
        if not self.xi > 0.0:
            raise ValueError("xi must be positive")
        if not self.omega0 > 0.0:
            raise ValueError("omega0 must be positive")
        if self.noise_std < 0.0 or self.bias_step_std < 0.0:
            raise ValueError("noise_std and bias_step_std must be nonnegative")
        if lo > hi:
            raise ValueError("bias_bounds must satisfy lo <= hi")

    @property
    def system_matrix(self) -> NDArray[np.float64]:
        w0 = self.omega0
        return np.array([[0.0, 1.0], [-w0 * w0, -2.0 * self.xi * w0]])

    @cached_property
    def _transitions(self) -> dict[float, tuple[float, float, float, float]]:
        return {}

    def transition(self, Ts: float) -> tuple[float, float, float, float]:
        """Entries (a11, a12, a21, a22) of expm(A*Ts), cached per sample time."""
        cache = self._transitions
        if Ts not in cache:
            phi = expm(self.system_matrix * Ts)
            cache[Ts] = (float(phi[0, 0]), float(phi[0, 1]), float(phi[1, 0]), float(phi[1, 1]))
        return cache[Ts]


@dataclass(frozen=True, slots=True)
class WaveAxisState:
    z1: float = 0.0
    z2: float = 0.0
    d: float = 0.0


@dataclass(frozen=True)
class WaveField:
    """Three (params, state) pairs for X, Y, Z plus the seeded draw position.

    Draws for step k come from PCG64 seeded with (rng_seed, k), so a field is
    reproducible from its seed and step index alone.
    """

    axes: tuple[tuple[WaveAxisParams, WaveAxisState], ...]
    rng_seed: int = 0
    common_mode: bool = False
    step_index: int = 0

    def __post_init__(self):
        if len(self.axes) != 3:
            raise ValueError(f"WaveField needs exactly three axes, got {len(self.axes)}")
        if self.step_index < 0:
            raise ValueError("step_index must be nonnegative")

    @property
    def states(self) -> tuple[WaveAxisState, ...]:
        return tuple(state for _, state in self.axes)


def clamp(value: float, lo: float, hi: float) -> float:
    return min(max(value, lo), hi)
