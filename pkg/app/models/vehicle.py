"""Vehicle value types: pose, body velocity, wrench, state and the rigid-body + hydrodynamic parameter set.

Everything here is immutable. Array-valued fields are stored as read-only
float64 numpy arrays so a VehicleParams instance can be shared freely between
simulations and worker processes.
"""

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from numpy.typing import NDArray

from app.config import PITCH_MARGIN

FloatArray = NDArray[np.float64]


def _frozen_array(values, shape: tuple[int, ...], name: str) -> FloatArray:
    arr = np.array(values, dtype=float)
    if arr.shape != shape:
        raise InvalidVehicleParamsError(f"{name} must have shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidVehicleParamsError(f"{name} must be finite")
    arr.setflags(write=False)
    return arr


class InvalidVehicleParamsError(ValueError):
    """Raised when a vehicle parameter set violates its physical invariants."""

    pass


@dataclass(frozen=True, slots=True)
class Pose:
    """Inertial position (m) and roll/pitch/yaw (rad)."""

    x: float = 0.0
    y: float = 0.0
    z: float = 0.0
    phi: float = 0.0
    theta: float = 0.0
    psi: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in self.as_tuple()):
            raise ValueError(f"Pose fields must be finite: {self.as_tuple()}")

    def as_tuple(self) -> tuple[float, ...]:
        return (self.x, self.y, self.z, self.phi, self.theta, self.psi)

    def as_array(self) -> FloatArray:
        return np.array(self.as_tuple(), dtype=float)

    @property
    def position(self) -> FloatArray:
        return np.array((self.x, self.y, self.z), dtype=float)

    @classmethod
    def from_array(cls, values: Iterable[float]) -> "Pose":
        return cls(*(float(v) for v in values))


@dataclass(frozen=True, slots=True)
class Velocity:
    """Body-frame linear (m/s) and angular (rad/s) velocity."""

    u: float = 0.0
    v: float = 0.0
    w: float = 0.0
    p: float = 0.0
    q: float = 0.0
    r: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in self.as_tuple()):
            raise ValueError(f"Velocity fields must be finite: {self.as_tuple()}")

    def as_tuple(self) -> tuple[float, ...]:
        return (self.u, self.v, self.w, self.p, self.q, self.r)

    def as_array(self) -> FloatArray:
        return np.array(self.as_tuple(), dtype=float)

    @classmethod
    def from_array(cls, values: Iterable[float]) -> "Velocity":
        return cls(*(float(v) for v in values))


@dataclass(frozen=True, slots=True)
class Wrench:
    """Generalised forces (N) and moments (N*m) at the centre of gravity."""

    tau_X: float = 0.0
    tau_Y: float = 0.0
    tau_Z: float = 0.0
    tau_K: float = 0.0
    tau_M: float = 0.0
    tau_N: float = 0.0

    def as_tuple(self) -> tuple[float, ...]:
        return (self.tau_X, self.tau_Y, self.tau_Z, self.tau_K, self.tau_M, self.tau_N)

    def as_array(self) -> FloatArray:
        return np.array(self.as_tuple(), dtype=float)

    @classmethod
    def from_array(cls, values: Iterable[float]) -> "Wrench":
        return cls(*(float(v) for v in values))


@dataclass(frozen=True, slots=True)
class VehicleState:
    pose: Pose = field(default_factory=Pose)
    nu: Velocity = field(default_factory=Velocity)

    def as_array(self) -> FloatArray:
        """The 12-vector x = [eta; nu]."""
        return np.concatenate((self.pose.as_array(), self.nu.as_array()))

    @classmethod
    def from_array(cls, values: Iterable[float]) -> "VehicleState":
        arr = np.asarray(list(values), dtype=float)
        return cls(Pose.from_array(arr[:6]), Velocity.from_array(arr[6:12]))


@dataclass(frozen=True, eq=False)
class VehicleParams:
    """Inertia, damping, restoring and actuation limits of the vehicle.

    M already includes added mass. D_quad holds the six modulus-damping
    coefficients applied as diag(|nu_i| * D_quad_i). tau_bar is the per-axis
    bound on the generalised input.
    """

    M: FloatArray
    D_lin: FloatArray
    D_quad: FloatArray
    W: float
    B: float
    r_g: FloatArray
    r_b: FloatArray
    L: float
    tau_bar: FloatArray
    pitch_margin: float = PITCH_MARGIN

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "M", _frozen_array(self.M, (6, 6), "M"))
        set_(self, "D_lin", _frozen_array(self.D_lin, (6, 6), "D_lin"))
        set_(self, "D_quad", _frozen_array(self.D_quad, (6,), "D_quad"))
        set_(self, "r_g", _frozen_array(self.r_g, (3,), "r_g"))
        set_(self, "r_b", _frozen_array(self.r_b, (3,), "r_b"))
        tau_bar = np.broadcast_to(np.asarray(self.tau_bar, dtype=float), (6,))
        set_(self, "tau_bar", _frozen_array(tau_bar, (6,), "tau_bar"))

        if not np.allclose(self.M, self.M.T, rtol=0.0, atol=1e-12):
            raise InvalidVehicleParamsError("M must be symmetric")
        if np.min(np.linalg.eigvalsh(self.M)) <= 0.0:
            raise InvalidVehicleParamsError("M must be positive definite")
        if np.min(np.linalg.eigvalsh(0.5 * (self.D_lin + self.D_lin.T))) < -1e-12:
            raise InvalidVehicleParamsError("D_lin must be dissipative (symmetric part PSD)")
        if np.any(self.D_quad < 0.0):
            raise InvalidVehicleParamsError("D_quad coefficients must be nonnegative")
        if not self.L > 0.0:
            raise InvalidVehicleParamsError("L must be positive")
        if np.any(self.tau_bar <= 0.0):
            raise InvalidVehicleParamsError("tau_bar must be positive")
        if not 0.0 < self.pitch_margin < math.pi / 2:
            raise InvalidVehicleParamsError("pitch_margin must lie in (0, pi/2)")
