import math
from dataclasses import dataclass

import numpy as np

from neuroedge.domain.errors import DimensionMismatch, NonFiniteState, ValidationError
from neuroedge.utils.vectors import as_matrix, as_vector, require_square


class LtiPlant:
    """Linear time-invariant plant x' = A x + B u stepped at a fixed dt."""

    def __init__(self, A, B, x0, dt: float) -> None:
        self.A = as_matrix(A, "A")
        self.B = as_matrix(B, "B")
        n = require_square(self.A, "A")
        if self.B.shape[0] != n:
            raise DimensionMismatch(f"B has {self.B.shape[0]} rows, expected {n}")
        if not dt > 0:
            raise ValidationError([f"dt must be positive, got {dt}"])
        self.x = as_vector(x0, n, "x0")
        self.dt = float(dt)

    @property
    def state_dim(self) -> int:
        return self.A.shape[0]

    @property
    def input_dim(self) -> int:
        return self.B.shape[1]

    def derivative(self, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        return self.A @ x + self.B @ u

    def step(self, u) -> np.ndarray:
        return rk4_step(self, u)

    def copy(self) -> "LtiPlant":
        return LtiPlant(self.A, self.B, self.x, self.dt)


def rk4_step(plant: LtiPlant, u) -> np.ndarray:
    """Advance the plant one dt with classical RK4, holding u constant over the step."""
    u = as_vector(u, plant.input_dim, "u")
    if not np.all(np.isfinite(u)):
        raise NonFiniteState("control input is not finite")

    x, h = plant.x, plant.dt
    k1 = plant.derivative(x, u)
    k2 = plant.derivative(x + 0.5 * h * k1, u)
    k3 = plant.derivative(x + 0.5 * h * k2, u)
    k4 = plant.derivative(x + h * k3, u)
    x_next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    if not np.all(np.isfinite(x_next)):
        raise NonFiniteState("plant state diverged")
    plant.x = x_next
    return x_next.copy()


WORKBENCH_A = ((0.0, 1.0), (-2.0, 0.0))
WORKBENCH_B = ((0.0,), (1.0,))


def make_workbench(x0=(5.0, 2.0), dt: float = 0.1) -> LtiPlant:
    return LtiPlant(WORKBENCH_A, WORKBENCH_B, x0, dt)


@dataclass(frozen=True)
class CwParams:
    """Orbit of the target: gravitational parameter (km^3/s^2) and radius (km)."""

    mu_earth: float = 398600.0
    R0: float = 6771.0

    def __post_init__(self) -> None:
        violations = []
        if not self.mu_earth > 0:
            violations.append("mu_earth must be positive")
        if not self.R0 > 0:
            violations.append("R0 must be positive")
        if violations:
            raise ValidationError(violations)

    @property
    def n(self) -> float:
        """Mean motion in rad/s."""
        return math.sqrt(self.mu_earth / self.R0 ** 3)


def cw_matrices(n: float) -> tuple[np.ndarray, np.ndarray]:
    """State [x, y, z, vx, vy, vz]; force channels act on the velocity rows."""
    A = np.zeros((6, 6))
    A[0:3, 3:6] = np.eye(3)
    A[3, 5] = 2.0 * n
    A[4, 4] = -n * n
    A[5, 3] = -2.0 * n
    A[5, 5] = 2.0 * n * n
    B = np.vstack([np.zeros((3, 3)), np.eye(3)])
    return A, B


def make_cw(params: CwParams, r0, v0, dt: float = 0.1) -> LtiPlant:
    A, B = cw_matrices(params.n)
    x0 = np.concatenate([as_vector(r0, 3, "r0"), as_vector(v0, 3, "v0")])
    return LtiPlant(A, B, x0, dt)
