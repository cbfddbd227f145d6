import logging
import math
from dataclasses import dataclass, field

import numpy as np

from neuroedge.domain.errors import DimensionMismatch, InsideObstacle, ValidationError
from neuroedge.service.cloud.config import REPULSION_U_MAX
from neuroedge.utils.vectors import as_matrix, as_vector


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Obstacle:
    """Sphere moving with constant velocity; static when velocity is zero."""

    center0: tuple[float, float, float]
    velocity: tuple[float, float, float] = (0.0, 0.0, 0.0)
    radius: float = 0.0

    def __post_init__(self) -> None:
        if self.radius < 0:
            raise ValidationError([f"obstacle radius must be >= 0, got {self.radius}"])

    def center(self, t: float) -> np.ndarray:
        return as_vector(self.center0, 3, "center0") + as_vector(self.velocity, 3, "velocity") * t


@dataclass(frozen=True)
class RepulsionParams:
    k_rep: float = 10.0
    d0: float = 10.0
    u_max: float = REPULSION_U_MAX

    def __post_init__(self) -> None:
        violations = []
        if self.k_rep < 0:
            violations.append("k_rep must be >= 0")
        if not self.d0 > 0:
            violations.append("d0 must be positive")
        if not self.u_max > 0:
            violations.append("u_max must be positive")
        if violations:
            raise ValidationError(violations)


@dataclass(frozen=True, eq=False)
class CloudPolicy:
    K: np.ndarray
    obstacles: tuple[Obstacle, ...] = ()
    repulsion: RepulsionParams = field(default_factory=RepulsionParams)

    def __post_init__(self) -> None:
        K = as_matrix(self.K, "K")
        if not np.all(np.isfinite(K)):
            raise ValidationError(["LQR gain must be finite"])
        K.setflags(write=False)
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "obstacles", tuple(self.obstacles))


def lqr_control(policy: CloudPolicy, x) -> np.ndarray:
    x = as_vector(x, policy.K.shape[1], "state")
    return -(policy.K @ x)


def repulsive_accel(p, obstacle: Obstacle, t: float, params: RepulsionParams) -> np.ndarray:
    """Potential-field push away from one obstacle, zero beyond the influence radius d0.

    The vector is rescaled as a whole so its largest component is at most
    u_max; the direction stays radial.

    Raises:
        InsideObstacle: `p` is on or inside the obstacle surface.
    """
    offset = as_vector(p, 3, "position") - obstacle.center(t)
    distance = float(np.linalg.norm(offset))
    d = distance - obstacle.radius
    if d <= 0:
        raise InsideObstacle(d, t)
    if d >= params.d0:
        return np.zeros(3)

    magnitude = params.k_rep * (1.0 / d - 1.0 / params.d0) / (d * d)
    accel = magnitude * offset / distance
    peak = float(np.max(np.abs(accel)))
    if peak > params.u_max:
        accel = accel * (params.u_max / peak)
    return accel


def cloud_step(policy: CloudPolicy, plant_state, t: float) -> np.ndarray:
    u = lqr_control(policy, plant_state)
    if not policy.obstacles:
        return u
    if u.shape[0] != 3:
        raise DimensionMismatch("obstacle repulsion needs three force channels")

    position = as_vector(plant_state)[:3]
    for obstacle in policy.obstacles:
        u = u + repulsive_accel(position, obstacle, t, policy.repulsion)
    return u


def obstacle_clearance(position, obstacles, t: float) -> float:
    """Smallest distance from `position` to any obstacle surface (negative inside)."""
    position = as_vector(position, 3, "position")
    clearance = math.inf
    for obstacle in obstacles:
        clearance = min(clearance, float(np.linalg.norm(position - obstacle.center(t))) - obstacle.radius)
    return clearance


def control_effort(controls, dt: float) -> float:
    return float(sum(np.linalg.norm(u) for u in controls) * dt)
