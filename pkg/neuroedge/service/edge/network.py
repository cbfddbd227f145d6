import logging
import math
from dataclasses import dataclass, field

import numpy as np

from neuroedge.domain.errors import InvalidDimension, NonFiniteState
from neuroedge.utils.vectors import as_vector


logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class NetworkParams:
    """Fixed parameters of the balanced spiking network.

    D is K x N, so F = D^T encodes a K-dimensional command into N neurons.
    Omega_f and T are always derived from D, mu and nu.
    """

    D: np.ndarray
    M: np.ndarray
    theta: np.ndarray
    lam: float
    mu: float
    nu: float
    k_fb: float
    eta: float
    max_spikes_per_substep: int = 1
    F: np.ndarray = field(init=False)
    Omega_f: np.ndarray = field(init=False)
    T: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        D = np.array(self.D, dtype=np.float64)
        M = np.array(self.M, dtype=np.float64)
        theta = as_vector(self.theta)
        if D.ndim != 2 or M.ndim != 2 or M.shape[0] != D.shape[1] or theta.shape[0] != M.shape[1]:
            raise InvalidDimension(f"inconsistent shapes D {D.shape}, M {M.shape}, theta {theta.shape}")
        if self.max_spikes_per_substep < 1:
            raise InvalidDimension("max_spikes_per_substep must be >= 1")

        derived = {
            "D": D,
            "M": M,
            "theta": theta,
            "F": D.T.copy(),
            "Omega_f": D.T @ D + self.mu * np.eye(D.shape[1]),
            "T": compute_thresholds(D, self.mu, self.nu),
        }
        for name, value in derived.items():
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def N(self) -> int:
        return self.D.shape[1]

    @property
    def K(self) -> int:
        return self.D.shape[0]

    @property
    def P(self) -> int:
        return self.M.shape[1]


@dataclass
class NetworkState:
    sigma: np.ndarray
    r: np.ndarray
    Omega_s: np.ndarray
    spike_log: list[tuple[int, int, int]] = field(default_factory=list)

    @classmethod
    def resting(cls, N: int, P: int) -> "NetworkState":
        return cls(sigma=np.zeros(N), r=np.zeros(N), Omega_s=np.zeros((N, P)))


def init_network(
    seed: int,
    N: int,
    K: int,
    P: int,
    decoder_variance: float,
    lam: float,
    mu: float,
    nu: float,
    k_fb: float,
    eta: float,
    max_spikes_per_substep: int = 1,
) -> tuple[NetworkParams, NetworkState]:
    """Draw D ~ N(0, decoder_variance), M ~ N(0, 1/N), theta ~ N(0, 1) from one seeded generator."""
    if min(N, K, P) < 1:
        raise InvalidDimension(f"N, K and P must be >= 1, got N={N}, K={K}, P={P}")
    if not decoder_variance > 0:
        raise InvalidDimension(f"decoder_variance must be positive, got {decoder_variance}")
    if N <= 2 * K:
        logger.warning(f"N={N} <= 2K={2 * K}: the network is not robust to noise")

    rng = np.random.default_rng(seed)
    D = rng.normal(0.0, math.sqrt(decoder_variance), size=(K, N))
    M = rng.normal(0.0, math.sqrt(1.0 / N), size=(N, P))
    theta = rng.normal(0.0, 1.0, size=P)

    params = NetworkParams(
        D=D, M=M, theta=theta, lam=lam, mu=mu, nu=nu, k_fb=k_fb, eta=eta,
        max_spikes_per_substep=max_spikes_per_substep,
    )
    return params, NetworkState.resting(N, P)


def compute_thresholds(D, mu: float, nu: float) -> np.ndarray:
    D = np.asarray(D, dtype=np.float64)
    return (np.sum(D * D, axis=0) + nu + mu) / 2.0


def dendritic_basis(M, theta, r) -> np.ndarray:
    return np.tanh(np.asarray(M).T @ np.asarray(r) + np.asarray(theta))


def network_substep(
    params: NetworkParams,
    state: NetworkState,
    c,
    e,
    dt_sub: float,
    step: int = 0,
    substep: int = 0,
) -> list[int]:
    """Integrate membranes, fire winner-take-all, then decay the rates.

    `e` is None when no supervision error is available; the feedback term
    is then dropped. Returns the indices of neurons that fired.
    """
    drive = -params.lam * state.sigma + params.F @ as_vector(c, params.K, "command")
    drive += state.Omega_s @ dendritic_basis(params.M, params.theta, state.r)
    if e is not None:
        drive += params.k_fb * (params.F @ as_vector(e, params.K, "error"))
    state.sigma = state.sigma + dt_sub * drive

    fired = []
    for _ in range(params.max_spikes_per_substep):
        margin = state.sigma - params.T
        j = int(np.argmax(margin))
        if not margin[j] > 0:
            break
        state.sigma = state.sigma - params.Omega_f[:, j]
        state.r[j] += 1.0
        state.spike_log.append((step, substep, j))
        fired.append(j)

    state.r = state.r * (1.0 - params.lam * dt_sub)

    if not np.all(np.isfinite(state.sigma)):
        raise NonFiniteState(f"membrane potential diverged at step {step}, substep {substep}")
    return fired


def decode_control(params: NetworkParams, state: NetworkState) -> np.ndarray:
    return params.D @ state.r


def plasticity_update(params: NetworkParams, state: NetworkState, e, psi=None) -> np.ndarray:
    """Local rule: Omega_s += eta * (D^T e) psi(r)^T.

    `psi` defaults to the basis output of the current rates.
    """
    if psi is None:
        psi = dendritic_basis(params.M, params.theta, state.r)
    projected = params.F @ as_vector(e, params.K, "error")
    state.Omega_s = state.Omega_s + params.eta * np.outer(projected, psi)
    return state.Omega_s
