import logging
from collections import deque

import numpy as np

from neuroedge.service.edge.gate import CommandInput, LearningConfig
from neuroedge.service.edge.network import (
    NetworkParams,
    NetworkState,
    decode_control,
    dendritic_basis,
    network_substep,
    plasticity_update,
)
from neuroedge.utils.vectors import as_vector


logger = logging.getLogger(__name__)


class EdgeController:
    """Runs the spiking network through the substeps of one control step.

    With the `state` command input the edge also keeps a linear map from the
    measured plant state to the cloud command, fitted by least squares over
    the last `fit_window` supervised pairs. Between contacts the network is
    driven to encode that command; with the `zero` input it runs on its own.
    """

    def __init__(self, params: NetworkParams, state: NetworkState, cfg: LearningConfig, dt: float) -> None:
        self.params = params
        self.state = state
        self.cfg = cfg
        self.dt_sub = dt / cfg.substeps_per_step
        self.gain: np.ndarray | None = None
        self._states: deque[np.ndarray] = deque(maxlen=cfg.fit_window)
        self._controls: deque[np.ndarray] = deque(maxlen=cfg.fit_window)

    @property
    def tracks_state(self) -> bool:
        return self.cfg.command is CommandInput.STATE

    def readout(self) -> np.ndarray:
        return decode_control(self.params, self.state)

    def learned_command(self, x) -> np.ndarray:
        if self.gain is None:
            return np.zeros(self.params.K)
        return self.gain @ as_vector(x, self.gain.shape[1], "state")

    def predict(self, x=None) -> np.ndarray:
        """The command the edge would produce for plant state `x` without supervision."""
        if self.tracks_state and x is not None:
            return self.learned_command(x)
        return self.readout()

    def fit_command(self, x, u) -> None:
        if not self.tracks_state:
            return
        self._states.append(as_vector(x))
        self._controls.append(as_vector(u, self.params.K, "control"))
        solution, *_ = np.linalg.lstsq(np.array(self._states), np.array(self._controls), rcond=None)
        self.gain = solution.T

    def run_step(self, step: int, x=None, u=None, learn: bool = False) -> tuple[int, np.ndarray]:
        """Returns (spikes fired, mean readout over the substeps).

        The error against `u` drives feedback and plasticity only when `learn`
        is set. Otherwise, with the `state` input, the command input carries
        the learned command for `x` measured against the readout.
        """
        target = as_vector(u, self.params.K, "control") if (u is not None and learn) else None
        tracked = self.learned_command(x) if (target is None and self.tracks_state and x is not None) else None
        idle = np.zeros(self.params.K)
        spikes = 0
        readout_sum = np.zeros(self.params.K)

        for substep in range(self.cfg.substeps_per_step):
            e = None
            psi = None
            c = idle
            if target is not None:
                e = target - self.readout()
                psi = dendritic_basis(self.params.M, self.params.theta, self.state.r)
            elif tracked is not None:
                c = self.params.k_fb * (tracked - self.readout())

            spikes += len(network_substep(self.params, self.state, c, e, self.dt_sub, step, substep))

            if e is not None:
                plasticity_update(self.params, self.state, e, psi)
            readout_sum += self.readout()

        return spikes, readout_sum / self.cfg.substeps_per_step
