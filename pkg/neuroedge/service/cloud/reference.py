import logging

import numpy as np

from neuroedge.domain.errors import MalformedMessage
from neuroedge.domain.plant import LtiPlant
from neuroedge.service.cloud.controller import CloudPolicy, cloud_step


logger = logging.getLogger(__name__)


class CloudReference:
    """The cloud's own copy of the plant, driven by the cloud policy.

    states[k] is the expected state at the start of step k; controls[k]
    is the command applied over step k.
    """

    def __init__(self, policy: CloudPolicy, plant: LtiPlant) -> None:
        self.policy = policy
        self._template = plant.copy()
        self.reset(plant.x)

    def reset(self, x0) -> None:
        self._plant = self._template.copy()
        self._plant.x = np.array(x0, dtype=np.float64)
        self.states: list[np.ndarray] = [self._plant.x.copy()]
        self.controls: list[np.ndarray] = []

    @property
    def step(self) -> int:
        return len(self.controls)

    @property
    def state(self) -> np.ndarray:
        return self.states[-1]

    def apply(self, u) -> np.ndarray:
        u = np.array(u, dtype=np.float64)
        self.controls.append(u)
        self.states.append(self._plant.step(u))
        return self.state

    def advance_to(self, step: int) -> np.ndarray:
        """Run the closed loop on the cloud's own state until it reaches `step`."""
        if step < self.step:
            raise MalformedMessage(f"reference is at step {self.step}, cannot rewind to {step}")
        while self.step < step:
            self.apply(cloud_step(self.policy, self.state, self.step * self._plant.dt))
        return self.state

    def trajectory(self, steps: int) -> list[np.ndarray]:
        # a supervised last step has already moved the reference to `steps`
        if self.step < steps - 1:
            self.advance_to(steps - 1)
        return [x.copy() for x in self.states[:steps]]


def simulate_reference(policy: CloudPolicy, plant: LtiPlant, steps: int) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Cloud-only closed loop from the plant's current state; returns (states, controls), both `steps` long."""
    reference = CloudReference(policy, plant)
    reference.advance_to(steps)
    return reference.states[:steps], reference.controls[:steps]
