import logging
import threading

import numpy as np

from neuroedge.domain.errors import MalformedMessage
from neuroedge.domain.plant import LtiPlant
from neuroedge.models.link import ControlSignal, StateReport, SupervisionRequest
from neuroedge.service.cloud.controller import CloudPolicy, cloud_step
from neuroedge.service.cloud.reference import CloudReference


logger = logging.getLogger(__name__)


class CloudEndpoint:
    """Cloud side of the link: answers supervision requests and keeps the expected trajectory.

    Calls are serialised with a lock so one endpoint can sit behind a server thread.
    """

    def __init__(self, policy: CloudPolicy, plant: LtiPlant) -> None:
        self.policy = policy
        self.dt = plant.dt
        self.state_dim = plant.state_dim
        self.reference = CloudReference(policy, plant)
        self._reports: dict[int, np.ndarray] = {}
        self._lock = threading.Lock()

    def handle(self, msg):
        """Returns the reply message, or None when the message needs no reply."""
        with self._lock:
            if isinstance(msg, StateReport):
                return self._on_state(msg)
            if isinstance(msg, SupervisionRequest):
                return self._on_request(msg)
            raise MalformedMessage(f"cloud does not accept '{msg.kind}' messages")

    def _on_state(self, msg: StateReport) -> None:
        if len(msg.x) != self.state_dim:
            raise MalformedMessage(f"state has {len(msg.x)} entries, expected {self.state_dim}")
        x = np.array(msg.x, dtype=np.float64)
        if msg.step == 0:
            logger.info("cloud: new session, reference reset to the reported state")
            self.reference.reset(x)
            self._reports.clear()
        self._reports[msg.step] = x
        return None

    def _on_request(self, msg: SupervisionRequest) -> ControlSignal:
        x = self._reports.pop(msg.step, None)
        if x is None:
            raise MalformedMessage(f"supervision request for step {msg.step} without a state report")
        self.reference.advance_to(msg.step)
        u = cloud_step(self.policy, x, msg.step * self.dt)
        self.reference.apply(u)
        return ControlSignal(step=msg.step, data=u.tolist())

    def trajectory(self, steps: int) -> list[list[float]]:
        with self._lock:
            return [x.tolist() for x in self.reference.trajectory(steps)]
