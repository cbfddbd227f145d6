import logging
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from neuroedge.domain.errors import MalformedMessage
from neuroedge.models.link import ControlSignal, StateReport, SupervisionRequest
from neuroedge.service.link.codec import encode_message


logger = logging.getLogger(__name__)


@dataclass
class LinkStats:
    """Messages that crossed the link, per kind, and their unframed payload size."""

    messages_sent: Counter = field(default_factory=Counter)
    payload_bytes: int = 0

    def record(self, msg) -> None:
        self.messages_sent[msg.kind] += 1
        self.payload_bytes += len(encode_message(msg))

    @property
    def control_signals(self) -> int:
        return self.messages_sent["control"]


class LinkClient:
    """Edge-side view of a transport: one supervision exchange per call, counted."""

    def __init__(self, transport, control_dim: int) -> None:
        self.transport = transport
        self.control_dim = control_dim
        self.stats = LinkStats()
        self._last_step = -1

    def _send(self, msg) -> None:
        self.stats.record(msg)
        self.transport.send(msg)

    def supervise(self, step: int, x) -> np.ndarray:
        """Report the plant state, ask for supervision and return the cloud's u for `step`."""
        self._send(StateReport(step=step, data=np.asarray(x, dtype=np.float64).tolist()))
        self._send(SupervisionRequest(step=step))

        reply = self.transport.receive()
        self.stats.record(reply)
        if not isinstance(reply, ControlSignal):
            raise MalformedMessage(f"expected a control message, got '{reply.kind}'")
        if reply.step != step or reply.step <= self._last_step:
            raise MalformedMessage(f"control for step {reply.step} arrived while waiting for step {step}")
        if len(reply.u) != self.control_dim:
            raise MalformedMessage(f"control has {len(reply.u)} entries, expected {self.control_dim}")
        self._last_step = reply.step
        return np.array(reply.u, dtype=np.float64)

    def reference(self, steps: int) -> np.ndarray:
        return np.array(self.transport.reference(steps), dtype=np.float64)
