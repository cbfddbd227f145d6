import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from neuroedge.domain.errors import ValidationError
from neuroedge.utils.vectors import as_vector


logger = logging.getLogger(__name__)


class GateMode(str, Enum):
    WARMUP = "warmup"
    AUTONOMOUS = "autonomous"
    RELEARN = "relearn"


class CommandInput(str, Enum):
    ZERO = "zero"
    STATE = "state"


@dataclass(frozen=True, eq=False)
class LearningConfig:
    e_th: np.ndarray
    warmup_steps: int = 50
    check_interval: int = 50
    substeps_per_step: int = 1
    max_spikes_per_substep: int = 1
    command: CommandInput = CommandInput.ZERO
    fit_window: int = 50

    def __post_init__(self) -> None:
        e_th = as_vector(self.e_th)
        violations = []
        if e_th.size == 0 or not np.all(e_th > 0):
            violations.append("e_th must be positive componentwise")
        if self.warmup_steps < 0:
            violations.append("warmup_steps must be >= 0")
        if self.check_interval < 1:
            violations.append("check_interval must be >= 1")
        if self.substeps_per_step < 1:
            violations.append("substeps_per_step must be >= 1")
        if self.max_spikes_per_substep < 1:
            violations.append("max_spikes_per_substep must be >= 1")
        if self.fit_window < 1:
            violations.append("fit_window must be >= 1")
        if self.command not in [c.value for c in CommandInput]:
            violations.append(f"command must be one of {[c.value for c in CommandInput]}, got {self.command!r}")
        if violations:
            raise ValidationError(violations)
        object.__setattr__(self, "e_th", e_th)
        object.__setattr__(self, "command", CommandInput(self.command))


@dataclass(frozen=True)
class GateDecision:
    learn: bool
    request_supervision: bool


@dataclass
class SupervisionGate:
    mode: GateMode = GateMode.WARMUP
    steps_in_mode: int = 0
    transitions: list[tuple[int, GateMode]] = field(default_factory=list)

    def needs_supervision(self, cfg: LearningConfig, step: int) -> bool:
        """Whether the edge must contact the cloud at `step`, decided before any error is known."""
        if step < cfg.warmup_steps or self.mode is GateMode.RELEARN:
            return True
        return step % cfg.check_interval == 0

    def enter(self, mode: GateMode, step: int) -> None:
        logger.info(f"gate: {self.mode.value} -> {mode.value} at step {step}")
        self.mode = mode
        self.steps_in_mode = 0
        self.transitions.append((step, mode))


def exceeds(e: np.ndarray, e_th: np.ndarray) -> bool:
    return bool(np.any(np.abs(e) > e_th))


def gate_step(gate: SupervisionGate, cfg: LearningConfig, step: int, e_if_measured=None) -> GateDecision:
    """Advance the warmup / autonomous / relearn state machine by one step.

    Learning only ever happens with a measured error.
    """
    request = gate.needs_supervision(cfg, step)
    e = None if e_if_measured is None else as_vector(e_if_measured, cfg.e_th.shape[0], "error")
    mode_before = gate.mode

    if step < cfg.warmup_steps:
        if gate.mode is not GateMode.WARMUP:
            gate.enter(GateMode.WARMUP, step)
        learn = e is not None
    else:
        if gate.mode is GateMode.WARMUP:
            gate.enter(GateMode.AUTONOMOUS, step)

        if gate.mode is GateMode.AUTONOMOUS:
            learn = False
            if request and e is not None and exceeds(e, cfg.e_th):
                gate.enter(GateMode.RELEARN, step)
                learn = True
        else:
            if e is not None and not exceeds(e, cfg.e_th):
                gate.enter(GateMode.AUTONOMOUS, step)
                learn = False
            else:
                learn = e is not None

    if gate.mode is mode_before:
        gate.steps_in_mode += 1
    return GateDecision(learn=learn, request_supervision=request)
