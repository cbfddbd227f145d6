from typing import List, Optional, Tuple

from pydantic import BaseModel, Field

from neuroedge.service.edge.gate import GateMode


class StepRecord(BaseModel):
    step: int
    t: float
    x_plant: List[float]
    x_cloud_ref: Optional[List[float]] = Field(None, description="Cloud's expected state; filled in when the run ends.")
    u_cloud: Optional[List[float]] = Field(None, description="Cloud command received this step, absent when unsupervised.")
    u_expected: List[float] = Field(..., description="Cloud command evaluated at the plant state, never sent over the link.")
    u_hat: List[float] = Field(..., description="Network readout averaged over the step; the command actuated by the edge.")
    u_error: Optional[List[float]] = Field(None, description="Error u_cloud - u_hat seen by the gate.")
    spikes: int = Field(..., ge=0)
    energy_step: float = Field(..., ge=0)
    energy_cum: float = Field(..., ge=0)
    mode: GateMode
    supervised: bool


class RunSummary(BaseModel):
    scenario: str
    seed: int
    steps: int
    neurons: int
    substeps_per_step: int
    state_dim: int
    control_dim: int
    total_spikes: int = 0
    total_energy_pJ: float = 0.0
    spike_fraction: float = Field(0.0, ge=0, description="spikes / (N x steps x substeps)")
    spike_fraction_per_step: float = Field(0.0, ge=0, description="spikes / (N x steps)")
    nte_states: Optional[float] = None
    nte_control: Optional[float] = None
    supervision_messages: int = 0
    expected_supervision_messages: int = 0
    state_reports: int = 0
    payload_bytes: int = 0
    relearn_windows: List[Tuple[int, int]] = Field(default_factory=list)
    spiking_cost: float = 0.0
    control_effort_reference: float = 0.0
    control_effort_edge: float = 0.0
    min_obstacle_clearance: Optional[float] = None
    final_position_norm: float = 0.0
