import math
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from neuroedge.service.cloud.config import REPULSION_U_MAX


ScenarioKind = Literal[
    "workbench",
    "rendezvous",
    "rendezvous_static_obstacle",
    "rendezvous_dynamic_obstacle",
]

PLANT_DIMENSIONS = {
    "workbench": (2, 1),
    "rendezvous": (6, 3),
    "rendezvous_static_obstacle": (6, 3),
    "rendezvous_dynamic_obstacle": (6, 3),
}


class NetworkSection(BaseModel):
    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    N: int = Field(..., gt=0, description="Number of LIF neurons.")
    P: int = Field(..., gt=0, description="Number of dendritic basis functions.")
    decoder_variance: float = Field(..., gt=0, description="Variance of the Gaussian decoder entries.")
    lam: float = Field(..., alias="lambda", ge=0, description="Leak rate in 1/s.")
    mu: float = Field(..., ge=0, description="Quadratic spike cost.")
    nu: float = Field(..., ge=0, description="Linear spike cost.")
    k_fb: float = Field(..., ge=0, description="Error feedback gain.")
    eta: float = Field(..., ge=0, description="Learning rate of the slow weights.")


class LearningSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    e_th: List[float] = Field(..., min_length=1, description="Per-channel error threshold of the supervision gate.")
    warmup_steps: int = Field(50, ge=0)
    check_interval: int = Field(50, ge=1)
    substeps_per_step: int = Field(1, ge=1)
    max_spikes_per_substep: int = Field(1, ge=1)
    command: Literal["zero", "state"] = Field(
        "zero", description="Command input between contacts: none, or the learned command for the measured plant state."
    )
    fit_window: int = Field(50, ge=1, description="Supervised pairs the state-to-command fit keeps.")

    @model_validator(mode="after")
    def validate_thresholds(self) -> "LearningSection":
        if not all(v > 0 for v in self.e_th):
            raise ValueError("e_th must be positive componentwise")
        return self


class ObstacleSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    center0: List[float] = Field(..., min_length=3, max_length=3, description="Center at t=0, m.")
    velocity: List[float] = Field(default=[0.0, 0.0, 0.0], min_length=3, max_length=3, description="m/s; zero for a static obstacle.")
    radius: float = Field(..., ge=0, description="Sphere radius, m.")


class RepulsionSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    k_rep: float = Field(10.0, ge=0)
    d0: float = Field(10.0, gt=0, description="Influence radius from the obstacle surface, m.")
    u_max: float = Field(REPULSION_U_MAX, gt=0, description="Largest repulsion component.")


class OrbitSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    mu_earth: float = Field(398600.0, gt=0, description="km^3/s^2")
    R0: float = Field(6771.0, gt=0, description="Target orbit radius, km.")


class ScenarioConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenario: ScenarioKind
    horizon: float = Field(..., gt=0, description="Simulated time, s.")
    dt: float = Field(..., gt=0, description="Control step, s.")
    x0: List[float]
    Q: List[List[float]]
    R: List[List[float]]
    network: NetworkSection
    learning: LearningSection
    obstacles: List[ObstacleSection] = Field(default_factory=list)
    repulsion: RepulsionSection = Field(default_factory=RepulsionSection)
    orbit: Optional[OrbitSection] = None
    seed: int = 0
    output_dir: Optional[str] = None
    link: str = "inproc"
    cloud_actuates_warmup: bool = False

    @property
    def steps(self) -> int:
        return round(self.horizon / self.dt)

    @property
    def state_dim(self) -> int:
        return PLANT_DIMENSIONS[self.scenario][0]

    @property
    def control_dim(self) -> int:
        return PLANT_DIMENSIONS[self.scenario][1]

    @model_validator(mode="after")
    def validate_dimensions(self) -> "ScenarioConfig":
        n, m = self.state_dim, self.control_dim
        ratio = self.horizon / self.dt
        if not math.isclose(ratio, round(ratio), rel_tol=0, abs_tol=1e-9 * max(1.0, ratio)):
            raise ValueError("horizon must be an integer multiple of dt")
        if len(self.x0) != n:
            raise ValueError(f"x0 must have {n} entries")
        if len(self.Q) != n or any(len(row) != n for row in self.Q):
            raise ValueError(f"Q must be {n}x{n}")
        if len(self.R) != m or any(len(row) != m for row in self.R):
            raise ValueError(f"R must be {m}x{m}")
        if len(self.learning.e_th) != m:
            raise ValueError(f"learning.e_th must have {m} entries")
        if self.scenario == "workbench" and self.obstacles:
            raise ValueError("the workbench plant has no position to avoid obstacles with")
        if self.scenario != "workbench" and self.orbit is None:
            raise ValueError("rendezvous scenarios need orbit parameters")
        return self


class SweepSpec(BaseModel):
    base: ScenarioConfig
    N_values: List[int] = Field(..., min_length=1)
    seeds: List[int] = Field(..., min_length=1)

    @model_validator(mode="after")
    def validate_neuron_counts(self) -> "SweepSpec":
        if not all(n > 0 for n in self.N_values):
            raise ValueError("N values must be positive")
        return self
