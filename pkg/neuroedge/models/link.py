import math
from typing import Annotated, List, Literal, Union

from pydantic import BaseModel, Field, model_validator


class BaseLinkMessage(BaseModel):

    @model_validator(mode="after")
    def validate_data_is_finite(self):
        if not all(math.isfinite(v) for v in self.data):
            raise ValueError("message data must be finite")
        return self


class SupervisionRequest(BaseLinkMessage):
    kind: Literal["request"] = "request"
    step: int = Field(..., ge=0, description="Control step the edge asks supervision for.")
    data: List[float] = Field(default_factory=list, max_length=0, description="Always empty.")


class ControlSignal(BaseLinkMessage):
    kind: Literal["control"] = "control"
    step: int = Field(..., ge=0)
    data: List[float] = Field(..., min_length=1, description="Cloud control vector u for this step.")

    @property
    def u(self) -> list[float]:
        return self.data


class StateReport(BaseLinkMessage):
    kind: Literal["state"] = "state"
    step: int = Field(..., ge=0)
    data: List[float] = Field(..., min_length=1, description="Plant state measured by the edge.")

    @property
    def x(self) -> list[float]:
        return self.data


LinkMessage = Annotated[Union[SupervisionRequest, ControlSignal, StateReport], Field(discriminator="kind")]
