import enum
import math
from pathlib import Path
from typing import Annotated, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

PositiveFloat = Annotated[float, Field(gt=0)]
NonNegativeFloat = Annotated[float, Field(ge=0)]
PositiveInt = Annotated[int, Field(gt=0)]

STEP_RATIO_TOL = 1e-9


class InitialProfile(str, enum.Enum):
    FLAT = "flat"
    COSINE = "cosine"
    MODES = "modes"
    KINK = "kink"
    SAWTOOTH = "sawtooth"
    RANDOM = "random"
    SAMPLES = "samples"


class TimeScheme(str, enum.Enum):
    EULER = "euler"
    HEUN = "heun"


class SimConfig(BaseModel):
    n_points: int = 256
    kappa: PositiveFloat = 1.0
    epsilon: NonNegativeFloat = 0.0
    dt: Optional[PositiveFloat] = None
    cfl: PositiveFloat = 0.25
    t_final: PositiveFloat
    scheme: TimeScheme = TimeScheme.EULER
    dealias: bool = False

    profile: InitialProfile = InitialProfile.COSINE
    amplitude: float = 0.5
    offset: float = 0.0
    mode: PositiveInt = 1
    modes: List[PositiveInt] = [1]
    peak: float = Field(default=math.pi / 2, gt=-math.pi, lt=math.pi)
    samples_path: Optional[Path] = None
    seed: Optional[int] = None
    mollifier_width: Optional[NonNegativeFloat] = None

    output_every: PositiveInt = 1
    sigma_every: Optional[PositiveInt] = None

    model_config = ConfigDict(extra="forbid", frozen=True)

    @field_validator("n_points")
    @classmethod
    def check_power_of_two(cls, value: int) -> int:
        if value < 8 or value & (value - 1):
            raise ValueError("must be a power of two >= 8")
        return value

    @field_validator("modes", mode="before")
    @classmethod
    def split_modes(cls, value):
        if isinstance(value, str):
            return [item.strip() for item in value.split(",") if item.strip()]
        return value

    @model_validator(mode="after")
    def check_profile_inputs(self) -> "SimConfig":
        if self.profile == InitialProfile.SAMPLES and self.samples_path is None:
            raise ValueError("profile 'samples' requires samples_path")
        if self.dt is not None:
            if self.dt > self.t_final:
                raise ValueError("dt must not exceed t_final")
            steps = self.t_final / self.dt
            if abs(steps - round(steps)) > STEP_RATIO_TOL * steps:
                raise ValueError(
                    f"t_final must be a whole number of dt steps (t_final/dt = {steps:.12g})"
                )
        return self

    def time_step(self) -> float:
        """Fixed dt, or the CFL rule dt = cfl * dx / kappa"""
        if self.dt is not None:
            return self.dt
        return self.cfl * (2.0 * math.pi / self.n_points) / self.kappa

    def step_count(self) -> int:
        """Steps to t_final; a CFL step is shortened, never lengthened, to fit"""
        steps = self.t_final / self.time_step()
        if self.dt is not None:
            return max(1, round(steps))
        return max(1, math.ceil(steps * (1.0 - STEP_RATIO_TOL)))

    def effective_dt(self) -> float:
        return self.t_final / self.step_count()
