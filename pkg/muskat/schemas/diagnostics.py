from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

DIAGNOSTICS_COLUMNS = [
    "time",
    "sup_norm",
    "lip_seminorm",
    "l2_norm",
    "dn_pairing",
    "theta_l2",
]
MONITOR_COLUMNS = ["time", "h1_seminorm", "velocity_ratio", "sigma_min"]


class DiagnosticsRecord(BaseModel):
    time: float
    sup_norm: float
    lip_seminorm: float = Field(ge=0)
    l2_norm: float
    dn_pairing: float
    theta_l2: float
    h1_seminorm: float = 0.0
    velocity_ratio: float = 0.0
    sigma_min: Optional[float] = None

    model_config = ConfigDict(allow_inf_nan=False, frozen=True)


class ModulusCheck(BaseModel):
    passed: bool
    worst_excess: float
    worst_pair: Tuple[int, int]
    worst_points: Tuple[float, float]


class TrajectoryReport(BaseModel):
    tol: float
    sup_increase: float
    lip_increase: float
    l2_increase: float
    worst_pairing_ratio: float
    modulus_preserved: bool
    failed_run: bool = False

    @property
    def passed(self) -> bool:
        return (
            not self.failed_run
            and self.sup_increase <= self.tol
            and self.lip_increase <= self.tol
            and self.l2_increase <= self.tol
            and self.worst_pairing_ratio >= -1e-8
            and self.modulus_preserved
        )


class CauchyRow(BaseModel):
    index: int
    eps_coarse: float
    eps_fine: float
    distance: float


class CauchyReport(BaseModel):
    eps_list: List[float]
    rows: List[CauchyRow] = []
    complete: bool = True
    mollifier_widths: List[float] = []

    @property
    def distances(self) -> List[float]:
        return [row.distance for row in self.rows]


class RateFit(BaseModel):
    mode: int
    fitted_rate: Optional[float] = None
    predicted_rate: float

    @property
    def ratio(self) -> Optional[float]:
        if self.fitted_rate is None or self.predicted_rate == 0:
            return None
        return self.fitted_rate / self.predicted_rate


class CheckResult(BaseModel):
    name: str
    passed: bool
    value: float
    threshold: float
    detail: str = ""
