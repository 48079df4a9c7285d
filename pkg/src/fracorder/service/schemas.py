"""Request/response models for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class MLRequest(BaseModel):
    rho: float
    mu: float
    z: float


class MLResponse(BaseModel):
    value: float
    log_abs: float
    sign: int
    est_rel_error: float
    regime: str


class EigsRequest(BaseModel):
    H: float = 1.0
    h: float = 1.0
    count: int = Field(5, ge=1)


class EigRow(BaseModel):
    index: int
    kind: str
    s: float
    nu: float
    M: float
    residual: float


class EigsResponse(BaseModel):
    rows: list[EigRow]


class CylinderSpec(BaseModel):
    Lx: float = 1.0
    Ly: float = 1.0
    H: float = 1.0
    h: float = 1.0
    Px: int = 8
    Py: int = 8
    J: int = 8
    quad_n: int = 48


class PhiChoice(BaseModel):
    name: str = "constant"
    amplitude: float = 1.0
    center: tuple[float, float, float] = (0.5, 0.5, 0.5)
    width: float = 0.25


class BuildRequest(BaseModel):
    cylinder: CylinderSpec = CylinderSpec()
    phi: PhiChoice = PhiChoice()
    points: list[tuple[float, float, float]] = [(0.3, 0.3, 0.3)]
    kind: str = "riemann_liouville"


class DecaySummary(BaseModel):
    coeff_l1: float
    tail_fraction: float
    fitted_decay: float
    tail_estimate: float
    summable: bool


class BuildResponse(BaseModel):
    model: dict
    lambda1: float
    n_modes: int
    n_negative: int
    decay: DecaySummary


class SolveRequest(BaseModel):
    model: dict
    rho: float
    point_index: int = 0
    times: list[float]
    log_scale: bool = False


class SolveResponse(BaseModel):
    times: list[float]
    signs: list[int]
    log_abs: list[float]
    values: list[float] | None = None


class VerifyRequest(BaseModel):
    model: dict
    rho: float
    point_index: int = 0
    n_nodes: int = 2048
    t_max: float = 2.0
    t_lo: float = 0.1


class VerifyResponse(BaseModel):
    max_residual: float
    ic_residual: float
    n_nodes: int
    t_window: tuple[float, float]


class SeriesPayload(BaseModel):
    times: list[float]
    signs: list[int]
    log_abs: list[float]
    point_label: str = ""
    noise_level: float = 0.0


class EstimateRequest(BaseModel):
    method: str
    series: SeriesPayload
    lambda1: float | None = None
    phi_at_point: float | None = None


class EstimateResponse(BaseModel):
    rho_hat: float
    method: str
    window: tuple[int, int]
    residual: float
    sequence: list[float]


class ExperimentRequest(BaseModel):
    config: dict


class ExperimentResponse(BaseModel):
    exit_code: int
    results_csv: str
    output_dir: str


class ErrorResponse(BaseModel):
    error: str
    detail: str
