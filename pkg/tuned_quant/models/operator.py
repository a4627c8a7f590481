from pydantic import BaseModel, ConfigDict, Field

from tuned_quant.services.quantize import MapKind


class QuantizeRequest(BaseModel):
    model_config = ConfigDict(extra="ignore", str_strip_whitespace=True)

    map: MapKind = MapKind.TT2
    n: int = Field(default=1, ge=1, le=6)
    expr: str = Field(min_length=1)
    metric: str | None = None
    metric_kind: str = "phase"
    strict: bool = False


class CommuteRequest(BaseModel):
    model_config = ConfigDict(extra="ignore", str_strip_whitespace=True)

    map: MapKind = MapKind.TT2
    n: int = Field(default=1, ge=1, le=6)
    a: str = Field(min_length=1)
    b: str = Field(min_length=1)
    expect: str | None = None


class TransformRequest(BaseModel):
    model_config = ConfigDict(extra="ignore", str_strip_whitespace=True)

    map: MapKind = MapKind.TT2
    n: int = Field(default=2, ge=1, le=6)
    expr: str = Field(min_length=1)
    transform: str = "shear"


class SpectrumRequest(BaseModel):
    model_config = ConfigDict(extra="ignore")

    grid: int = Field(default=2000, ge=3, le=200_000)
    domain: float = Field(default=10.0, gt=0)
    params: str = "hbar=1,m=1,omega=1"
    count: int = Field(default=6, ge=1)


class OperatorTerm(BaseModel):
    coeff: str
    dq: list[int]
    dp: list[int]


class OperatorReport(BaseModel):
    text: str
    terms: list[OperatorTerm]
    polarized_text: str
    preserves_polarization: bool


class CommuteReport(BaseModel):
    commutator: OperatorReport
    expected: str | None = None
    matches: bool | None = None


class TransformReport(BaseModel):
    transform: str
    pushed: OperatorReport
    requantized: OperatorReport
    commutes: bool
