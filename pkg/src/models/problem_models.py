"""
Data models for poisson-deform problem files and result documents
"""
from enum import Enum
from fractions import Fraction
from typing import Annotated, Any, Dict, List, Optional

from pydantic import AfterValidator, BaseModel, Field, field_validator, model_validator

SCHEMA_VERSION = "1.0"


class CommandName(str, Enum):
    """Commands understood by the CLI"""
    MILNOR = "milnor"
    H2 = "h2"
    SCHOUTEN = "schouten"
    DELTA = "delta"
    DEFORM_BUILD = "deform build"
    DEFORM_VERIFY = "deform verify"
    DEFORM_NORMALIZE = "deform normalize"
    DEFORM_EXTEND = "deform extend"
    DEFORM_CASIMIR = "deform casimir"
    SURFACE_H2 = "surface h2"
    SURFACE_DEFORM = "surface deform"
    SURFACE_VERIFY = "surface verify"
    SURFACE_RIGIDITY = "surface rigidity"
    SURFACE_NORMALIZE = "surface normalize"
    PLANE_H2DIM = "plane h2dim"
    PROPERTIES = "properties"


class OutputFormat(str, Enum):
    JSON = "json"
    TABLE = "table"


def _check_rational(value: str) -> str:
    try:
        Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"{value!r} is not a rational number")
    return value


RationalStr = Annotated[str, AfterValidator(_check_rational)]


class CEntry(BaseModel):
    """Coefficient c^k_{l,i} of phi^l u_i grad(phi)"""
    k: int = Field(..., ge=1)
    l: int = Field(..., ge=0)
    i: int = Field(..., ge=0)
    value: RationalStr


class CbarEntry(BaseModel):
    """Coefficient cbar^k_r of grad(u_r)"""
    k: int = Field(..., ge=1)
    r: int = Field(..., ge=1)
    value: RationalStr


class CoefficientsSpec(BaseModel):
    c: List[CEntry] = Field(default_factory=list)
    cbar: List[CbarEntry] = Field(default_factory=list)


class AlphaEntry(BaseModel):
    """Coefficient alpha^n_j of u_j grad(phi) on the surface"""
    n: int = Field(..., ge=1)
    j: int = Field(..., ge=0)
    value: RationalStr


class GaugeEntry(BaseModel):
    order: int = Field(..., ge=1)
    vector: List[str] = Field(..., min_length=3, max_length=3)


class MultiDerSpec(BaseModel):
    """A multiderivation of degree 0..3; one component for degrees 0 and 3, three otherwise"""
    degree: int = Field(..., ge=0, le=3)
    components: List[str] = Field(..., min_length=1, max_length=3)

    @model_validator(mode="after")
    def _component_count(self):
        expected = 1 if self.degree in (0, 3) else 3
        if len(self.components) != expected:
            raise ValueError(f"degree {self.degree} needs {expected} component(s), got {len(self.components)}")
        return self


class ProblemSpec(BaseModel):
    """A problem file: phi with its weights plus command-specific inputs"""
    weights: List[int] = Field(..., min_length=2, max_length=3)
    phi: str = Field(..., min_length=1)
    truncation_order: int = Field(3, ge=0)
    phi_power_bound: int = Field(1, ge=0)
    coefficients: Optional[CoefficientsSpec] = None
    surface_coefficients: Optional[List[AlphaEntry]] = None
    gauge: Optional[List[GaugeEntry]] = None
    deformation: Optional[List[List[str]]] = Field(
        None, description="explicit bivector terms pi_1..pi_N, three components each"
    )
    operands: Optional[List[MultiDerSpec]] = Field(None, max_length=2)
    multider: Optional[MultiDerSpec] = None
    seed: Optional[int] = None
    samples: int = Field(10, ge=1, le=1000)

    @field_validator("weights")
    @classmethod
    def _positive_weights(cls, weights: List[int]) -> List[int]:
        if any(w <= 0 for w in weights):
            raise ValueError("weights must be positive integers")
        return weights

    @field_validator("deformation")
    @classmethod
    def _bivector_terms(cls, terms: Optional[List[List[str]]]) -> Optional[List[List[str]]]:
        if terms is not None and any(len(t) != 3 for t in terms):
            raise ValueError("each deformation term needs three components")
        return terms

    @property
    def arity(self) -> int:
        return len(self.weights)


class ContextSummary(BaseModel):
    phi: str
    weights: List[int]
    phi_degree: int
    weight_sum: int
    mu: int
    e_phi: List[int]
    h1_is_zero: bool


class TimingInfo(BaseModel):
    elapsed_seconds: float


class ResultDoc(BaseModel):
    """Output of a successful command"""
    schema_version: str = SCHEMA_VERSION
    command: str
    spec: Optional[Dict[str, Any]] = None
    context: Optional[ContextSummary] = None
    payload: Dict[str, Any] = Field(default_factory=dict)
    timing: Optional[TimingInfo] = None


class ErrorInfo(BaseModel):
    code: str
    message: str
    details: Dict[str, Any] = Field(default_factory=dict)


class ErrorDoc(BaseModel):
    """Output of a failed command"""
    schema_version: str = SCHEMA_VERSION
    command: str
    error: ErrorInfo
