"""
Document models for Forested Links.

Wire documents (JSON/YAML inputs and CLI outputs) are pydantic models; the
in-memory mathematical types live next to the operations that use them in
``shared.services``.
"""

from typing import Optional, List, Dict, Any, Literal, Union
from pydantic import BaseModel, ConfigDict, Field, StrictInt, StrictStr, field_validator


class RingSpec(BaseModel):
    """JSON description of a coefficient ring."""
    model_config = ConfigDict(extra="forbid")

    kind: Literal["integers", "modular", "polynomials"] = Field(..., description="Ring kind")
    modulus: Optional[StrictInt] = Field(None, description="Modulus q >= 2 for modular rings")
    variables: Optional[List[str]] = Field(None, description="Ordered variable names for polynomial rings")

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump(exclude_none=True)


# JSON floats and booleans are rejected rather than coerced
RingValue = Union[StrictInt, StrictStr]


class EdgeCoefficient(BaseModel):
    model_config = ConfigDict(extra="forbid")

    edge: List[StrictInt] = Field(..., description="Edge endpoints [i, j]")
    value: RingValue = Field(..., description="Ring element in its text form")

    @field_validator("edge")
    @classmethod
    def _two_endpoints(cls, edge: List[int]) -> List[int]:
        if len(edge) != 2:
            raise ValueError("an edge has exactly two endpoints")
        return edge


class EdgeVectorDocument(BaseModel):
    """An element of the free module A_n; omitted edges mean zero."""
    model_config = ConfigDict(extra="forbid")

    n: StrictInt = Field(..., ge=1, description="Number of vertices of the complete graph")
    ring: RingSpec
    coefficients: List[EdgeCoefficient] = Field(default_factory=list)


Coordinate = Union[StrictInt, StrictStr]


class LinkDocument(BaseModel):
    """Closed polygonal components with exact rational coordinates."""
    model_config = ConfigDict(extra="forbid")

    components: List[List[List[Coordinate]]] = Field(..., description="Components as cyclic lists of [x, y, z]")


class MatrixDocument(BaseModel):
    """Symmetric linking matrix; the diagonal is ignored."""
    model_config = ConfigDict(extra="forbid")

    n: StrictInt = Field(..., ge=1)
    ring: RingSpec
    entries: List[List[Optional[RingValue]]]


class ConfigurationDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    id: str
    classes: List[str]
    sign: Literal[-1, 1] = Field(..., strict=True)
    matrix: List[List[Optional[RingValue]]]


class WallEventDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    time: str = Field(..., description="Rational time in (0, 1), e.g. '1/3'")
    target: str
    pair: List[StrictInt]
    delta: Literal[-1, 1] = Field(..., strict=True)
    fused: ConfigurationDocument


class ScenarioDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    ring: RingSpec
    initial: List[ConfigurationDocument] = Field(default_factory=list)
    events: List[WallEventDocument] = Field(default_factory=list)


class CommandResult(BaseModel):
    """Outcome of one CLI invocation."""
    status: Literal["ok", "error"] = "ok"
    payload: Dict[str, Any] = Field(default_factory=dict)
    diagnostics: List[str] = Field(default_factory=list)
    exit_code: int = Field(0, exclude=True)

    @classmethod
    def ok(cls, payload: Dict[str, Any], diagnostics: Optional[List[str]] = None) -> "CommandResult":
        return cls(status="ok", payload=payload, diagnostics=diagnostics or [])

    @classmethod
    def failure(cls, error: Dict[str, Any], exit_code: int, diagnostics: Optional[List[str]] = None) -> "CommandResult":
        return cls(status="error", payload={"error": error}, diagnostics=diagnostics or [], exit_code=exit_code)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return self.model_dump()
