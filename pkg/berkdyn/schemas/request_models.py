from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

PointDoc = Dict[str, Any]
RationalDoc = Union[str, int]


class KernelRequest(BaseModel):
    """Request model for the kernel subcommand"""
    model_config = ConfigDict(populate_by_name=True)

    S: PointDoc = Field(..., description="First point")
    S_prime: PointDoc = Field(..., alias="S'", description="Second point")
    S0: Optional[PointDoc] = Field(None, description="Base point for the relative kernel")
    kind: Optional[str] = Field(None, description="inf, gauss, rel or chordal (default: rel if S0 given, else inf)")


class RhoRequest(BaseModel):
    """Request model for the hyperbolic distance"""
    model_config = ConfigDict(populate_by_name=True)

    S: PointDoc = Field(..., description="First point")
    S_prime: PointDoc = Field(..., alias="S'", description="Second point")


class PointSetRequest(BaseModel):
    """Request model for subcommands taking a bare point list"""
    points: List[PointDoc] = Field(..., description="Finite point set")
    chart_free: bool = Field(False, description="Admit annuli through a two-child branch root (cE only)")


class CapacityRequest(BaseModel):
    """Request model for capacity, equilibrium and green"""
    points: List[PointDoc] = Field(..., description="Support points")
    pole: Optional[PointDoc] = Field(None, description="Pole; infinity when omitted")
    at: Optional[PointDoc] = Field(None, description="Evaluation point (green only)")


class TransfiniteRequest(BaseModel):
    """Request model for the n-th transfinite diameter"""
    points: List[PointDoc] = Field(..., description="Support points")
    n: int = Field(..., ge=2, description="Configuration size")


class PommerenkeRequest(BaseModel):
    """Request model for the binary net construction"""
    points: List[PointDoc] = Field(..., description="Disk points")
    base: PointDoc = Field(..., description="Base point, a member of points")
    r_log: RationalDoc = Field(..., description="log_p r as 'a/b'")
    s_log: RationalDoc = Field(..., description="log_p s as 'a/b'")
    depth: int = Field(..., ge=1, le=12, description="Word length")


class HolderRequest(BaseModel):
    """Request model for the Hoelder certificate"""
    points: List[PointDoc] = Field(..., description="Disk points")
    pole: Optional[PointDoc] = Field(None, description="Pole; infinity when omitted")
    R_log: RationalDoc = Field(..., description="log_p R")
    r_log: RationalDoc = Field(..., description="log_p r")
    alpha: Optional[RationalDoc] = Field(None, description="Exponent; computed from the density report when omitted")
    boundary: Optional[List[PointDoc]] = Field(None, description="Classical boundary samples; the point centers when omitted")
    delta_logs: Optional[List[RationalDoc]] = Field(None, description="log_p of the chordal radii")


class MapImageRequest(BaseModel):
    """Request model for the image of a point"""
    map: Dict[str, List[Any]] = Field(..., description="Map as {'num': [...], 'den': [...]}, low degree first")
    point: PointDoc = Field(..., description="Point of type I or II")


class MapReduceRequest(BaseModel):
    """Request model for the good-reduction check"""
    map: Dict[str, List[Any]] = Field(..., description="Map as {'num': [...], 'den': [...]}, low degree first")
    point: Optional[PointDoc] = Field(None, description="Candidate point; the default sweep when omitted")


class CylinderRequest(BaseModel):
    """Request model for the quadratic cylinder tree"""
    c: RationalDoc = Field(..., description="Parameter of z^2 + c as 'a/b'")
    depth: int = Field(..., ge=0, le=14, description="Number of levels")


class ExperimentRequest(BaseModel):
    """Request model for the uniform-perfectness experiment"""
    c: RationalDoc = Field(..., description="Parameter of z^2 + c as 'a/b'")
    n_max: int = Field(..., ge=1, le=14, description="Deepest level")
    plot: Optional[str] = Field(None, description="Path for a gnuplot data dump")


class Invocation(BaseModel):
    """One CLI call: subcommand, parsed input document and options"""
    subcommand: str = Field(..., description="Subcommand name")
    input: Dict[str, Any] = Field(default_factory=dict, description="Parsed JSON input")
    p: int = Field(5, ge=2, description="Residue characteristic")
    precision: int = Field(64, ge=1, description="Working precision")
    seed: int = Field(0, ge=0, description="Seed for randomized routines")
    output_format: str = Field("json", pattern="^(json|csv)$", description="Output format")
    natural: bool = Field(False, description="Report logarithms in natural units (decimal)")
