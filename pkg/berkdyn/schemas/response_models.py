from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class KernelResponse(BaseModel):
    """Response model for a kernel value"""
    exp: str = Field(..., description="log_p of the kernel value, or +-inf")


class RhoResponse(BaseModel):
    rho: str = Field(..., description="Hyperbolic distance in log_p units")


class HullResponse(BaseModel):
    """Response model for a hull tree"""
    root: int = Field(..., description="Index of the root node")
    nodes: List[Dict[str, Any]] = Field(..., description="Nodes with point and kind")
    edges: List[Dict[str, Any]] = Field(..., description="Edges with rational lengths")


class ModuliResponse(BaseModel):
    c_E: str = Field(..., description="Bounded-moduli constant, 'inf' with classical points")


class CapacityResponse(BaseModel):
    log_cap: str = Field(..., description="log_p Cap_{S0}(E)")


class EquilibriumResponse(BaseModel):
    """Response model for an equilibrium measure"""
    support: List[Dict[str, Any]] = Field(..., description="Support points")
    weights: List[str] = Field(..., description="Exact weights")
    log_cap: str = Field(..., description="log_p Cap_{S0}(E)")
    energy: str = Field(..., description="Energy of the measure")


class GreenResponse(BaseModel):
    green: str = Field(..., description="G_{S0,E} at the requested point")


class TransfiniteResponse(BaseModel):
    n: int = Field(..., description="Configuration size")
    log_d: str = Field(..., description="log_p d_n(E)")


class WitnessDoc(BaseModel):
    point: Dict[str, Any] = Field(..., description="Center of the critical ball")
    radius: Dict[str, str] = Field(..., description="Left limit of the critical radius")
    cap_log: str = Field(..., description="log_p capacity of E inside the ball")


class DensityResponse(BaseModel):
    """Response model for the lower capacity density"""
    best_c_log: str = Field(..., description="Largest admissible log_p c")
    witnesses: List[WitnessDoc] = Field(..., description="Balls attaining the minimum")
    c_E_log: str = Field(..., description="Bounded-moduli constant")
    theorem_lcd_margin: str = Field(..., description="best_c_log + 2 c_E, nonnegative")


class PommerenkeResponse(BaseModel):
    """Response model for a binary net"""
    points: Dict[str, Dict[str, Any]] = Field(..., description="Word -> point")
    separation_violations: List[List[str]] = Field(..., description="Word pairs breaking separation")
    discrete_energy: Dict[str, str] = Field(..., description="Depth -> mean pairwise log distance")
    product_bound: Dict[str, str] = Field(..., description="Depth -> lower bound for the discrete energy")


class HolderResponse(BaseModel):
    """Response model for a Hoelder certificate"""
    alpha: str = Field(..., description="Exponent")
    delta0: Dict[str, str] = Field(..., description="Largest radius of monotone growth")
    constant: str = Field(..., description="Sup of G / delta^alpha (decimal)")
    samples: int = Field(..., description="Number of evaluated balls")


class MapImageResponse(BaseModel):
    image: Dict[str, Any] = Field(..., description="Image point")


class ReductionResponse(BaseModel):
    """Response model for the good-reduction check"""
    verdict: str = Field(..., description="GOOD, NOT_GOOD, FOUND or NO_CANDIDATE_FOUND")
    point: Optional[Dict[str, Any]] = Field(None, description="Point where reduction was taken")
    reduction: Optional[Dict[str, Any]] = Field(None, description="Reduced map over F_p")
    checked: Optional[int] = Field(None, description="Candidates examined by the sweep")
    res_log: str = Field(..., description="log_p |Res| of the normalized lift")


class CylinderResponse(BaseModel):
    c: str = Field(..., description="Parameter")
    depth: int = Field(..., description="Number of levels")
    cylinders: Dict[str, Dict[str, Any]] = Field(..., description="Word -> cylinder top")


class ExperimentRowDoc(BaseModel):
    n: int = Field(..., description="Level")
    points: int = Field(..., description="Cylinder tops used")
    c_E_log: str = Field(..., description="Bounded-moduli constant")
    best_c_log: Optional[str] = Field(None, description="Lower capacity density")


class ExperimentResponse(BaseModel):
    c: str = Field(..., description="Parameter")
    good_reduction: bool = Field(..., description="Good reduction at the Gauss point")
    rows: List[ExperimentRowDoc] = Field(..., description="One row per level")


class SelfTestResponse(BaseModel):
    passed: int = Field(..., description="Checks passed")
    failed: int = Field(..., description="Checks failed")
    checks: List[Dict[str, Any]] = Field(..., description="Name and outcome of each check")


class ErrorResponse(BaseModel):
    """Response model for errors"""
    error: str = Field(..., description="Error name")
    detail: Optional[str] = Field(None, description="Detailed error information")
    context: Dict[str, str] = Field(default_factory=dict, description="Offending values")
