"""Numerical toolkit for T^2-invariant stable Hamiltonian structures on
T^2 x [a, b], their stable homotopies, cobordisms and classification on
S^3 and T^3."""

from .curve import ProfileCurve, SpecialStabilizer, curve_from_json, poly, standard
from .errors import (
    ConstructionError,
    DomainError,
    MalformedInputError,
    NumericalError,
    ObstructionError,
    PreconditionError,
    ShsError,
    StabilizationError,
)
from .homotopy import StableHomotopy, cobordism_from_short, homotopy_constants, triple_cobordism
from .monotone import MonotonePath, exotic_ball_path, monotone_check
from .shs import ShsPair, delta_bounds, verify
from .stabilize import BoundaryData, boundary_value_stabilizer, connect_same_winding

__version__ = "0.1.0"

__all__ = [
    "ProfileCurve",
    "SpecialStabilizer",
    "curve_from_json",
    "poly",
    "standard",
    "ConstructionError",
    "DomainError",
    "MalformedInputError",
    "NumericalError",
    "ObstructionError",
    "PreconditionError",
    "ShsError",
    "StabilizationError",
    "StableHomotopy",
    "cobordism_from_short",
    "homotopy_constants",
    "triple_cobordism",
    "MonotonePath",
    "exotic_ball_path",
    "monotone_check",
    "ShsPair",
    "delta_bounds",
    "verify",
    "BoundaryData",
    "boundary_value_stabilizer",
    "connect_same_winding",
]
