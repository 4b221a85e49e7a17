"""Center/focus analysis of monodromic singularities via Laurent inverse integrating factors."""
from __future__ import annotations

from .errors import MonodromicError
from .expansion import Config, Mode, Outcome, ProcedureResult, Verdict, run_procedure
from .newton import Poly2, PolyVectorField, compute_diagram
from .poincare import ClosedFormIIF, eta_from_oracle, return_map
from .polar import LaurentRho, PolarField, blow_up
from .trigfun import TrigPoly

__version__ = "0.1.0"

__all__ = [
    "ClosedFormIIF", "Config", "LaurentRho", "Mode", "MonodromicError", "Outcome", "PolarField", "Poly2",
    "PolyVectorField", "ProcedureResult", "TrigPoly", "Verdict", "blow_up", "compute_diagram", "eta_from_oracle",
    "return_map", "run_procedure",
]
