"""Invariant hypersurfaces with linear prescribed mean curvature H = <eta, v> + lambda."""

from .model import (
    DomainError, ModelParams, ParameterError, PrescribedFunction, PrescribedKind, Setting,
    SolutionKind, SpecialSolution, eval_prescribed, special_solutions,
)

__version__ = "0.1.0"

__all__ = [
    "DomainError", "ModelParams", "ParameterError", "PrescribedFunction", "PrescribedKind",
    "Setting", "SolutionKind", "SpecialSolution", "eval_prescribed", "special_solutions",
    "__version__",
]
