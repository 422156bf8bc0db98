"""Hybrid algebras, two-sorted general frames and hybrid-logic derivations on finite structures."""

from hybrix.algebra import (
    FiniteBAO,
    HybridStructure,
    Kind,
    degenerate,
    grounded,
    hybrid,
    is_permeated,
    orthodox,
    product,
)
from hybrix.evaluation import Assignment, equation_true, meaning
from hybrix.kernels import BACKEND
from hybrix.syntax import Equation, Lang, parse, show

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Assignment",
    "Equation",
    "FiniteBAO",
    "HybridStructure",
    "Kind",
    "Lang",
    "degenerate",
    "equation_true",
    "grounded",
    "hybrid",
    "is_permeated",
    "meaning",
    "orthodox",
    "parse",
    "product",
    "show",
]
