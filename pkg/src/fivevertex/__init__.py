"""Exact and asymptotic computations for the five-vertex model with
scalar-product boundary conditions."""
from .hankel import DomainError, P_exact_polynomial, P_via_pnew, P_via_zhom1, P_via_zhom2
from .model import Configuration, LatticeSpec, SpecError, Weights, macmahon_PL
from .polynomial import ExactPolynomial

__version__ = "0.1.0"

__all__ = [
    "LatticeSpec", "Configuration", "Weights", "ExactPolynomial", "macmahon_PL",
    "SpecError", "DomainError", "P_exact_polynomial", "P_via_pnew", "P_via_zhom1", "P_via_zhom2",
]
