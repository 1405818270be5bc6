"""Discrete Sobolev orthogonal polynomials with mass points off [-1, 1].

Exact rational construction of the monic Sobolev orthogonal polynomials,
certified zero location, associated polynomials and their recurrences,
Christoffel-type quadrature, and the rational approximants of the
Markov-type functions of the modified measure.
"""

from .errors import (
    ArgumentError,
    DecompositionError,
    DomainError,
    InternalConsistencyError,
    PrecisionError,
    PreconditionError,
    SobolevError,
    UnsupportedError,
)
from .exactpoly import Poly, RootInterval, format_poly, isolate_real_roots, refine_root, solve_linear_exact
from .measures import MeasureSpec, markov_eval, moments, standard_ops
from .sobolev import (
    MassTerm,
    SobolevProduct,
    check_sequential_order,
    compute_Sn,
    minimal_prescribed_polynomial,
    zero_report,
)
from .assoc import assoc_Qnk, assoc_Snk, christoffel, partial_fraction_R1
from .markov import R_nk, convergence_report, markov_k, phi, ratio_asymptotics_check
from .estimator import MarkovApproximant

__all__ = [
    "ArgumentError", "DecompositionError", "DomainError", "InternalConsistencyError",
    "PrecisionError", "PreconditionError", "SobolevError", "UnsupportedError",
    "Poly", "RootInterval", "format_poly", "isolate_real_roots", "refine_root", "solve_linear_exact",
    "MeasureSpec", "markov_eval", "moments", "standard_ops",
    "MassTerm", "SobolevProduct", "check_sequential_order", "compute_Sn",
    "minimal_prescribed_polynomial", "zero_report",
    "assoc_Qnk", "assoc_Snk", "christoffel", "partial_fraction_R1",
    "R_nk", "convergence_report", "markov_k", "phi", "ratio_asymptotics_check",
    "MarkovApproximant",
]
