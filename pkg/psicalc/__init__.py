#!/usr/bin/env python3
"""
psicalc Package
Exact formal twisted pseudodifferential symbol calculus in one and two
dimensions, noncommutative residues and the bi-singular symbol toolkit.
"""

__version__ = "0.3.0"
__description__ = "Exact formal pseudodifferential symbols, noncommutative residues and bi-singular symbols"

from .core import (
    AlgebraContext,
    ContextMismatchError,
    HypothesisError,
    HypothesisKind,
    HypothesisReport,
    PsicalcError,
    UncertifiedError,
    check_hypotheses,
    restrict_to_1d,
    verify_context,
)
from .instances import (
    make_circle2_context,
    make_circle_context,
    make_qtorus_1d_context,
    make_qtorus_context,
    make_torus4_context,
    make_torus_context,
)
from .scalars import Cyclotomic, GaussianRational, binom
from .symbols1d import Symbol1D, commutator, mul, p_poly, res, res_class, res_sigma, xi_pow_times
from .symbols2d import Symbol2D, commutator2, lemma_check, monomial_trace_check, mul2, res2

__all__ = [
    # Contexts and errors
    "AlgebraContext",
    "ContextMismatchError",
    "HypothesisError",
    "HypothesisKind",
    "HypothesisReport",
    "PsicalcError",
    "UncertifiedError",
    "check_hypotheses",
    "restrict_to_1d",
    "verify_context",
    # Instances
    "make_circle_context",
    "make_torus_context",
    "make_circle2_context",
    "make_torus4_context",
    "make_qtorus_context",
    "make_qtorus_1d_context",
    # Scalars
    "Cyclotomic",
    "GaussianRational",
    "binom",
    # Symbols
    "Symbol1D",
    "Symbol2D",
    "mul",
    "mul2",
    "commutator",
    "commutator2",
    "xi_pow_times",
    "p_poly",
    "res",
    "res_sigma",
    "res_class",
    "res2",
    "lemma_check",
    "monomial_trace_check",
    # Metadata
    "__version__",
    "__description__",
]
