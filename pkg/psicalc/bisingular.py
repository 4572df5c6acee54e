#!/usr/bin/env python3
"""
Bi-Singular Toolkit for psicalc
Component-indexed symbols over circle2 / torus4, the principal symbol of a
classical bi-singular operator, the Hilbert-transform symbol, quadrant
projections, the four residues and exact application of a symbol to a
trigonometric polynomial (the composition oracle).

Axis convention: for a frequency with k_j = 0 the components are averaged
over the sign index j, and k_j^m counts as 1 when m = 0 and 0 otherwise.
This makes sign(0) = 0 for the Hilbert symbol and keeps application exact.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .core import AlgebraContext, ContextMismatchError, UncertifiedError
from .instances import (
    CIRCLE2_LABELS,
    TORUS4_LABELS,
    FourierAlgebra,
    TrigPoly,
    TupleElement,
    make_circle2_context,
    make_torus4_context,
)
from .logging_utils import get_logger
from .scalars import ExactScalar, GaussianRational, format_scalar, parse_gaussian
from .symbols1d import Symbol1D, res
from .symbols2d import Symbol2D, res2

log = get_logger(__name__)

QuadrantSymbol = Symbol2D
AnySymbol = Union[Symbol1D, Symbol2D]


@dataclass(frozen=True)
class BisingularData:
    """
    Diagonal restrictions b0(z1,z2), b1(z1,z2,z1), b2(z1,z2,z2), b12(z1,z2,z1,z2)
    of the coefficients of a classical bi-singular operator, in x-coordinates.
    """

    b0: TrigPoly
    b1: TrigPoly
    b2: TrigPoly
    b12: TrigPoly

    def __post_init__(self):
        for name in ("b0", "b1", "b2", "b12"):
            if getattr(self, name).dim != 2:
                raise ValueError(f"{name} must be a Fourier polynomial on the 2-torus")

    @classmethod
    def of(cls, b0=None, b1=None, b2=None, b12=None) -> "BisingularData":
        """Missing entries default to zero"""
        zero = TrigPoly.zero_poly(2)
        return cls(b0 or zero, b1 or zero, b2 or zero, b12 or zero)


def _sign(exponent: int) -> int:
    return -1 if exponent % 2 else 1


def principal_symbol(d: BisingularData) -> TupleElement:
    """
    Component (s,t) = b0 - (-1)^s b1 - (-1)^t b2 + (-1)^(s+t) b12,
    components ordered (1,1), (1,2), (2,1), (2,2).
    """
    components = []
    for label in TORUS4_LABELS:
        s, t = int(label[0]), int(label[1])
        component = (
            d.b0
            - d.b1.scale(_sign(s))
            - d.b2.scale(_sign(t))
            + d.b12.scale(_sign(s + t))
        )
        components.append(component)
    return TupleElement(tuple(components))


def principal_symbol_2d(d: BisingularData, ctx: Optional[AlgebraContext] = None) -> QuadrantSymbol:
    """The principal symbol as an order-(0,0) quadrant symbol"""
    ctx = ctx or make_torus4_context()
    return Symbol2D.constant(ctx, principal_symbol(d))


def hilbert_symbol(ctx: Optional[AlgebraContext] = None) -> Symbol1D:
    """sign(xi) as the order-0 circle2 symbol with coefficient (1, -1)"""
    ctx = ctx or make_circle2_context()
    _require_fourier(ctx, copies=2, dim=1)
    coefficient = TupleElement((TrigPoly.constant(1, 1), TrigPoly.constant(1, -1)))
    return Symbol1D.constant(ctx, coefficient)


def _require_fourier(ctx: AlgebraContext, copies: int, dim: int) -> FourierAlgebra:
    algebra = ctx.algebra
    if not isinstance(algebra, FourierAlgebra) or algebra.copies != copies or algebra.dim != dim:
        raise ContextMismatchError(
            f"expected a {copies}-component Fourier context of dimension {dim}, got {ctx.kind}"
        )
    return algebra


def symbol_from_components(
    ctx: AlgebraContext,
    components: Mapping[str, TrigPoly],
    m: int = 0,
    n: int = 0,
) -> QuadrantSymbol:
    """a^(s,t) xi1^m xi2^n from a label -> polynomial map (missing labels are zero)"""
    _require_fourier(ctx, copies=4, dim=2)
    zero = TrigPoly.zero_poly(2)
    element = TupleElement(tuple(components.get(label, zero) for label in TORUS4_LABELS))
    return Symbol2D.monomial(ctx, element, m, n)


def toeplitz_quadrant(d: QuadrantSymbol) -> QuadrantSymbol:
    """P_++: keep component (1,1) of every coefficient"""
    _require_fourier(d.ctx, copies=4, dim=2)
    zero = TrigPoly.zero_poly(2)
    return d.map_coefficients(lambda c: TupleElement((c.components[0], zero, zero, zero)))


def residues(d: QuadrantSymbol) -> Dict[str, ExactScalar]:
    """Res_{s,t}(D) = tau_{s,t}(a_{-1,-1}) for the four quadrants, in (1,1)..(2,2) order"""
    _require_fourier(d.ctx, copies=4, dim=2)
    return {label: res2(d, label) for label in TORUS4_LABELS}


def residues_1d(d: Symbol1D) -> Dict[str, ExactScalar]:
    """res_s(D) = tau_s(a_{-1}) for s = 1, 2 on circle2"""
    _require_fourier(d.ctx, copies=2, dim=1)
    return {label: res(d, label) for label in CIRCLE2_LABELS}


def format_residues(values: Mapping[str, ExactScalar]) -> Dict[str, str]:
    return {label: format_scalar(v) for label, v in values.items()}


# ============================================================================
# OPERATOR APPLICATION
# ============================================================================


def _sign_indices(k: int) -> Tuple[int, ...]:
    """Component sign indices seen by frequency k (0 -> positive side, 1 -> negative side)"""
    if k > 0:
        return (0,)
    if k < 0:
        return (1,)
    return (0, 1)


def _frequency_factor(k: int, exponent: int) -> Fraction:
    if k == 0:
        return Fraction(1) if exponent == 0 else Fraction(0)
    return Fraction(k) ** exponent


def _local_coefficient(algebra: FourierAlgebra, element, mode: Sequence[int]) -> TrigPoly:
    """The component of ``element`` acting on frequency ``mode`` (averaged on axes)"""
    if algebra.copies == 1:
        return element
    choices = [_sign_indices(k) for k in mode]
    picks = list(itertools.product(*choices))
    total = TrigPoly.zero_poly(algebra.dim)
    for pick in picks:
        index = pick[0] if algebra.dim == 1 else 2 * pick[0] + pick[1]
        total = total + element.components[index]
    if len(picks) == 1:
        return total
    return total.scale(Fraction(1, len(picks)))


def _symbol_terms(d: AnySymbol) -> List[Tuple[Tuple[int, ...], Any]]:
    if isinstance(d, Symbol1D):
        if not d.is_exact:
            raise UncertifiedError("only exact symbols can be applied to a function")
        return [((n,), c) for n, c in d.terms]
    if not d.is_exact:
        raise UncertifiedError("only exact symbols can be applied to a function")
    return [((m, n), c) for (m, n), c in d.terms]


def apply_operator(d: AnySymbol, u: TrigPoly) -> TrigPoly:
    """
    a(x, D) u = sum_k e_k(x) a(x, k) c_k for a finite exact symbol: each term
    a_m xi^m contributes a^(quadrant of k)(x) * k^m * c_k e_k(x).

    Raises:
        UncertifiedError: the symbol carries a truncated tail
        ContextMismatchError: the symbol is not over a Fourier context
    """
    ctx = d.ctx
    algebra = ctx.algebra
    if not isinstance(algebra, FourierAlgebra):
        raise ContextMismatchError(f"apply_operator needs a Fourier context, not {ctx.kind}")
    if u.dim != algebra.dim:
        raise ValueError(f"u lives in dimension {u.dim}, the symbol in {algebra.dim}")

    terms = _symbol_terms(d)
    result = TrigPoly.zero_poly(algebra.dim)
    for mode, c in u.terms:
        for orders, coefficient in terms:
            factor = Fraction(1)
            for k, exponent in zip(mode, orders):
                factor *= _frequency_factor(k, exponent)
            if factor == 0:
                continue
            local = _local_coefficient(algebra, coefficient, mode)
            result = result + local * TrigPoly.mode(mode, c * GaussianRational.coerce(factor))
    return result


def parse_u(data: Mapping[str, Any], dim: int) -> TrigPoly:
    """Fourier data {"3,-2": "1/2+i", ...} as a TrigPoly"""
    coefficients = {}
    for key, value in data.items():
        mode = tuple(int(part) for part in str(key).split(","))
        if len(mode) != dim:
            raise ValueError(f"mode {key!r} does not have dimension {dim}")
        coefficients[mode] = parse_gaussian(str(value)) if isinstance(value, str) else value
    return TrigPoly.from_map(dim, coefficients)
