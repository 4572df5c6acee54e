#!/usr/bin/env python3
"""
Two-Dimensional Symbol Calculus for psicalc
Symbols  sum a_{m,n} xi_1^m xi_2^n  of Psi(A, sigma, delta_1, delta_2), the
closed-form product, the residue Res(D) = tau(a_{-1,-1}) and the checks
behind its trace property.
"""

from dataclasses import dataclass
from typing import Any, Dict, Iterator, Mapping, Optional, Sequence, Tuple, Union

from .core import (
    AlgebraContext,
    ContextMismatchError,
    HypothesisError,
    HypothesisKind,
    TraceSelector,
    UncertifiedError,
)
from .logging_utils import get_logger
from .scalars import ExactScalar, ScalarLike, binom, format_scalar, scalar_is_zero
from .symbols1d import Floor, accumulate, join_floors, product_floor

log = get_logger(__name__)

Element = Any
Order2 = Tuple[int, int]
Floors2 = Tuple[Floor, Floor]
FloorSpec = Union[None, int, Sequence[Floor]]


def normalize_floors(spec: FloorSpec) -> Floors2:
    """None, one floor for both axes, or a per-axis pair"""
    if spec is None:
        return (None, None)
    if isinstance(spec, int):
        return (spec, spec)
    first, second = spec
    return (first, second)


class Symbol2D:
    """
    Element of Psi(A, sigma, delta_1, delta_2) with per-axis tops and floors.

    Coefficients with m < floors[0] or n < floors[1] are unknown.
    """

    __slots__ = ("ctx", "terms", "tops", "floors")

    def __init__(
        self,
        ctx: AlgebraContext,
        terms: Mapping[Order2, Element],
        tops: Optional[Order2] = None,
        floors: FloorSpec = None,
    ):
        if ctx.dimension != 2:
            raise ContextMismatchError(
                f"two-dimensional symbols need a two-derivation context, {ctx.kind} has {ctx.dimension}"
            )
        f1, f2 = normalize_floors(floors)
        cleaned = {
            (int(m), int(n)): c
            for (m, n), c in terms.items()
            if not c.is_zero() and (f1 is None or m >= f1) and (f2 is None or n >= f2)
        }
        if tops is None:
            tops = (
                max((m for m, _ in cleaned), default=f1 if f1 is not None else 0),
                max((n for _, n in cleaned), default=f2 if f2 is not None else 0),
            )
        for axis, (top, floor) in enumerate(zip(tops, (f1, f2))):
            if any(order[axis] > top for order in cleaned):
                raise ValueError(f"term above declared top {top} on axis {axis + 1}")
            if floor is not None and floor > top:
                raise ValueError(f"floor {floor} above top {top} on axis {axis + 1}")
        self.ctx = ctx
        self.terms: Tuple[Tuple[Order2, Element], ...] = tuple(sorted(cleaned.items(), reverse=True))
        self.tops: Order2 = (int(tops[0]), int(tops[1]))
        self.floors: Floors2 = (f1, f2)

    @classmethod
    def zero(cls, ctx: AlgebraContext) -> "Symbol2D":
        return cls(ctx, {})

    @classmethod
    def monomial(cls, ctx: AlgebraContext, a: Element, m: int = 0, n: int = 0) -> "Symbol2D":
        """a xi_1^m xi_2^n (exact)"""
        return cls(ctx, {(m, n): a}, tops=(m, n))

    @classmethod
    def constant(cls, ctx: AlgebraContext, a: Element) -> "Symbol2D":
        return cls.monomial(ctx, a)

    @classmethod
    def unit(cls, ctx: AlgebraContext) -> "Symbol2D":
        return cls.monomial(ctx, ctx.one())

    @classmethod
    def xi(cls, ctx: AlgebraContext, axis: int, power: int = 1) -> "Symbol2D":
        """xi_axis^power for axis 1 or 2"""
        if axis not in (1, 2):
            raise ValueError(f"axis must be 1 or 2, got {axis}")
        orders = (power, 0) if axis == 1 else (0, power)
        return cls.monomial(ctx, ctx.one(), *orders)

    @property
    def is_exact(self) -> bool:
        return self.floors == (None, None)

    def negative_on_axis(self, axis: int) -> bool:
        return any(order[axis] < 0 for order, _ in self.terms)

    def certifies(self, m: int, n: int) -> bool:
        f1, f2 = self.floors
        return (f1 is None or m >= f1) and (f2 is None or n >= f2)

    def coefficient(self, m: int, n: int) -> Element:
        if not self.certifies(m, n):
            raise UncertifiedError(
                f"coefficient of xi1^{m} xi2^{n} is below the certified floors {self.floors}"
            )
        return dict(self.terms).get((m, n), self.ctx.zero())

    def truncate(self, floors: FloorSpec) -> "Symbol2D":
        g1, g2 = normalize_floors(floors)
        f1 = join_floors(self.floors[0], g1)
        f2 = join_floors(self.floors[1], g2)
        tops = (
            self.tops[0] if f1 is None else max(self.tops[0], f1),
            self.tops[1] if f2 is None else max(self.tops[1], f2),
        )
        return Symbol2D(self.ctx, dict(self.terms), tops=tops, floors=(f1, f2))

    def agrees_with(self, other: "Symbol2D", floors: FloorSpec = None) -> bool:
        """Equal coefficients on every bi-order certified by both (and >= floors)"""
        self.ctx.require_same(other.ctx)
        g1, g2 = normalize_floors(floors)
        f1 = join_floors(self.floors[0], other.floors[0], g1)
        f2 = join_floors(self.floors[1], other.floors[1], g2)

        def visible(terms):
            return {
                (m, n): c
                for (m, n), c in terms
                if (f1 is None or m >= f1) and (f2 is None or n >= f2)
            }

        return visible(self.terms) == visible(other.terms)

    def axis1_terms(self) -> Dict[int, Element]:
        """Coefficients of the xi_1-only part (n = 0)"""
        return {m: c for (m, n), c in self.terms if n == 0}

    def _combine(self, other: "Symbol2D", sign: int) -> "Symbol2D":
        self.ctx.require_same(other.ctx)
        acc = dict(self.terms)
        for order, c in other.terms:
            accumulate(acc, order, c if sign > 0 else -c)
        floors = (
            join_floors(self.floors[0], other.floors[0]),
            join_floors(self.floors[1], other.floors[1]),
        )
        tops = (max(self.tops[0], other.tops[0]), max(self.tops[1], other.tops[1]))
        return Symbol2D(self.ctx, acc, tops=tops, floors=floors)

    def __add__(self, other: "Symbol2D") -> "Symbol2D":
        return self._combine(other, 1)

    def __sub__(self, other: "Symbol2D") -> "Symbol2D":
        return self._combine(other, -1)

    def __neg__(self) -> "Symbol2D":
        return Symbol2D(self.ctx, {o: -c for o, c in self.terms}, tops=self.tops, floors=self.floors)

    def scale(self, factor: ScalarLike) -> "Symbol2D":
        factor = self.ctx.algebra.scalar(factor)
        return Symbol2D(
            self.ctx, {o: c.scale(factor) for o, c in self.terms}, tops=self.tops, floors=self.floors
        )

    def map_coefficients(self, fn) -> "Symbol2D":
        return Symbol2D(self.ctx, {o: fn(c) for o, c in self.terms}, tops=self.tops, floors=self.floors)

    def __mul__(self, other: "Symbol2D") -> "Symbol2D":
        if isinstance(other, Symbol2D):
            return mul2(self, other)
        return self.scale(other)

    def __rmul__(self, other: ScalarLike) -> "Symbol2D":
        return self.scale(other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Symbol2D):
            return NotImplemented
        return self.ctx is other.ctx and self.floors == other.floors and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((id(self.ctx), self.floors, self.terms))

    def __repr__(self) -> str:
        body = " + ".join(f"({c})*xi1^{m}*xi2^{n}" for (m, n), c in self.terms) or "0"
        return f"Symbol2D[{self.ctx.kind}]({body}; floors={self.floors})"

    def to_table(self) -> Dict[str, Any]:
        """Deterministic JSON-ready coefficient table, order pairs ascending"""
        return {
            "context": self.ctx.kind,
            "dimension": 2,
            "tops": list(self.tops),
            "floors": list(self.floors),
            "exact": self.is_exact,
            "terms": [
                {"order": [m, n], "coefficient": self.ctx.algebra.format_element(c)}
                for (m, n), c in reversed(self.terms)
            ],
        }


# ============================================================================
# PRODUCT
# ============================================================================


def _j_range(m: int, p: int, floor: Floor) -> Iterator[int]:
    """j >= 0 with C(m, j) possibly nonzero and m + p - j >= floor"""
    j = 0
    while True:
        if m >= 0 and j > m:
            return
        if floor is not None and m + p - j < floor:
            return
        yield j
        j += 1


def _xi_monomial_times(
    ctx: AlgebraContext, m: int, n: int, b: Element, p: int, q: int, floors: Floors2
) -> Dict[Order2, Element]:
    """
    Terms of xi_1^m xi_2^n b xi_1^p xi_2^q:
    sum C(m,j1) C(n,j2) sigma^(m+n-j1-j2) delta_1^j1 delta_2^j2 (b) xi_1^(m+p-j1) xi_2^(n+q-j2)
    """
    f1, f2 = floors

    def compute() -> Dict[Order2, Element]:
        result: Dict[Order2, Element] = {}
        for j2 in _j_range(n, q, f2):
            inner = ctx.delta_power(1, j2, b)
            if inner.is_zero():
                break
            c2 = binom(n, j2)
            for j1 in _j_range(m, p, f1):
                d = ctx.delta_power(0, j1, inner)
                if d.is_zero():
                    break
                coeff = binom(m, j1) * c2
                if not coeff:
                    continue
                term = ctx.sigma_power(m + n - j1 - j2, d).scale(ctx.algebra.scalar(coeff))
                if not term.is_zero():
                    result[(m + p - j1, n + q - j2)] = term
        return result

    return ctx.memoize(("xi2_times", m, n, b, p, q, floors), compute)


def mul2(d1: Symbol2D, d2: Symbol2D, floors: FloorSpec = None) -> Symbol2D:
    """
    Product in Psi(A, sigma, delta_1, delta_2) by the closed binomial formula.

    Per axis the result is certified down to
    max(floor(D1) + top(D2), floor(D2) + top(D1)), raised to ``floors`` when given.

    Raises:
        ContextMismatchError: operands from different contexts
        HypothesisError: the context has not passed the hypothesis checker
        UncertifiedError: an infinite expansion on an axis with no floor
    """
    d1.ctx.require_same(d2.ctx)
    ctx = d1.ctx
    ctx.require_checked()
    requested = normalize_floors(floors)
    tops = (d1.tops[0] + d2.tops[0], d1.tops[1] + d2.tops[1])
    result_floors = []
    for axis in range(2):
        floor = join_floors(
            product_floor(d1.floors[axis], d1.tops[axis], d2.floors[axis], d2.tops[axis]),
            requested[axis],
        )
        if floor is None and d1.negative_on_axis(axis):
            raise UncertifiedError(
                f"the product expands to infinitely many orders in xi{axis + 1}; pass a floor"
            )
        if floor is not None:
            floor = min(floor, tops[axis])
        result_floors.append(floor)
    f1, f2 = result_floors

    acc: Dict[Order2, Element] = {}
    for (m, n), a in d1.terms:
        for (p, q), b in d2.terms:
            if (f1 is not None and m + p < f1) or (f2 is not None and n + q < f2):
                continue
            for order, c in _xi_monomial_times(ctx, m, n, b, p, q, (f1, f2)).items():
                accumulate(acc, order, a * c)
    product = Symbol2D(ctx, acc, tops=tops, floors=(f1, f2))
    log.debug("product_computed", context=ctx.kind, terms=len(product.terms), floors=(f1, f2))
    return product


def commutator2(d1: Symbol2D, d2: Symbol2D, floors: FloorSpec = None) -> Symbol2D:
    """[D1, D2] = D1 D2 - D2 D1, both products computed in full"""
    return mul2(d1, d2, floors) - mul2(d2, d1, floors)


# ============================================================================
# RESIDUE AND TRACE CHECKS
# ============================================================================


def _residue_trace(ctx: AlgebraContext, trace: TraceSelector):
    ctx.require_checked()
    selected = ctx.trace(trace)
    if not ctx.sigma_is_identity and selected.kind.twist_power != 2:
        raise HypothesisError(
            f"Res needs a sigma^2-trace; {selected.name} has twist power {selected.kind.twist_power}",
            ctx.report,
        )
    return selected


def res2(d: Symbol2D, trace: TraceSelector = 0) -> ExactScalar:
    """Res(D) = tau(a_{-1,-1})"""
    selected = _residue_trace(d.ctx, trace)
    f1, f2 = d.floors
    if (f1 is not None and f1 > -1) or (f2 is not None and f2 > -1):
        raise UncertifiedError(
            f"the xi1^-1 xi2^-1 coefficient is not certified (floors {d.floors})"
        )
    return selected(d.coefficient(-1, -1))


@dataclass(frozen=True)
class TraceCheckReport:
    """Both sides of Res(a xi^(m,n) b xi^(p,q)) = Res(b xi^(p,q) a xi^(m,n)) and their closed forms"""

    trace: str
    orders: Tuple[int, int, int, int]
    left: ExactScalar
    right: ExactScalar
    closed_left: ExactScalar
    closed_mirror: ExactScalar
    closed_right: ExactScalar

    @property
    def equal(self) -> bool:
        values = (self.right, self.closed_left, self.closed_mirror, self.closed_right)
        return all(scalar_is_zero(self.left - v) for v in values)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "trace": self.trace,
            "orders": list(self.orders),
            "left": format_scalar(self.left),
            "right": format_scalar(self.right),
            "closed_left": format_scalar(self.closed_left),
            "closed_mirror": format_scalar(self.closed_mirror),
            "closed_right": format_scalar(self.closed_right),
            "equal": self.equal,
        }


def _closed_term(ctx: AlgebraContext, a: Element, b: Element, m: int, n: int, i: int, j: int, weight) -> Element:
    """weight * a sigma^(m+n-i-j) delta_1^i delta_2^j (b), zero for negative i or j"""
    if i < 0 or j < 0 or not weight:
        return ctx.zero()
    d = ctx.delta_power(0, i, ctx.delta_power(1, j, b))
    return (a * ctx.sigma_power(m + n - i - j, d)).scale(ctx.algebra.scalar(weight))


def monomial_residue_closed(
    ctx: AlgebraContext,
    a: Element,
    b: Element,
    m: int,
    n: int,
    p: int,
    q: int,
    trace: TraceSelector = 0,
) -> Tuple[ExactScalar, ExactScalar]:
    """
    The (-1,-1) coefficient of  a xi^(m,n) b xi^(p,q)  in closed form, traced:
    C(m,i) C(n,j) tau(a sigma^(m+n-i-j) delta_1^i delta_2^j (b)) with i = m+p+1,
    j = n+q+1, and the same value written with (-1)^(i+j) C(p,i) C(q,j).
    """
    selected = ctx.trace(trace)
    i, j = m + p + 1, n + q + 1
    if i < 0 or j < 0:
        zero = selected(ctx.zero())
        return zero, zero
    left = selected(_closed_term(ctx, a, b, m, n, i, j, binom(m, i) * binom(n, j)))
    sign = -1 if (i + j) % 2 else 1
    mirror = selected(_closed_term(ctx, a, b, m, n, i, j, sign * binom(p, i) * binom(q, j)))
    return left, mirror


def monomial_trace_check(
    ctx: AlgebraContext,
    a: Element,
    b: Element,
    m: int,
    n: int,
    p: int,
    q: int,
    trace: TraceSelector = 0,
) -> TraceCheckReport:
    """Res(a xi1^m xi2^n  b xi1^p xi2^q) against Res(b xi1^p xi2^q  a xi1^m xi2^n)"""
    selected = _residue_trace(ctx, trace)
    first = Symbol2D.monomial(ctx, a, m, n)
    second = Symbol2D.monomial(ctx, b, p, q)
    # only the (-1,-1) coefficient is needed, so floors (-1,-1) certify it exactly
    left = res2(mul2(first, second, (-1, -1)), selected.name)
    right = res2(mul2(second, first, (-1, -1)), selected.name)
    closed_left, closed_mirror = monomial_residue_closed(ctx, a, b, m, n, p, q, selected.name)
    closed_right, _ = monomial_residue_closed(ctx, b, a, p, q, m, n, selected.name)
    report = TraceCheckReport(
        selected.name, (m, n, p, q), left, right, closed_left, closed_mirror, closed_right
    )
    if not report.equal:
        log.warning("trace_check_failed", context=ctx.kind, **report.to_dict())
    return report


@dataclass(frozen=True)
class LemmaCheckReport:
    """tau(delta^i(a) b) against (-1)^i tau(sigma^i(a) delta^i(b))"""

    trace: str
    delta_index: int
    power: int
    lhs: ExactScalar
    rhs: ExactScalar

    @property
    def equal(self) -> bool:
        return scalar_is_zero(self.lhs - self.rhs)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "trace": self.trace,
            "delta": self.delta_index + 1,
            "power": self.power,
            "lhs": format_scalar(self.lhs),
            "rhs": format_scalar(self.rhs),
            "equal": self.equal,
        }


def lemma_check(
    ctx: AlgebraContext,
    a: Element,
    b: Element,
    delta_index: int,
    i: int,
    trace: TraceSelector = 0,
) -> LemmaCheckReport:
    """
    Integration by parts: tau(delta^i(a) b) = (-1)^i tau(sigma^i(a) delta^i(b)).

    Raises:
        HypothesisError: tau is not delta-invariant or sigma and delta do not commute
    """
    if not 0 <= i <= 4:
        raise ValueError(f"power must lie in 0..4, got {i}")
    if not 0 <= delta_index < ctx.dimension:
        raise ValueError(f"context {ctx.kind} has no derivation {delta_index + 1}")
    ctx.require_checked()
    selected = ctx.trace(trace)
    subject = f"delta{delta_index + 1}"
    report = ctx.report
    if not report.holds(HypothesisKind.TRACE_DELTA_INVARIANT, f"{selected.name},{subject}"):
        raise HypothesisError(f"{selected.name} is not {subject}-invariant", report)
    if not ctx.sigma_is_identity and not report.holds(HypothesisKind.DELTA_SIGMA_COMMUTE, subject):
        raise HypothesisError(f"sigma and {subject} do not commute on {ctx.kind}", report)

    lhs = selected(ctx.delta_power(delta_index, i, a) * b)
    rhs = selected(ctx.sigma_power(i, a) * ctx.delta_power(delta_index, i, b))
    if i % 2:
        rhs = -rhs
    return LemmaCheckReport(selected.name, delta_index, i, lhs, rhs)


def residue_values(d: Symbol2D, traces: Optional[Sequence[TraceSelector]] = None) -> Dict[str, ExactScalar]:
    """Res under each selected trace (by default every sigma^2-trace of the context)"""
    ctx = d.ctx
    if traces is None:
        selected = [
            t.name for t in ctx.traces if ctx.sigma_is_identity or t.kind.twist_power == 2
        ]
    else:
        selected = list(traces)
    return {d.ctx.trace(t).name: res2(d, t) for t in selected}
