#!/usr/bin/env python3
"""
One-Dimensional Symbol Calculus for psicalc
Formal (twisted) pseudodifferential symbols  sum_n a_n xi^n  over a
one-derivation context, with certified truncation floors, the products
built from  xi a = sigma(a) xi + delta(a), the residues res and res_sigma,
and the Toeplitz projection of the two-component circle algebra.

A floor of None means the symbol is exact: every coefficient is known and
the stored terms are all of them.
"""

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple

from .core import (
    AlgebraContext,
    ContextMismatchError,
    HypothesisError,
    HypothesisKind,
    TraceSelector,
    UncertifiedError,
)
from .instances import FourierAlgebra, TrigPoly, TupleElement
from .logging_utils import get_logger
from .scalars import ExactScalar, ScalarLike, binom, format_scalar

log = get_logger(__name__)

Element = Any
Floor = Optional[int]


# ============================================================================
# FLOOR ARITHMETIC
# ============================================================================


def join_floors(*floors: Floor) -> Floor:
    """Largest floor, None counting as minus infinity"""
    known = [f for f in floors if f is not None]
    return max(known) if known else None


def product_floor(floor1: Floor, top1: int, floor2: Floor, top2: int) -> Floor:
    """Certified floor of a product: max(floor1 + top2, floor2 + top1)"""
    return join_floors(
        None if floor1 is None else floor1 + top2,
        None if floor2 is None else floor2 + top1,
    )


def accumulate(acc: Dict, key, value: Element) -> None:
    if key in acc:
        acc[key] = acc[key] + value
    else:
        acc[key] = value


# ============================================================================
# SYMBOLS
# ============================================================================


class Symbol1D:
    """
    Element of Psi(A, sigma, delta): finitely many stored terms a_n xi^n with
    a declared top order and a certified floor.
    """

    __slots__ = ("ctx", "terms", "top", "floor")

    def __init__(
        self,
        ctx: AlgebraContext,
        terms: Mapping[int, Element],
        top: Optional[int] = None,
        floor: Floor = None,
    ):
        if ctx.dimension != 1:
            raise ContextMismatchError(
                f"one-dimensional symbols need a one-derivation context, {ctx.kind} has {ctx.dimension}"
            )
        cleaned = {
            int(n): c
            for n, c in terms.items()
            if not c.is_zero() and (floor is None or n >= floor)
        }
        if top is None:
            top = max(cleaned) if cleaned else (floor if floor is not None else 0)
        if cleaned and max(cleaned) > top:
            raise ValueError(f"term of order {max(cleaned)} above declared top {top}")
        if floor is not None and floor > top:
            raise ValueError(f"floor {floor} above top {top}")
        self.ctx = ctx
        self.terms: Tuple[Tuple[int, Element], ...] = tuple(sorted(cleaned.items(), reverse=True))
        self.top = top
        self.floor = floor

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls, ctx: AlgebraContext) -> "Symbol1D":
        return cls(ctx, {})

    @classmethod
    def monomial(cls, ctx: AlgebraContext, a: Element, n: int = 0) -> "Symbol1D":
        """a xi^n (exact)"""
        return cls(ctx, {n: a}, top=n)

    @classmethod
    def constant(cls, ctx: AlgebraContext, a: Element) -> "Symbol1D":
        return cls.monomial(ctx, a, 0)

    @classmethod
    def unit(cls, ctx: AlgebraContext) -> "Symbol1D":
        return cls.monomial(ctx, ctx.one(), 0)

    @classmethod
    def xi(cls, ctx: AlgebraContext, n: int = 1) -> "Symbol1D":
        return cls.monomial(ctx, ctx.one(), n)

    # -- inspection ------------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self.floor is None

    @property
    def orders(self) -> List[int]:
        return [n for n, _ in self.terms]

    @property
    def has_negative_orders(self) -> bool:
        return any(n < 0 for n, _ in self.terms)

    def coefficient(self, order: int) -> Element:
        """a_order; orders below the floor are uncertified"""
        if self.floor is not None and order < self.floor:
            raise UncertifiedError(
                f"coefficient of xi^{order} is below the certified floor {self.floor}"
            )
        return dict(self.terms).get(order, self.ctx.zero())

    def truncate(self, floor: int) -> "Symbol1D":
        new_floor = join_floors(self.floor, floor)
        return Symbol1D(self.ctx, dict(self.terms), top=max(self.top, new_floor), floor=new_floor)

    def agrees_with(self, other: "Symbol1D", floor: Floor = None) -> bool:
        """Equal coefficients at every order both certify (and >= floor)"""
        self.ctx.require_same(other.ctx)
        common = join_floors(self.floor, other.floor, floor)
        mine = {n: c for n, c in self.terms if common is None or n >= common}
        theirs = {n: c for n, c in other.terms if common is None or n >= common}
        return mine == theirs

    # -- arithmetic ------------------------------------------------------

    def _combine(self, other: "Symbol1D", sign: int) -> "Symbol1D":
        self.ctx.require_same(other.ctx)
        acc = dict(self.terms)
        for n, c in other.terms:
            accumulate(acc, n, c if sign > 0 else -c)
        floor = join_floors(self.floor, other.floor)
        return Symbol1D(self.ctx, acc, top=max(self.top, other.top), floor=floor)

    def __add__(self, other: "Symbol1D") -> "Symbol1D":
        return self._combine(other, 1)

    def __sub__(self, other: "Symbol1D") -> "Symbol1D":
        return self._combine(other, -1)

    def __neg__(self) -> "Symbol1D":
        return Symbol1D(self.ctx, {n: -c for n, c in self.terms}, top=self.top, floor=self.floor)

    def scale(self, factor: ScalarLike) -> "Symbol1D":
        factor = self.ctx.algebra.scalar(factor)
        return Symbol1D(self.ctx, {n: c.scale(factor) for n, c in self.terms}, top=self.top, floor=self.floor)

    def __mul__(self, other: "Symbol1D") -> "Symbol1D":
        if isinstance(other, Symbol1D):
            return mul(self, other)
        return self.scale(other)

    def __rmul__(self, other: ScalarLike) -> "Symbol1D":
        return self.scale(other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Symbol1D):
            return NotImplemented
        return self.ctx is other.ctx and self.floor == other.floor and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((id(self.ctx), self.floor, self.terms))

    def __repr__(self) -> str:
        body = " + ".join(f"({c})*xi^{n}" for n, c in self.terms) or "0"
        tail = "" if self.floor is None else f" + O(xi^{self.floor - 1})"
        return f"Symbol1D[{self.ctx.kind}]({body}{tail})"

    def to_table(self) -> Dict[str, Any]:
        """Deterministic JSON-ready coefficient table, orders ascending"""
        return {
            "context": self.ctx.kind,
            "dimension": 1,
            "top": self.top,
            "floor": self.floor,
            "exact": self.is_exact,
            "terms": [
                {"order": n, "coefficient": self.ctx.algebra.format_element(c)}
                for n, c in reversed(self.terms)
            ],
        }


# ============================================================================
# OPERATOR WORDS IN SIGMA AND DELTA
# ============================================================================


class Letter(Enum):
    """Letters of the operator words P_{i,n}(sigma, delta)"""

    SIGMA = ("sigma", "σ")
    DELTA = ("delta", "δ")

    def __init__(self, key: str, glyph: str):
        self.key = key
        self.glyph = glyph


OpWord = Tuple[Letter, ...]


def p_poly(i: int, n: int) -> List[OpWord]:
    """
    The C(n, i) words of length n with exactly i letters sigma, from
    P_{i,n+1} = sigma P_{i-1,n} + delta P_{i,n}, P_{0,1} = {delta}, P_{1,1} = {sigma}.

    The leftmost letter of a word is applied last.
    """
    if n < 1:
        raise ValueError(f"p_poly needs n >= 1, got {n}")
    if not 0 <= i <= n:
        raise ValueError(f"p_poly needs 0 <= i <= n, got i={i}, n={n}")
    table: Dict[Tuple[int, int], List[OpWord]] = {
        (0, 1): [(Letter.DELTA,)],
        (1, 1): [(Letter.SIGMA,)],
    }
    for length in range(1, n):
        for k in range(0, length + 2):
            words: List[OpWord] = []
            if k >= 1:
                words.extend((Letter.SIGMA,) + w for w in table.get((k - 1, length), []))
            words.extend((Letter.DELTA,) + w for w in table.get((k, length), []))
            table[(k, length + 1)] = words
    return sorted(table[(i, n)], key=lambda w: [letter.key for letter in w])


def format_word(word: OpWord) -> str:
    """Compact form with powers, e.g. "σδσ^2" """
    parts = []
    for letter, group in itertools.groupby(word):
        power = len(list(group))
        parts.append(letter.glyph + (f"^{power}" if power > 1 else ""))
    return "".join(parts)


def apply_word(ctx: AlgebraContext, word: OpWord, a: Element, delta_index: int = 0) -> Element:
    """Evaluate an operator word on a (rightmost letter first)"""
    for letter in reversed(word):
        a = ctx.sigma(a) if letter is Letter.SIGMA else ctx.deltas[delta_index](a)
    return a


# ============================================================================
# XI^n TIMES A
# ============================================================================


def _xi_step(ctx: AlgebraContext, expansion: Dict[int, Element]) -> Dict[int, Element]:
    """Left multiplication by xi: c xi^k -> sigma(c) xi^(k+1) + delta(c) xi^k"""
    delta = ctx.deltas[0]
    result: Dict[int, Element] = {}
    for k, c in expansion.items():
        accumulate(result, k + 1, ctx.sigma(c))
        accumulate(result, k, delta(c))
    return {k: c for k, c in result.items() if not c.is_zero()}


def _xi_inverse_terms(ctx: AlgebraContext, c: Element, depth: int) -> List[Element]:
    """
    Signed coefficients of  xi^-1 c = sum_i (-1)^i sigma^-1 (delta sigma^-1)^i (c) xi^(-1-i)
    for i = 0..depth.
    """
    delta = ctx.deltas[0]
    terms: List[Element] = []
    h = c
    for i in range(depth + 1):
        if h.is_zero():
            break
        base = ctx.sigma_power(-1, h)
        terms.append(base if i % 2 == 0 else -base)
        h = delta(base)
    return terms


def _xi_inverse_step(ctx: AlgebraContext, expansion: Dict[int, Element], floor: int) -> Dict[int, Element]:
    """Left multiplication by xi^-1, keeping orders >= floor"""
    result: Dict[int, Element] = {}
    for k, c in expansion.items():
        depth = k - 1 - floor
        if depth < 0:
            continue
        for i, term in enumerate(_xi_inverse_terms(ctx, c, depth)):
            accumulate(result, k - 1 - i, term)
    return {k: c for k, c in result.items() if not c.is_zero()}


def _expand_iterated(ctx: AlgebraContext, n: int, a: Element, floor: Floor) -> Dict[int, Element]:
    def compute() -> Dict[int, Element]:
        expansion = {0: a} if not a.is_zero() else {}
        if n >= 0:
            for _ in range(n):
                expansion = _xi_step(ctx, expansion)
            if floor is not None:
                expansion = {k: c for k, c in expansion.items() if k >= floor}
            return expansion
        for _ in range(-n):
            expansion = _xi_inverse_step(ctx, expansion, floor)
        return expansion

    if n < 0 and floor is None:
        raise UncertifiedError(f"xi^{n} a is an infinite expansion; a floor is required")
    return ctx.memoize(("xi_iterated", n, a, floor), compute)


def _expand_binomial(ctx: AlgebraContext, n: int, a: Element, floor: Floor, delta_index: int = 0) -> Dict[int, Element]:
    def compute() -> Dict[int, Element]:
        lowest = 0 if n >= 0 else floor
        if n >= 0 and floor is not None:
            lowest = max(lowest, floor)
        expansion: Dict[int, Element] = {}
        j = 0
        while n - j >= lowest and (n < 0 or j <= n):
            coeff = binom(n, j)
            if coeff:
                d = ctx.delta_power(delta_index, j, a)
                if d.is_zero():
                    break
                term = ctx.sigma_power(n - j, d).scale(ctx.algebra.scalar(coeff))
                if not term.is_zero():
                    expansion[n - j] = term
            j += 1
        return expansion

    if n < 0 and floor is None:
        raise UncertifiedError(f"xi^{n} a is an infinite expansion; a floor is required")
    return ctx.memoize(("xi_binomial", n, a, floor, delta_index), compute)


def _expansion_floor(n: int, floor: Floor) -> Floor:
    # n >= 0 expansions are exact polynomials of degree n
    if n >= 0 and (floor is None or floor <= 0):
        return None
    return floor


def xi_pow_times(ctx: AlgebraContext, n: int, a: Element, floor: Floor = None) -> Symbol1D:
    """
    xi^n a as a symbol truncated at ``floor``.

    Untwisted contexts use  xi^n a = sum_j C(n,j) delta^j(a) xi^(n-j).
    Twisted contexts apply the xi rule (n >= 0) or the xi^-1 rule (n < 0)
    n times, truncating each step at the floor.
    """
    if floor is not None and floor > n:
        raise ValueError(f"floor {floor} above the leading order {n}")
    if ctx.sigma_is_identity:
        expansion = _expand_binomial(ctx, n, a, floor)
    else:
        expansion = _expand_iterated(ctx, n, a, floor)
    return Symbol1D(ctx, expansion, top=n, floor=_expansion_floor(n, floor))


def xi_pow_times_iterated(ctx: AlgebraContext, n: int, a: Element, floor: Floor = None) -> Symbol1D:
    """The iterated-rule path regardless of sigma (used to cross-check the untwisted formula)"""
    if floor is not None and floor > n:
        raise ValueError(f"floor {floor} above the leading order {n}")
    return Symbol1D(ctx, _expand_iterated(ctx, n, a, floor), top=n, floor=_expansion_floor(n, floor))


def _require_sigma_delta_commute(ctx: AlgebraContext, delta_index: int = 0) -> None:
    if ctx.sigma_is_identity:
        return
    subject = f"delta{delta_index + 1}"
    if ctx.report is None or not ctx.report.holds(HypothesisKind.DELTA_SIGMA_COMMUTE, subject):
        raise HypothesisError(
            f"context {ctx.kind}: the binomial formula needs sigma {subject} = {subject} sigma",
            ctx.report,
        )


def xi_pow_times_binomial(ctx: AlgebraContext, n: int, a: Element, floor: Floor = None) -> Symbol1D:
    """
    xi^n a = sum_j C(n,j) sigma^(n-j) delta^j(a) xi^(n-j), valid when sigma and
    delta commute.

    Raises:
        HypothesisError: the context has not verified sigma delta = delta sigma
    """
    if floor is not None and floor > n:
        raise ValueError(f"floor {floor} above the leading order {n}")
    _require_sigma_delta_commute(ctx)
    return Symbol1D(ctx, _expand_binomial(ctx, n, a, floor), top=n, floor=_expansion_floor(n, floor))


def xi_pow_times_words(ctx: AlgebraContext, n: int, a: Element) -> Symbol1D:
    """xi^n a = sum_i P_{i,n}(sigma, delta)(a) xi^i for n >= 1, word by word"""
    if n < 1:
        raise ValueError(f"the word expansion needs n >= 1, got {n}")
    terms: Dict[int, Element] = {}
    for i in range(n + 1):
        total = ctx.zero()
        for word in p_poly(i, n):
            total = total + apply_word(ctx, word, a)
        terms[i] = total
    return Symbol1D(ctx, terms, top=n)


# Iterating the xi^-1 rule composes the index factors with i_1 applied first
# (innermost); the closed sum is symmetric under reversing the index tuple.
ITERATED_RULE_ORDERING = "innermost"


def xi_neg_pow_multi_index(
    ctx: AlgebraContext,
    n: int,
    a: Element,
    floor: int,
    ordering: str = ITERATED_RULE_ORDERING,
) -> Symbol1D:
    """
    xi^-n a by the closed multi-index sum
        sum (-1)^(i_1+...+i_n) F_{i_n} ... F_{i_1}(a) xi^(-n-i_1-...-i_n)
    with F_i = sigma^-1 (delta sigma^-1)^i.

    ordering="innermost" applies F_{i_1} first; "outermost" applies F_{i_n} first.
    """
    if n < 1:
        raise ValueError(f"the multi-index formula needs n >= 1, got {n}")
    if ordering not in ("innermost", "outermost"):
        raise ValueError(f"unknown ordering {ordering!r}")
    if floor > -n:
        raise ValueError(f"floor {floor} above the leading order {-n}")
    delta = ctx.deltas[0]

    def factor(i: int, c: Element) -> Element:
        for _ in range(i):
            c = delta(ctx.sigma_power(-1, c))
        return ctx.sigma_power(-1, c)

    budget = -n - floor
    terms: Dict[int, Element] = {}
    for indices in itertools.product(range(budget + 1), repeat=n):
        total = sum(indices)
        if total > budget:
            continue
        sequence = indices if ordering == "innermost" else tuple(reversed(indices))
        c = a
        for i in sequence:
            c = factor(i, c)
        accumulate(terms, -n - total, c if total % 2 == 0 else -c)
    return Symbol1D(ctx, terms, top=-n, floor=floor)


@dataclass(frozen=True)
class XiInverseExpansion:
    """xi^-1 a = explicit + xi^-1 remainder xi^remainder_order"""

    explicit: Symbol1D
    remainder: Element
    remainder_order: int


def xi_inverse_remainder(ctx: AlgebraContext, a: Element, N: int) -> XiInverseExpansion:
    """
    xi^-1 a = sum_{i<=N} (-1)^i sigma^-1 (delta sigma^-1)^i (a) xi^(-1-i)
              + (-1)^(N+1) xi^-1 (delta sigma^-1)^(N+1)(a) xi^(-1-N)
    """
    if N < 0:
        raise ValueError(f"N must be non-negative, got {N}")
    delta = ctx.deltas[0]
    terms: Dict[int, Element] = {}
    h = a
    for i in range(N + 1):
        base = ctx.sigma_power(-1, h)
        terms[-1 - i] = base if i % 2 == 0 else -base
        h = delta(base)
    remainder = h if (N + 1) % 2 == 0 else -h
    return XiInverseExpansion(Symbol1D(ctx, terms, top=-1), remainder, -1 - N)


# ============================================================================
# PRODUCT, COMMUTATOR, RESIDUES
# ============================================================================


def mul(d1: Symbol1D, d2: Symbol1D, floor: Floor = None) -> Symbol1D:
    """
    Product in Psi(A, sigma, delta).

    The result is certified down to max(floor(D1) + top(D2), floor(D2) + top(D1)),
    raised to ``floor`` when given.

    Raises:
        ContextMismatchError: operands from different contexts
        UncertifiedError: infinite expansion (negative orders in D1) with no floor
    """
    d1.ctx.require_same(d2.ctx)
    ctx = d1.ctx
    result_floor = join_floors(product_floor(d1.floor, d1.top, d2.floor, d2.top), floor)
    top = d1.top + d2.top
    if result_floor is None and d1.has_negative_orders:
        raise UncertifiedError(
            "the product expands to infinitely many orders; pass a floor to truncate it"
        )
    if result_floor is not None:
        result_floor = min(result_floor, top)

    acc: Dict[int, Element] = {}
    for n, a in d1.terms:
        for p, b in d2.terms:
            if result_floor is not None and n + p < result_floor:
                continue
            local_floor = None if result_floor is None else result_floor - p
            expansion = xi_pow_times(ctx, n, b, local_floor)
            for k, c in expansion.terms:
                accumulate(acc, k + p, a * c)
    product = Symbol1D(ctx, acc, top=top, floor=result_floor)
    log.debug("product_computed", context=ctx.kind, terms=len(product.terms), floor=result_floor)
    return product


def commutator(d1: Symbol1D, d2: Symbol1D, floor: Floor = None) -> Symbol1D:
    """[D1, D2] = D1 D2 - D2 D1, both products computed in full"""
    return mul(d1, d2, floor) - mul(d2, d1, floor)


def _residue_coefficient(d: Symbol1D) -> Element:
    if d.floor is not None and d.floor > -1:
        raise UncertifiedError(
            f"the xi^-1 coefficient is not certified (floor {d.floor} > -1)"
        )
    return d.coefficient(-1)


def res(d: Symbol1D, trace: TraceSelector = 0) -> ExactScalar:
    """Adler-Manin residue tau(a_{-1}); twisted traces go through res_sigma"""
    ctx = d.ctx
    ctx.require_checked()
    selected = ctx.trace(trace)
    if not ctx.sigma_is_identity and selected.kind.twist_power != 0:
        raise HypothesisError(
            f"res needs an ordinary trace; {selected.name} has twist power "
            f"{selected.kind.twist_power} (use res_sigma)",
            ctx.report,
        )
    return selected(_residue_coefficient(d))


def res_sigma(d: Symbol1D, trace: TraceSelector = 0) -> ExactScalar:
    """
    Twisted residue tau(a_{-1}) for a sigma-trace tau.

    The trace must satisfy tau(ab) = tau(sigma(b) a), tau o delta = 0 and
    tau o sigma = tau (all verified on the context).
    """
    ctx = d.ctx
    ctx.require_checked()
    selected = ctx.trace(trace)
    if not ctx.sigma_is_identity:
        if selected.kind.twist_power != 1:
            raise HypothesisError(
                f"res_sigma needs a sigma-trace; {selected.name} has twist power {selected.kind.twist_power}",
                ctx.report,
            )
        for kind, subject in (
            (HypothesisKind.TRACE_DELTA_INVARIANT, f"{selected.name},delta1"),
            (HypothesisKind.TRACE_SIGMA_INVARIANT, selected.name),
        ):
            if not ctx.report.holds(kind, subject):
                raise HypothesisError(
                    f"res_sigma needs {kind.law} for {selected.name}", ctx.report
                )
    return selected(_residue_coefficient(d))


def res_class(d: Symbol1D) -> Element:
    """
    Algebra-valued residue: a_{-1} modulo [A, A] + im(delta).

    Only the commutative Fourier contexts are covered. There [A, A] = 0 and
    delta(e_k) = k_j e_k, so the class is represented by the modes with
    k_j = 0 along the kept derivation.
    """
    ctx = d.ctx
    algebra = ctx.algebra
    if not isinstance(algebra, FourierAlgebra):
        raise ContextMismatchError(f"res_class needs a commutative Fourier context, not {ctx.kind}")
    ctx.require_checked()
    axis = ctx.parameters.get("delta_index", 0)
    coefficient = _residue_coefficient(d)
    kept = [
        TrigPoly.from_map(poly.dim, {k: c for k, c in poly.terms if k[axis] == 0})
        for poly in algebra.components(coefficient)
    ]
    return algebra.from_components(kept)


def toeplitz_project(d: Symbol1D) -> Symbol1D:
    """P_+: keep the first component of every coefficient of a circle2 symbol"""
    ctx = d.ctx
    algebra = ctx.algebra
    if not isinstance(algebra, FourierAlgebra) or algebra.copies != 2 or algebra.dim != 1:
        raise ContextMismatchError(f"the Toeplitz projection acts on circle2 symbols, not {ctx.kind}")
    zero = TrigPoly.zero_poly(1)
    terms = {n: TupleElement((c.components[0], zero)) for n, c in d.terms}
    return Symbol1D(ctx, terms, top=d.top, floor=d.floor)


def residue_table(d: Symbol1D, traces: Optional[Iterable[TraceSelector]] = None) -> Dict[str, str]:
    """res under each selected trace (all traces by default), as text"""
    selected = list(traces) if traces is not None else [t.name for t in d.ctx.traces]
    return {str(t): format_scalar(res(d, t)) for t in selected}
