#!/usr/bin/env python3
"""
Concrete Base Algebras for psicalc
Finite Fourier sums on the circle and the 2-torus, their 2- and 4-fold
direct sums, and a quantum torus at a root of unity with a genuine twist.

Derivations are normalized so that delta_j(e_k) = k_j e_k: every
coefficient stays in Q(i) and xi_j stands for the integer frequency k_j.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .core import (
    AlgebraContext,
    BaseAlgebra,
    HypothesisError,
    Trace,
    TraceKind,
    verify_context,
)
from .logging_utils import get_logger
from .scalars import (
    Cyclotomic,
    GaussianRational,
    ScalarLike,
    format_cyclotomic,
    format_gaussian,
)

log = get_logger(__name__)

Mode = Tuple[int, ...]

# Component order of the direct sums: (1,1), (1,2), (2,1), (2,2)
TORUS4_LABELS = ("11", "12", "21", "22")
CIRCLE2_LABELS = ("1", "2")


def _join_terms(parts: List[str]) -> str:
    if not parts:
        return "0"
    text = parts[0]
    for part in parts[1:]:
        text += part if part.startswith("-") else "+" + part
    return text


def _coefficient_prefix(coeff: GaussianRational) -> str:
    if coeff == GaussianRational(Fraction(1)):
        return ""
    if coeff == GaussianRational(Fraction(-1)):
        return "-"
    text = format_gaussian(coeff)
    if coeff.re != 0 and coeff.im != 0:
        text = f"({text})"
    return text + "*"


# ============================================================================
# TRIGONOMETRIC POLYNOMIALS
# ============================================================================


@dataclass(frozen=True)
class TrigPoly:
    """Finite Fourier sum  sum_k c_k e_k  on the circle (dim 1) or 2-torus (dim 2)"""

    dim: int
    terms: Tuple[Tuple[Mode, GaussianRational], ...] = ()

    @classmethod
    def from_map(cls, dim: int, coefficients: Mapping[Mode, ScalarLike]) -> "TrigPoly":
        cleaned = {}
        for k, c in coefficients.items():
            k = tuple(int(x) for x in k)
            if len(k) != dim:
                raise ValueError(f"mode {k} does not have dimension {dim}")
            c = GaussianRational.coerce(c)
            if not c.is_zero():
                cleaned[k] = c
        return cls(dim, tuple(sorted(cleaned.items())))

    @classmethod
    def mode(cls, k: Sequence[int], coeff: ScalarLike = 1) -> "TrigPoly":
        k = tuple(k)
        return cls.from_map(len(k), {k: coeff})

    @classmethod
    def constant(cls, dim: int, coeff: ScalarLike = 1) -> "TrigPoly":
        return cls.from_map(dim, {(0,) * dim: coeff})

    @classmethod
    def zero_poly(cls, dim: int) -> "TrigPoly":
        return cls(dim, ())

    @property
    def coefficients(self) -> Dict[Mode, GaussianRational]:
        return dict(self.terms)

    @property
    def support(self) -> List[Mode]:
        return [k for k, _ in self.terms]

    def coefficient(self, k: Sequence[int]) -> GaussianRational:
        return self.coefficients.get(tuple(k), GaussianRational())

    def constant_term(self) -> GaussianRational:
        return self.coefficient((0,) * self.dim)

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "TrigPoly") -> None:
        if not isinstance(other, TrigPoly) or other.dim != self.dim:
            raise TypeError(f"cannot combine TrigPoly(dim={self.dim}) with {other!r}")

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        self._check(other)
        acc = self.coefficients
        for k, c in other.terms:
            acc[k] = acc.get(k, GaussianRational()) + c
        return TrigPoly.from_map(self.dim, acc)

    def __neg__(self) -> "TrigPoly":
        return TrigPoly(self.dim, tuple((k, -c) for k, c in self.terms))

    def __sub__(self, other: "TrigPoly") -> "TrigPoly":
        return self + (-other)

    def __mul__(self, other: "TrigPoly") -> "TrigPoly":
        self._check(other)
        acc: Dict[Mode, GaussianRational] = {}
        for k, a in self.terms:
            for l, b in other.terms:
                kl = tuple(x + y for x, y in zip(k, l))
                acc[kl] = acc.get(kl, GaussianRational()) + a * b
        return TrigPoly.from_map(self.dim, acc)

    def scale(self, factor: ScalarLike) -> "TrigPoly":
        factor = GaussianRational.coerce(factor)
        return TrigPoly.from_map(self.dim, {k: c * factor for k, c in self.terms})

    def derivative(self, axis: int) -> "TrigPoly":
        """Normalized partial derivative: e_k -> k_axis e_k"""
        return TrigPoly.from_map(self.dim, {k: c * k[axis] for k, c in self.terms})

    def __str__(self) -> str:
        parts = []
        for k, c in self.terms:
            parts.append(_coefficient_prefix(c) + "e[" + ",".join(str(x) for x in k) + "]")
        return _join_terms(parts)

    def to_json(self) -> Dict[str, str]:
        return {",".join(str(x) for x in k): format_gaussian(c) for k, c in self.terms}


@dataclass(frozen=True)
class TupleElement:
    """Element of a direct sum of 2 or 4 copies of a Fourier algebra"""

    components: Tuple[TrigPoly, ...]

    def __post_init__(self):
        if len(self.components) not in (2, 4):
            raise ValueError(f"direct sums have 2 or 4 components, got {len(self.components)}")
        dims = {c.dim for c in self.components}
        if len(dims) != 1:
            raise ValueError("all components must share a dimension")

    @property
    def dim(self) -> int:
        return self.components[0].dim

    @property
    def labels(self) -> Tuple[str, ...]:
        return CIRCLE2_LABELS if len(self.components) == 2 else TORUS4_LABELS

    def component(self, label: str) -> TrigPoly:
        return self.components[self.labels.index(label)]

    @classmethod
    def broadcast(cls, poly: TrigPoly, copies: int) -> "TupleElement":
        return cls((poly,) * copies)

    @classmethod
    def placed(cls, poly: TrigPoly, index: int, copies: int) -> "TupleElement":
        zero = TrigPoly.zero_poly(poly.dim)
        return cls(tuple(poly if i == index else zero for i in range(copies)))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def _check(self, other: "TupleElement") -> None:
        if not isinstance(other, TupleElement) or len(other.components) != len(self.components):
            raise TypeError(f"cannot combine {len(self.components)}-component element with {other!r}")

    def __add__(self, other: "TupleElement") -> "TupleElement":
        self._check(other)
        return TupleElement(tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "TupleElement") -> "TupleElement":
        self._check(other)
        return TupleElement(tuple(a - b for a, b in zip(self.components, other.components)))

    def __neg__(self) -> "TupleElement":
        return TupleElement(tuple(-a for a in self.components))

    def __mul__(self, other: "TupleElement") -> "TupleElement":
        self._check(other)
        # components never interact
        return TupleElement(tuple(a * b for a, b in zip(self.components, other.components)))

    def scale(self, factor: ScalarLike) -> "TupleElement":
        return TupleElement(tuple(a.scale(factor) for a in self.components))

    def map(self, fn) -> "TupleElement":
        return TupleElement(tuple(fn(a) for a in self.components))

    def __str__(self) -> str:
        if len(set(self.components)) == 1:
            return str(self.components[0])
        parts = [
            f"({c})@({','.join(label)})"
            for label, c in zip(self.labels, self.components)
            if not c.is_zero()
        ]
        return _join_terms(parts)

    def to_json(self) -> Dict[str, Dict[str, str]]:
        return {label: c.to_json() for label, c in zip(self.labels, self.components)}


class FourierAlgebra(BaseAlgebra):
    """Finite Fourier sums on S^1 or T^2, optionally as a 2- or 4-fold direct sum"""

    def __init__(self, dim: int, copies: int = 1):
        if dim not in (1, 2) or copies not in (1, 2, 4):
            raise ValueError(f"unsupported Fourier algebra dim={dim} copies={copies}")
        self.dim = dim
        self.copies = copies
        self.name = f"fourier{dim}d" + (f"x{copies}" if copies > 1 else "")

    def lift(self, poly: TrigPoly):
        """A TrigPoly as an element of this algebra (equal components)"""
        if poly.dim != self.dim:
            raise TypeError(f"expected a dim-{self.dim} Fourier polynomial")
        return poly if self.copies == 1 else TupleElement.broadcast(poly, self.copies)

    def placed(self, poly: TrigPoly, index: int):
        if self.copies == 1:
            if index != 0:
                raise ValueError("single-copy algebra has one component")
            return poly
        return TupleElement.placed(poly, index, self.copies)

    def components(self, element) -> Tuple[TrigPoly, ...]:
        return (element,) if self.copies == 1 else element.components

    def from_components(self, polys: Sequence[TrigPoly]):
        return polys[0] if self.copies == 1 else TupleElement(tuple(polys))

    def one(self):
        return self.lift(TrigPoly.constant(self.dim))

    def zero(self):
        return self.lift(TrigPoly.zero_poly(self.dim))

    def scalar(self, value: ScalarLike) -> GaussianRational:
        if isinstance(value, Cyclotomic):
            raise TypeError("Fourier algebras take Gaussian rational coefficients")
        return GaussianRational.coerce(value)

    def derivation(self, axis: int):
        if self.copies == 1:
            return lambda a: a.derivative(axis)
        return lambda a: a.map(lambda p: p.derivative(axis))

    def spanning_sample(self, degree_bound: int) -> List:
        sample = []
        for index in range(self.copies):
            for k in itertools.product(range(-degree_bound, degree_bound + 1), repeat=self.dim):
                sample.append(self.placed(TrigPoly.mode(k), index))
        return sample

    def format_element(self, element):
        return element.to_json()


def coefficient_trace(algebra: FourierAlgebra, k: Sequence[int], index: int = 0, name: Optional[str] = None) -> Trace:
    """
    The functional "coefficient of e_k in component ``index``".

    Only k = 0 gives a delta-invariant trace; other modes are kept as a
    deliberately broken variant for exercising the checker.
    """
    k = tuple(k)

    def func(a) -> GaussianRational:
        return algebra.components(a)[index].coefficient(k)

    label = name or "coeff_e[" + ",".join(str(x) for x in k) + "]"
    return Trace(label, func, TraceKind(0))


def _constant_traces(algebra: FourierAlgebra, labels: Sequence[str]) -> Tuple[Trace, ...]:
    zero_mode = (0,) * algebra.dim
    return tuple(
        coefficient_trace(algebra, zero_mode, index, name=f"tau_{label}" if label else "tau")
        for index, label in enumerate(labels)
    )


def _identity(a):
    return a


def _fourier_context(kind: str, dim: int, copies: int, labels: Sequence[str], degree_bound: int) -> AlgebraContext:
    algebra = FourierAlgebra(dim, copies)
    ctx = AlgebraContext(
        kind=kind,
        algebra=algebra,
        sigma=_identity,
        sigma_inv=_identity,
        deltas=tuple(algebra.derivation(axis) for axis in range(dim)),
        traces=_constant_traces(algebra, labels),
        sigma_is_identity=True,
        parameters={"dim": dim, "copies": copies},
    )
    return verify_context(ctx, degree_bound=degree_bound)


@lru_cache(maxsize=None)
def make_circle_context(degree_bound: int = 3) -> AlgebraContext:
    """C^inf(S^1) by finite Fourier sums, delta = d/dx (normalized), one trace"""
    return _fourier_context("circle", 1, 1, ("",), degree_bound)


@lru_cache(maxsize=None)
def make_torus_context(degree_bound: int = 2) -> AlgebraContext:
    """C^inf(T) by finite Fourier sums, sigma = id, integration trace"""
    return _fourier_context("torus", 2, 1, ("",), degree_bound)


@lru_cache(maxsize=None)
def make_circle2_context(degree_bound: int = 3) -> AlgebraContext:
    """C^inf(S^1) + C^inf(S^1) with traces tau_1, tau_2"""
    return _fourier_context("circle2", 1, 2, CIRCLE2_LABELS, degree_bound)


@lru_cache(maxsize=None)
def make_torus4_context(degree_bound: int = 1) -> AlgebraContext:
    """C^inf(T)^4 with sigma = id, delta_j = d/dx_j and the four traces tau_{s,t}"""
    return _fourier_context("torus4", 2, 4, TORUS4_LABELS, degree_bound)


# ============================================================================
# QUANTUM TORUS
# ============================================================================


@dataclass(frozen=True)
class QTorusElement:
    """sum c_{m,n} U^m V^n in normal order, with UV = qVU and q = zeta_N"""

    order: int
    terms: Tuple[Tuple[Tuple[int, int], Cyclotomic], ...] = ()

    @classmethod
    def from_map(cls, order: int, coefficients: Mapping[Tuple[int, int], ScalarLike]) -> "QTorusElement":
        cleaned = {}
        for (m, n), c in coefficients.items():
            if not isinstance(c, Cyclotomic):
                c = Cyclotomic.from_rational(order, c)
            elif c.order != order:
                raise ValueError(f"coefficient of order {c.order} in a q=zeta_{order} algebra")
            if not c.is_zero():
                cleaned[(int(m), int(n))] = c
        return cls(order, tuple(sorted(cleaned.items())))

    @classmethod
    def monomial(cls, order: int, m: int, n: int, coeff: ScalarLike = 1) -> "QTorusElement":
        return cls.from_map(order, {(m, n): coeff})

    @property
    def coefficients(self) -> Dict[Tuple[int, int], Cyclotomic]:
        return dict(self.terms)

    def coefficient(self, m: int, n: int) -> Cyclotomic:
        return self.coefficients.get((m, n), Cyclotomic.from_rational(self.order, 0))

    def constant_term(self) -> Cyclotomic:
        return self.coefficient(0, 0)

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "QTorusElement") -> None:
        if not isinstance(other, QTorusElement) or other.order != self.order:
            raise TypeError(f"cannot combine q=zeta_{self.order} element with {other!r}")

    def __add__(self, other: "QTorusElement") -> "QTorusElement":
        self._check(other)
        acc = self.coefficients
        for key, c in other.terms:
            acc[key] = acc[key] + c if key in acc else c
        return QTorusElement.from_map(self.order, acc)

    def __neg__(self) -> "QTorusElement":
        return QTorusElement(self.order, tuple((key, -c) for key, c in self.terms))

    def __sub__(self, other: "QTorusElement") -> "QTorusElement":
        return self + (-other)

    def __mul__(self, other: "QTorusElement") -> "QTorusElement":
        self._check(other)
        acc: Dict[Tuple[int, int], Cyclotomic] = {}
        for (a, b), x in self.terms:
            for (c, d), y in other.terms:
                # V^b U^c = q^(-bc) U^c V^b
                value = x * y * Cyclotomic.q_power(self.order, -b * c)
                key = (a + c, b + d)
                acc[key] = acc[key] + value if key in acc else value
        return QTorusElement.from_map(self.order, acc)

    def scale(self, factor: ScalarLike) -> "QTorusElement":
        if not isinstance(factor, Cyclotomic):
            factor = Cyclotomic.from_rational(self.order, factor)
        return QTorusElement.from_map(self.order, {key: c * factor for key, c in self.terms})

    def map_monomials(self, phase) -> "QTorusElement":
        """Diagonal map U^mV^n -> phase(m, n) U^mV^n"""
        return QTorusElement.from_map(
            self.order, {(m, n): c * phase(m, n) for (m, n), c in self.terms}
        )

    def __str__(self) -> str:
        parts = []
        for (m, n), c in self.terms:
            monomial = "*".join(
                f"{g}^{e}" if e != 1 else g for g, e in (("U", m), ("V", n)) if e != 0
            )
            coeff = format_cyclotomic(c)
            if not monomial:
                parts.append(coeff)
            elif coeff == "1":
                parts.append(monomial)
            elif coeff == "-1":
                parts.append("-" + monomial)
            elif any(sym in coeff.lstrip("-") for sym in "+-"):
                parts.append(f"({coeff})*{monomial}")
            else:
                parts.append(f"{coeff}*{monomial}")
        return _join_terms(parts)

    def to_json(self) -> Dict[str, str]:
        return {f"{m},{n}": format_cyclotomic(c) for (m, n), c in self.terms}


class QuantumTorusAlgebra(BaseAlgebra):
    """Laurent polynomials in U, V with UV = qVU, q = zeta_N, cyclotomic coefficients"""

    def __init__(self, order: int):
        if order <= 0:
            raise ValueError(f"root of unity order must be positive, got {order}")
        self.order = order
        self.name = f"qtorus{order}"

    def monomial(self, m: int, n: int, coeff: ScalarLike = 1) -> QTorusElement:
        return QTorusElement.monomial(self.order, m, n, coeff)

    def inverse_monomial(self, m: int, n: int) -> QTorusElement:
        """(U^m V^n)^-1 = q^(-mn) U^-m V^-n"""
        return self.monomial(-m, -n, Cyclotomic.q_power(self.order, -m * n))

    def one(self) -> QTorusElement:
        return self.monomial(0, 0)

    def zero(self) -> QTorusElement:
        return QTorusElement(self.order, ())

    def scalar(self, value: ScalarLike) -> Cyclotomic:
        if isinstance(value, GaussianRational):
            raise TypeError("the quantum torus takes cyclotomic coefficients")
        if isinstance(value, Cyclotomic):
            if value.order != self.order:
                raise TypeError(f"cyclotomic order {value.order} does not match N={self.order}")
            return value
        return Cyclotomic.from_rational(self.order, value)

    def spanning_sample(self, degree_bound: int) -> List[QTorusElement]:
        span = range(-degree_bound, degree_bound + 1)
        return [self.monomial(m, n) for m in span for n in span]

    def format_element(self, element: QTorusElement) -> Dict[str, str]:
        return element.to_json()


def _qtorus_structure(N: int, r: int, s: int):
    algebra = QuantumTorusAlgebra(N)

    def sigma(a: QTorusElement) -> QTorusElement:
        # W U^m V^n W^-1 = q^(rn - sm) U^m V^n for W = U^r V^s
        return a.map_monomials(lambda m, n: Cyclotomic.q_power(N, r * n - s * m))

    def sigma_inv(a: QTorusElement) -> QTorusElement:
        return a.map_monomials(lambda m, n: Cyclotomic.q_power(N, s * m - r * n))

    def inner_derivation(x: QTorusElement):
        return lambda a: x * a - sigma(a) * x

    def weighted_trace(name: str, power: int, twist_power: int) -> Trace:
        # W^-p, not (U^pr V^ps)^-1: the two differ by q^(rs p(p-1)/2)
        w_inverse = algebra.inverse_monomial(r, s)
        weight = algebra.one()
        for _ in range(power):
            weight = weight * w_inverse
        return Trace(
            name,
            lambda a: (a * weight).constant_term(),
            TraceKind(twist_power),
        )

    return algebra, sigma, sigma_inv, inner_derivation, weighted_trace


def parse_qtorus_element(text: str, N: int) -> QTorusElement:
    """Element literal such as "U^2", "U^2*V^-1" or "q*U-V^2" (via the DSL)"""
    from .dsl import evaluate_element

    return evaluate_element(text, QuantumTorusAlgebra(N))


def _coerce_x(x, N: int, default: Tuple[int, int]) -> QTorusElement:
    if x is None:
        return QTorusElement.monomial(N, *default)
    if isinstance(x, str):
        return parse_qtorus_element(x, N)
    if not isinstance(x, QTorusElement) or x.order != N:
        raise TypeError(f"expected a quantum torus element with q = zeta_{N}")
    return x


def make_qtorus_context(
    N: int = 2,
    r: int = 1,
    s: int = 1,
    x1=None,
    x2=None,
    degree_bound: int = 4,
) -> AlgebraContext:
    """
    Twisted two-derivation context on the quantum torus.

    sigma is conjugation by W = U^r V^s, delta_i(a) = x_i a - sigma(a) x_i,
    tau_W(a) = tau_0(a W^-2) (a sigma^2-trace) and tau_W1(a) = tau_0(a W^-1)
    (a sigma-trace), where tau_0 is the constant coefficient.

    Raises:
        HypothesisError: W^2 is not central or the checker rejects the data
    """
    if (2 * r) % N or (2 * s) % N:
        raise HypothesisError(
            f"W^2 = (U^{r} V^{s})^2 is not central for N={N}: need N | 2r and N | 2s"
        )
    x1 = _coerce_x(x1, N, (2, 0))
    x2 = _coerce_x(x2, N, (0, 2))
    key = (N, r, s, x1, x2, degree_bound)
    cached = _QTORUS_CACHE.get(key)
    if cached is not None:
        return cached

    algebra, sigma, sigma_inv, inner_derivation, weighted_trace = _qtorus_structure(N, r, s)
    ctx = AlgebraContext(
        kind="qtorus",
        algebra=algebra,
        sigma=sigma,
        sigma_inv=sigma_inv,
        deltas=(inner_derivation(x1), inner_derivation(x2)),
        traces=(weighted_trace("tau_W", 2, 2), weighted_trace("tau_W1", 1, 1)),
        sigma_is_identity=(r % N == 0 and s % N == 0),
        sigma_period=N,
        parameters={"N": N, "r": r, "s": s, "x1": str(x1), "x2": str(x2)},
    )
    log.debug("building_context", kind="qtorus", N=N, r=r, s=s, x1=str(x1), x2=str(x2))
    verified = verify_context(ctx, degree_bound=degree_bound)
    _QTORUS_CACHE[key] = verified
    return verified


def make_qtorus_1d_context(
    N: int = 2,
    r: int = 1,
    s: int = 1,
    x=None,
    degree_bound: int = 4,
) -> AlgebraContext:
    """
    One-derivation twisted context delta(a) = x a - sigma(a) x for any x.

    With the default x = U, sigma(x) = -x so sigma and delta do not commute;
    the sigma-trace tau_W1 stays delta-invariant for every x.
    """
    x = _coerce_x(x, N, (1, 0))
    key = ("1d", N, r, s, x, degree_bound)
    cached = _QTORUS_CACHE.get(key)
    if cached is not None:
        return cached

    algebra, sigma, sigma_inv, inner_derivation, weighted_trace = _qtorus_structure(N, r, s)
    ctx = AlgebraContext(
        kind="qtorus1d",
        algebra=algebra,
        sigma=sigma,
        sigma_inv=sigma_inv,
        deltas=(inner_derivation(x),),
        traces=(weighted_trace("tau_W1", 1, 1),),
        sigma_is_identity=(r % N == 0 and s % N == 0),
        sigma_period=N,
        parameters={"N": N, "r": r, "s": s, "x": str(x)},
    )
    verified = verify_context(ctx, degree_bound=degree_bound)
    _QTORUS_CACHE[key] = verified
    return verified


_QTORUS_CACHE: Dict[Tuple, AlgebraContext] = {}
