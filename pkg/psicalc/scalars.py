#!/usr/bin/env python3
"""
Exact Scalars for psicalc
Rationals, Gaussian rationals, cyclotomic field elements and generalized binomials.

Every coefficient in the engine is one of these types; nothing here ever
touches floating point. Rationals are plain ``fractions.Fraction`` values.
Gaussian rationals model Q(i), the coefficient field of Fourier polynomials.
Cyclotomic values model Q(zeta_N) as residues of Q[q] modulo Phi_N(q).
"""

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List, Sequence, Tuple, Union

import sympy

Rational = Fraction
RationalLike = Union[int, Fraction]


# ============================================================================
# RATIONALS AND BINOMIALS
# ============================================================================


def as_rational(value: RationalLike) -> Fraction:
    """Coerce an int or Fraction to Fraction (rejecting floats)"""
    if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
        raise TypeError(f"expected an exact rational, got {type(value).__name__}")
    return Fraction(value)


def format_rational(value: Fraction) -> str:
    """Canonical text form: "p" for integers, "p/q" otherwise"""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: str) -> Fraction:
    """Parse "p" or "p/q" exactly"""
    text = text.strip()
    if not re.fullmatch(r"[+-]?\d+(/\d+)?", text):
        raise ValueError(f"not a rational literal: {text!r}")
    return Fraction(text)


@lru_cache(maxsize=4096)
def binom(n: int, j: int) -> Fraction:
    """
    Generalized binomial coefficient n(n-1)...(n-j+1)/j! for any integer n.

    Args:
        n: Upper index, any integer
        j: Lower index, must be >= 0

    Returns:
        Fraction: Always integer-valued
    """
    if j < 0:
        raise ValueError(f"binom lower index must be non-negative, got {j}")
    if n >= 0:
        return Fraction(math.comb(n, j))
    # C(n, j) = (-1)^j C(j - n - 1, j) for negative n
    sign = -1 if j % 2 else 1
    return Fraction(sign * math.comb(j - n - 1, j))


# ============================================================================
# GAUSSIAN RATIONALS
# ============================================================================


@dataclass(frozen=True)
class GaussianRational:
    """Exact element re + im*i of Q(i)"""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", as_rational(self.re))
        object.__setattr__(self, "im", as_rational(self.im))

    @classmethod
    def coerce(cls, value: "ScalarLike") -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        return cls(as_rational(value), Fraction(0))

    @classmethod
    def i(cls) -> "GaussianRational":
        return cls(Fraction(0), Fraction(1))

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "GaussianRational":
        norm = self.norm()
        if norm == 0:
            raise ZeroDivisionError("inverse of zero Gaussian rational")
        return GaussianRational(self.re / norm, -self.im / norm)

    def __add__(self, other: "ScalarLike") -> "GaussianRational":
        other = GaussianRational.coerce(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other: "ScalarLike") -> "GaussianRational":
        other = GaussianRational.coerce(other)
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other: "ScalarLike") -> "GaussianRational":
        return GaussianRational.coerce(other) - self

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other: "ScalarLike") -> "GaussianRational":
        if not isinstance(other, GaussianRational):
            other = as_rational(other)
            return GaussianRational(self.re * other, self.im * other)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other: "ScalarLike") -> "GaussianRational":
        return self * GaussianRational.coerce(other).inverse()

    def __pow__(self, exponent: int) -> "GaussianRational":
        base = self if exponent >= 0 else self.inverse()
        result = GaussianRational(Fraction(1))
        for _ in range(abs(exponent)):
            result = result * base
        return result

    def __str__(self) -> str:
        return format_gaussian(self)


def format_gaussian(value: GaussianRational) -> str:
    """Canonical text form "p/q+r/s*i" (parts omitted when zero)"""
    if value.im == 0:
        return format_rational(value.re)
    magnitude = abs(value.im)
    imag = "i" if magnitude == 1 else format_rational(magnitude) + "*i"
    if value.re == 0:
        return ("-" if value.im < 0 else "") + imag
    sign = "-" if value.im < 0 else "+"
    return f"{format_rational(value.re)}{sign}{imag}"


def parse_gaussian(text: str) -> GaussianRational:
    """Parse the canonical Gaussian form, e.g. "1/2-3*i", "i", "-2/3" """
    compact = text.replace(" ", "")
    terms = re.findall(r"[+-]?[^+-]+", compact)
    if not compact or "".join(terms) != compact:
        raise ValueError(f"not a Gaussian rational literal: {text!r}")
    real = Fraction(0)
    imag = Fraction(0)
    for term in terms:
        sign = -1 if term.startswith("-") else 1
        body = term.lstrip("+-")
        if body.endswith("i"):
            coef = body[:-1]
            if coef.endswith("*"):
                coef = coef[:-1]
            imag += sign * (parse_rational(coef) if coef else Fraction(1))
        else:
            real += sign * parse_rational(body)
    return GaussianRational(real, imag)


# ============================================================================
# CYCLOTOMIC FIELD ELEMENTS
# ============================================================================


@lru_cache(maxsize=None)
def cyclotomic_modulus(order: int) -> Tuple[Fraction, ...]:
    """Coefficients of Phi_N(q), constant term first"""
    if order <= 0:
        raise ValueError(f"cyclotomic order must be positive, got {order}")
    q = sympy.Symbol("q")
    poly = sympy.cyclotomic_poly(order, q, polys=True)
    return tuple(Fraction(int(c)) for c in reversed(poly.all_coeffs()))


@lru_cache(maxsize=None)
def field_degree(order: int) -> int:
    """phi(N), the degree of Q(zeta_N) over Q"""
    return int(sympy.totient(order))


def _reduce_modulo_phi(coeffs: Sequence[Fraction], order: int) -> Tuple[Fraction, ...]:
    modulus = cyclotomic_modulus(order)
    degree = len(modulus) - 1
    work: List[Fraction] = list(coeffs)
    for k in range(len(work) - 1, degree - 1, -1):
        lead = work[k]
        if lead:
            shift = k - degree
            for i, m in enumerate(modulus):
                if m:
                    work[shift + i] -= lead * m
    work.extend([Fraction(0)] * (degree - len(work)))
    return tuple(work[:degree])


@dataclass(frozen=True)
class Cyclotomic:
    """
    Exact element of Q(zeta_N), stored as the residue of a polynomial in q
    modulo the N-th cyclotomic polynomial. ``coeffs`` has length phi(N),
    constant term first.
    """

    order: int
    coeffs: Tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.coeffs) != field_degree(self.order):
            object.__setattr__(
                self, "coeffs", _reduce_modulo_phi(self.coeffs, self.order)
            )
        else:
            object.__setattr__(
                self, "coeffs", tuple(as_rational(c) for c in self.coeffs)
            )

    @classmethod
    def from_rational(cls, order: int, value: RationalLike) -> "Cyclotomic":
        return cls(order, (as_rational(value),) + (Fraction(0),) * (field_degree(order) - 1))

    @classmethod
    def from_polynomial(cls, order: int, coeffs: Sequence[RationalLike]) -> "Cyclotomic":
        """Reduce an arbitrary polynomial in q (constant term first)"""
        return cls(order, _reduce_modulo_phi([as_rational(c) for c in coeffs], order))

    @classmethod
    def q_power(cls, order: int, exponent: int) -> "Cyclotomic":
        """zeta_N ** exponent for any integer exponent"""
        return _q_power(order, exponent % order)

    def coerce(self, value: "ScalarLike") -> "Cyclotomic":
        if isinstance(value, Cyclotomic):
            if value.order != self.order:
                raise ValueError(
                    f"cyclotomic orders differ: {self.order} vs {value.order}"
                )
            return value
        return Cyclotomic.from_rational(self.order, value)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __add__(self, other: "ScalarLike") -> "Cyclotomic":
        other = self.coerce(other)
        return Cyclotomic(self.order, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __sub__(self, other: "ScalarLike") -> "Cyclotomic":
        other = self.coerce(other)
        return Cyclotomic(self.order, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other: "ScalarLike") -> "Cyclotomic":
        return self.coerce(other) - self

    def __neg__(self) -> "Cyclotomic":
        return Cyclotomic(self.order, tuple(-c for c in self.coeffs))

    def __mul__(self, other: "ScalarLike") -> "Cyclotomic":
        if not isinstance(other, Cyclotomic):
            factor = as_rational(other)
            return Cyclotomic(self.order, tuple(c * factor for c in self.coeffs))
        other = self.coerce(other)
        product = [Fraction(0)] * (2 * len(self.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        product[i + j] += a * b
        return Cyclotomic(self.order, _reduce_modulo_phi(product, self.order))

    __rmul__ = __mul__

    def inverse(self) -> "Cyclotomic":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero cyclotomic element")
        return _cyclotomic_inverse(self)

    def __truediv__(self, other: "ScalarLike") -> "Cyclotomic":
        return self * self.coerce(other).inverse()

    def __pow__(self, exponent: int) -> "Cyclotomic":
        base = self if exponent >= 0 else self.inverse()
        result = Cyclotomic.from_rational(self.order, 1)
        for _ in range(abs(exponent)):
            result = result * base
        return result

    def __str__(self) -> str:
        return format_cyclotomic(self)


@lru_cache(maxsize=None)
def _q_power(order: int, exponent: int) -> Cyclotomic:
    coeffs = [Fraction(0)] * exponent + [Fraction(1)]
    return Cyclotomic(order, _reduce_modulo_phi(coeffs, order))


@lru_cache(maxsize=1024)
def _cyclotomic_inverse(value: Cyclotomic) -> Cyclotomic:
    q = sympy.Symbol("q")
    modulus = sympy.Poly(
        [sympy.Rational(c.numerator, c.denominator) for c in reversed(cyclotomic_modulus(value.order))],
        q,
        domain=sympy.QQ,
    )
    element = sympy.Poly(
        [sympy.Rational(c.numerator, c.denominator) for c in reversed(value.coeffs)],
        q,
        domain=sympy.QQ,
    )
    inverse = element.invert(modulus)
    coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(inverse.all_coeffs())]
    return Cyclotomic.from_polynomial(value.order, coeffs)


def format_cyclotomic(value: Cyclotomic) -> str:
    """Polynomial text in q, highest degree first, e.g. "1/2*q^3-2" """
    parts: List[str] = []
    for degree in range(len(value.coeffs) - 1, -1, -1):
        c = value.coeffs[degree]
        if c == 0:
            continue
        magnitude = abs(c)
        if degree == 0:
            body = format_rational(magnitude)
        else:
            power = "q" if degree == 1 else f"q^{degree}"
            body = power if magnitude == 1 else f"{format_rational(magnitude)}*{power}"
        if parts:
            parts.append(("-" if c < 0 else "+") + body)
        else:
            parts.append(("-" if c < 0 else "") + body)
    return "".join(parts) if parts else "0"


_CYCLOTOMIC_TERM = re.compile(
    r"(?P<sign>[+-]?)(?:(?P<coef>\d+(?:/\d+)?)(?:\*(?=q))?)?(?P<q>q(?:\^(?P<exp>\d+))?)?"
)


def parse_cyclotomic(text: str, order: int) -> Cyclotomic:
    """Parse a polynomial in q (canonical form or any sum of c*q^k terms)"""
    compact = text.replace(" ", "")
    if not compact:
        raise ValueError("empty cyclotomic literal")
    coeffs: List[Fraction] = []
    position = 0
    while position < len(compact):
        match = _CYCLOTOMIC_TERM.match(compact, position)
        if match is None or match.end() == position or not (
            match.group("coef") or match.group("q")
        ):
            raise ValueError(f"not a cyclotomic literal: {text!r}")
        if position > 0 and not match.group("sign"):
            raise ValueError(f"missing operator in cyclotomic literal: {text!r}")
        coef = Fraction(match.group("coef")) if match.group("coef") else Fraction(1)
        if match.group("sign") == "-":
            coef = -coef
        degree = 0
        if match.group("q"):
            degree = int(match.group("exp")) if match.group("exp") else 1
        coeffs.extend([Fraction(0)] * (degree + 1 - len(coeffs)))
        coeffs[degree] += coef
        position = match.end()
    return Cyclotomic.from_polynomial(order, coeffs)


ScalarLike = Union[int, Fraction, GaussianRational, Cyclotomic]
ExactScalar = Union[Fraction, GaussianRational, Cyclotomic]


def format_scalar(value: ExactScalar) -> str:
    """Canonical text form of any exact scalar"""
    if isinstance(value, GaussianRational):
        return format_gaussian(value)
    if isinstance(value, Cyclotomic):
        return format_cyclotomic(value)
    return format_rational(as_rational(value))


def scalar_is_zero(value: ScalarLike) -> bool:
    if isinstance(value, (GaussianRational, Cyclotomic)):
        return value.is_zero()
    return value == 0
