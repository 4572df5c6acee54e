#!/usr/bin/env python3
"""
Symbol Expression Language for psicalc
Lexer, recursive-descent parser, printer and evaluator for the small
expression language the CLI and the context files speak.

Grammar:

    expr    := term (('+' | '-') term)*
    term    := factor ('*' factor)*
    factor  := '-' factor | atom ('^' exponent)?
    exponent:= int | '(' int ')'
    atom    := scalar | ident | basis | call | 'xi' | 'xi1' | 'xi2'
             | '[' expr ',' expr ']' | '(' expr ')'
    call    := ident '(' expr (',' 't' '=' (int | ident | string))? ')'
    basis   := 'e[' int (',' int)? ']' ('@(' int (',' int)? ')')?
    int     := '-'? digits
    scalar  := digits ('/' digits)?

Whitespace is insignificant. ``-x^2`` parses as ``-(x^2)``.
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple, Union

from .core import AlgebraContext, PsicalcError
from .instances import FourierAlgebra, QTorusElement, QuantumTorusAlgebra, TrigPoly
from .logging_utils import get_logger
from .scalars import Cyclotomic, ExactScalar, GaussianRational
from .symbols1d import Symbol1D, commutator, mul, res, res_sigma
from .symbols2d import Symbol2D, commutator2, mul2, normalize_floors, res2

log = get_logger(__name__)

# Names the evaluator resolves itself; context files may not rebind them
RESERVED_NAMES = frozenset({"unit", "i", "q", "U", "V", "xi", "xi1", "xi2", "e"})
RESIDUE_FUNCTIONS = ("res", "res_sigma", "Res")

ATOM_STARTS = ("number", "identifier", "xi", "e[", "[", "(", "-")


# ============================================================================
# ERRORS
# ============================================================================


class DSLSyntaxError(PsicalcError):
    """Malformed expression text"""

    kind = "parse"

    def __init__(self, message: str, text: str, offset: int, expected: Iterable[str] = ()):
        self.text = text
        self.offset = offset
        self.line = text.count("\n", 0, offset) + 1
        self.column = offset - (text.rfind("\n", 0, offset) + 1) + 1
        self.expected = tuple(sorted(set(expected)))
        detail = f" (expected {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message} at line {self.line}, column {self.column}{detail}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "offset": self.offset,
            "line": self.line,
            "column": self.column,
            "expected": list(self.expected),
        }


class DSLTypeError(PsicalcError):
    """Well-formed expression that does not make sense in the active context"""

    kind = "type"


# ============================================================================
# AST
# ============================================================================


@dataclass(frozen=True)
class Scalar:
    value: Fraction

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("scalar literals are non-negative; negate with Neg")


@dataclass(frozen=True)
class Name:
    ident: str


@dataclass(frozen=True)
class Basis:
    """e[k] or e[k1,k2], optionally placed in one component @(s) / @(s,t)"""

    mode: Tuple[int, ...]
    component: Optional[Tuple[int, ...]] = None


@dataclass(frozen=True)
class Xi:
    """xi (axis 0), xi1 or xi2"""

    axis: int


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Sub:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Mul:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Commutator:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"
    trace: Optional[str] = None


Expr = Union[Scalar, Name, Basis, Xi, Pow, Neg, Add, Sub, Mul, Commutator, Call]


# ============================================================================
# LEXER
# ============================================================================


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    offset: int


_TOKEN_RE = re.compile(
    r"""
    (?P<space>\s+)
  | (?P<number>\d+(?:/\d+)?)
  | (?P<basis>e\[)
  | (?P<identifier>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"[^"]*")
  | (?P<punct>[-+*^()\[\],@=])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    position = 0
    while position < len(text):
        match = _TOKEN_RE.match(text, position)
        if match is None:
            raise DSLSyntaxError(f"unexpected character {text[position]!r}", text, position, ATOM_STARTS)
        kind = match.lastgroup
        value = match.group()
        if kind == "identifier" and value in ("xi", "xi1", "xi2"):
            kind = "xi"
        elif kind == "basis":
            kind = "e["
        elif kind == "punct":
            kind = value
        if kind != "space":
            tokens.append(Token(kind, value, position))
        position = match.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


# ============================================================================
# PARSER
# ============================================================================


class Parser:
    """Recursive descent over the token list, one method per grammar rule"""

    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def _advance(self) -> Token:
        token = self.current
        self.index += 1
        return token

    def _error(self, message: str, expected: Iterable[str]) -> DSLSyntaxError:
        token = self.current
        found = "end of input" if token.kind == "end" else repr(token.text)
        return DSLSyntaxError(f"{message}, found {found}", self.text, token.offset, expected)

    def _expect(self, kind: str) -> Token:
        if self.current.kind != kind:
            raise self._error(f"expected {kind!r}", (kind,))
        return self._advance()

    def parse(self) -> Expr:
        expr = self._expr()
        if self.current.kind != "end":
            raise self._error("unexpected trailing input", ("+", "-", "*", "^", "end"))
        return expr

    def _expr(self) -> Expr:
        node = self._term()
        while self.current.kind in ("+", "-"):
            op = self._advance().kind
            right = self._term()
            node = Add(node, right) if op == "+" else Sub(node, right)
        return node

    def _term(self) -> Expr:
        node = self._factor()
        while self.current.kind == "*":
            self._advance()
            node = Mul(node, self._factor())
        return node

    def _factor(self) -> Expr:
        if self.current.kind == "-":
            self._advance()
            return Neg(self._factor())
        node = self._atom()
        if self.current.kind == "^":
            self._advance()
            node = Pow(node, self._exponent())
        return node

    def _exponent(self) -> int:
        if self.current.kind == "(":
            self._advance()
            value = self._int()
            self._expect(")")
            return value
        return self._int()

    def _int(self) -> int:
        sign = 1
        if self.current.kind == "-":
            self._advance()
            sign = -1
        token = self.current
        if token.kind != "number" or "/" in token.text:
            raise self._error("expected an integer", ("integer",))
        self._advance()
        return sign * int(token.text)

    def _atom(self) -> Expr:
        token = self.current
        if token.kind == "number":
            try:
                value = Fraction(token.text)
            except ZeroDivisionError:
                raise self._error("zero denominator", ("number",)) from None
            self._advance()
            return Scalar(value)
        if token.kind == "xi":
            self._advance()
            return Xi(0 if token.text == "xi" else int(token.text[2:]))
        if token.kind == "e[":
            return self._basis()
        if token.kind == "identifier":
            self._advance()
            if self.current.kind == "(":
                return self._call(token.text)
            return Name(token.text)
        if token.kind == "[":
            self._advance()
            left = self._expr()
            self._expect(",")
            right = self._expr()
            self._expect("]")
            return Commutator(left, right)
        if token.kind == "(":
            self._advance()
            inner = self._expr()
            self._expect(")")
            return inner
        raise self._error("expected an operand", ATOM_STARTS)

    def _basis(self) -> Basis:
        self._expect("e[")
        mode = [self._int()]
        if self.current.kind == ",":
            self._advance()
            mode.append(self._int())
        self._expect("]")
        component = None
        if self.current.kind == "@":
            self._advance()
            self._expect("(")
            component = [self._int()]
            if self.current.kind == ",":
                self._advance()
                component.append(self._int())
            self._expect(")")
            component = tuple(component)
        return Basis(tuple(mode), component)

    def _call(self, func: str) -> Call:
        self._expect("(")
        arg = self._expr()
        trace = None
        if self.current.kind == ",":
            self._advance()
            keyword = self.current
            if keyword.kind != "identifier" or keyword.text != "t":
                raise self._error("expected trace keyword", ("t",))
            self._advance()
            self._expect("=")
            value = self.current
            if value.kind == "string":
                trace = value.text[1:-1]
            elif value.kind in ("number", "identifier"):
                trace = value.text
            else:
                raise self._error("expected a trace selector", ("string", "number", "identifier"))
            self._advance()
        self._expect(")")
        return Call(func, arg, trace)


def parse(text: str) -> Expr:
    """Parse expression text into an AST; raises DSLSyntaxError"""
    return Parser(text).parse()


# ============================================================================
# PRINTER
# ============================================================================


_PRECEDENCE = {Add: 1, Sub: 1, Mul: 2, Neg: 3, Pow: 4}


def _level(node: Expr) -> int:
    return _PRECEDENCE.get(type(node), 5)


def _wrapped(node: Expr, minimum: int) -> str:
    text = to_text(node)
    return text if _level(node) >= minimum else f"({text})"


def _ints(values: Tuple[int, ...]) -> str:
    return ",".join(str(v) for v in values)


def to_text(node: Expr) -> str:
    """Canonical text of an AST; parse(to_text(node)) == node"""
    if isinstance(node, Scalar):
        value = node.value
        return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    if isinstance(node, Name):
        return node.ident
    if isinstance(node, Xi):
        return "xi" if node.axis == 0 else f"xi{node.axis}"
    if isinstance(node, Basis):
        text = f"e[{_ints(node.mode)}]"
        if node.component is not None:
            text += f"@({_ints(node.component)})"
        return text
    if isinstance(node, Pow):
        return f"{_wrapped(node.base, 5)}^{node.exponent}"
    if isinstance(node, Neg):
        return "-" + _wrapped(node.operand, 3)
    if isinstance(node, Add):
        return f"{_wrapped(node.left, 1)} + {_wrapped(node.right, 2)}"
    if isinstance(node, Sub):
        return f"{_wrapped(node.left, 1)} - {_wrapped(node.right, 2)}"
    if isinstance(node, Mul):
        return f"{_wrapped(node.left, 2)}*{_wrapped(node.right, 3)}"
    if isinstance(node, Commutator):
        return f"[{to_text(node.left)}, {to_text(node.right)}]"
    if isinstance(node, Call):
        trace = f', t="{node.trace}"' if node.trace is not None else ""
        return f"{node.func}({to_text(node.arg)}{trace})"
    raise TypeError(f"not an expression node: {node!r}")


# ============================================================================
# EVALUATOR
# ============================================================================


Symbol = Union[Symbol1D, Symbol2D]
Value = Any  # algebra element or symbol


def _is_symbol(value: Value) -> bool:
    return isinstance(value, (Symbol1D, Symbol2D))


class Evaluator:
    """
    Evaluates an AST bottom-up. Sub-expressions without xi stay algebra
    elements; they are lifted to order-0 symbols when they meet one.
    Without a context only element-level expressions are accepted.
    """

    def __init__(
        self,
        algebra,
        ctx: Optional[AlgebraContext] = None,
        floors=None,
        bindings: Optional[Mapping[str, Any]] = None,
    ):
        self.algebra = algebra
        self.ctx = ctx
        self.floors = normalize_floors(floors)
        self.bindings = dict(bindings or {})

    # -- helpers -----------------------------------------------------------

    def _scalar(self, value) -> Value:
        return self.algebra.one().scale(value)

    def _require_ctx(self, what: str) -> AlgebraContext:
        if self.ctx is None:
            raise DSLTypeError(f"{what} is not an algebra element")
        return self.ctx

    def _lift(self, value: Value) -> Symbol:
        if _is_symbol(value):
            return value
        ctx = self._require_ctx("a symbol")
        if ctx.dimension == 1:
            return Symbol1D.constant(ctx, value)
        return Symbol2D.constant(ctx, value)

    def _product(self, left: Value, right: Value) -> Value:
        if not _is_symbol(left) and not _is_symbol(right):
            return left * right
        left, right = self._lift(left), self._lift(right)
        if isinstance(left, Symbol1D):
            return mul(left, right, self.floors[0])
        return mul2(left, right, self.floors)

    # -- node handlers -----------------------------------------------------

    def evaluate(self, node: Expr) -> Value:
        handler = getattr(self, f"_eval_{type(node).__name__.lower()}", None)
        if handler is None:
            raise TypeError(f"not an expression node: {node!r}")
        return handler(node)

    def _eval_scalar(self, node: Scalar) -> Value:
        return self._scalar(node.value)

    def _eval_name(self, node: Name) -> Value:
        ident = node.ident
        if ident in self.bindings:
            return self.bindings[ident]
        if ident == "unit":
            return self.algebra.one()
        if ident == "i":
            if not isinstance(self.algebra, FourierAlgebra):
                raise DSLTypeError("'i' is only available over Gaussian rational coefficients")
            return self._scalar(GaussianRational.i())
        if isinstance(self.algebra, QuantumTorusAlgebra):
            order = self.algebra.order
            if ident == "q":
                return self._scalar(Cyclotomic.q_power(order, 1))
            if ident == "U":
                return self.algebra.monomial(1, 0)
            if ident == "V":
                return self.algebra.monomial(0, 1)
        raise DSLTypeError(f"unknown name {ident!r}")

    def _eval_basis(self, node: Basis) -> Value:
        algebra = self.algebra
        if not isinstance(algebra, FourierAlgebra):
            raise DSLTypeError("basis literals e[..] need a Fourier context")
        if len(node.mode) != algebra.dim:
            raise DSLTypeError(f"e[{_ints(node.mode)}] does not have dimension {algebra.dim}")
        poly = TrigPoly.mode(node.mode)
        if node.component is None:
            return algebra.lift(poly)
        component = node.component
        if algebra.copies == 2 and len(component) == 1 and component[0] in (1, 2):
            return algebra.placed(poly, component[0] - 1)
        if algebra.copies == 4 and len(component) == 2 and all(c in (1, 2) for c in component):
            return algebra.placed(poly, 2 * (component[0] - 1) + (component[1] - 1))
        raise DSLTypeError(
            f"component @({_ints(component)}) does not exist in a {algebra.copies}-component algebra"
        )

    def _xi(self, axis: int, power: int) -> Symbol:
        ctx = self._require_ctx("xi")
        if ctx.dimension == 1:
            if axis == 2:
                raise DSLTypeError("xi2 needs a two-derivation context")
            return Symbol1D.xi(ctx, power)
        if axis == 0:
            raise DSLTypeError("write xi1 or xi2 in a two-derivation context")
        return Symbol2D.xi(ctx, axis, power)

    def _eval_xi(self, node: Xi) -> Value:
        return self._xi(node.axis, 1)

    def _invert(self, value: Value) -> Value:
        if _is_symbol(value):
            terms = value.terms
            if value.is_exact and len(terms) == 1 and terms[0][1] == value.ctx.one():
                order, one = terms[0]
                if isinstance(value, Symbol1D):
                    return Symbol1D.monomial(value.ctx, one, -order)
                return Symbol2D.monomial(value.ctx, one, -order[0], -order[1])
            raise DSLTypeError("only pure xi monomials have symbol inverses here")
        if isinstance(value, QTorusElement) and len(value.terms) == 1:
            (m, n), c = value.terms[0]
            return self.algebra.inverse_monomial(m, n).scale(c.inverse())
        if isinstance(value, TrigPoly) and len(value.terms) == 1:
            k, c = value.terms[0]
            return TrigPoly.mode(tuple(-x for x in k), c.inverse())
        raise DSLTypeError("negative powers need an invertible monomial")

    def _eval_pow(self, node: Pow) -> Value:
        if isinstance(node.base, Xi):
            return self._xi(node.base.axis, node.exponent)
        base = self.evaluate(node.base)
        if node.exponent < 0:
            base = self._invert(base)
        result = self._lift(self.ctx.one()) if _is_symbol(base) else self.algebra.one()
        for _ in range(abs(node.exponent)):
            result = self._product(result, base)
        return result

    def _eval_neg(self, node: Neg) -> Value:
        return -self.evaluate(node.operand)

    def _sum(self, node, sign: int) -> Value:
        left, right = self.evaluate(node.left), self.evaluate(node.right)
        if _is_symbol(left) or _is_symbol(right):
            left, right = self._lift(left), self._lift(right)
        return left + right if sign > 0 else left - right

    def _eval_add(self, node: Add) -> Value:
        return self._sum(node, 1)

    def _eval_sub(self, node: Sub) -> Value:
        return self._sum(node, -1)

    def _eval_mul(self, node: Mul) -> Value:
        return self._product(self.evaluate(node.left), self.evaluate(node.right))

    def _eval_commutator(self, node: Commutator) -> Value:
        left, right = self.evaluate(node.left), self.evaluate(node.right)
        if not _is_symbol(left) and not _is_symbol(right):
            return left * right - right * left
        left, right = self._lift(left), self._lift(right)
        if isinstance(left, Symbol1D):
            return commutator(left, right, self.floors[0])
        return commutator2(left, right, self.floors)

    def residue(self, node: Call) -> ExactScalar:
        if node.func not in RESIDUE_FUNCTIONS:
            raise DSLTypeError(f"unknown function {node.func!r}; have {', '.join(RESIDUE_FUNCTIONS)}")
        ctx = self._require_ctx(f"{node.func}(...)")
        symbol = self._lift(self.evaluate(node.arg))
        trace = 0 if node.trace is None else node.trace
        if node.func == "Res":
            if ctx.dimension != 2:
                raise DSLTypeError("Res needs a two-derivation context; use res or res_sigma")
            return res2(symbol, trace)
        if ctx.dimension != 1:
            raise DSLTypeError(f"{node.func} needs a one-derivation context; use Res")
        return res(symbol, trace) if node.func == "res" else res_sigma(symbol, trace)

    def _eval_call(self, node: Call) -> Value:
        return self._scalar(self.residue(node))


def evaluate(
    expr: Union[str, Expr],
    ctx: AlgebraContext,
    floors=None,
    bindings: Optional[Mapping[str, Any]] = None,
) -> Union[Symbol, ExactScalar]:
    """
    Evaluate an expression in a context. A top-level residue call returns
    the scalar; everything else comes back as a Symbol1D / Symbol2D.

    Raises:
        DSLSyntaxError: text does not parse
        DSLTypeError: expression does not fit the context
    """
    node = parse(expr) if isinstance(expr, str) else expr
    evaluator = Evaluator(ctx.algebra, ctx, floors, bindings)
    if isinstance(node, Call):
        return evaluator.residue(node)
    result = evaluator._lift(evaluator.evaluate(node))
    log.debug("expression_evaluated", context=ctx.kind, expression=to_text(node))
    return result


def evaluate_element(text: str, algebra, bindings: Optional[Mapping[str, Any]] = None):
    """Evaluate xi-free text such as "q*U^2 - V^-1" to an element of ``algebra``"""
    value = Evaluator(algebra, None, None, bindings).evaluate(parse(text))
    if _is_symbol(value):
        raise DSLTypeError(f"{text!r} is not an algebra element")
    return value
