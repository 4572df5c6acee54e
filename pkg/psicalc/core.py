#!/usr/bin/env python3
"""
psicalc Core Module
Base algebra interface, algebra contexts (A, sigma, sigma^-1, deltas, traces),
the hypothesis checker and the exception hierarchy shared by every module.
"""

import abc
import itertools
from collections import OrderedDict
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import (
    Any,
    Callable,
    Dict,
    Iterable,
    List,
    Optional,
    Sequence,
    Tuple,
    Union,
)

from .logging_utils import get_logger
from .scalars import (
    Cyclotomic,
    ExactScalar,
    GaussianRational,
    ScalarLike,
    format_scalar,
    scalar_is_zero,
)

log = get_logger(__name__)

Element = Any
EndoMap = Callable[[Element], Element]
TraceSelector = Union[int, str]


# ============================================================================
# EXCEPTIONS
# ============================================================================


class PsicalcError(Exception):
    """Base class for every error raised by psicalc"""

    kind = "error"


class ContextMismatchError(PsicalcError):
    """Operands live in different algebra contexts"""

    kind = "context_mismatch"


class HypothesisError(PsicalcError):
    """A context failed (or never passed) the hypothesis checker"""

    kind = "hypothesis"

    def __init__(self, message: str, report: Optional["HypothesisReport"] = None):
        super().__init__(message)
        self.report = report


class UncertifiedError(PsicalcError):
    """A coefficient below the certified truncation floor was requested"""

    kind = "uncertified"


# ============================================================================
# BASE ALGEBRA INTERFACE
# ============================================================================


class BaseAlgebra(abc.ABC):
    """A concrete unital associative algebra with exact scalars"""

    name: str = "algebra"

    @abc.abstractmethod
    def one(self) -> Element:
        """Unit element"""

    @abc.abstractmethod
    def zero(self) -> Element:
        """Zero element"""

    @abc.abstractmethod
    def scalar(self, value: ScalarLike) -> ExactScalar:
        """Coerce a literal into this algebra's coefficient field"""

    @abc.abstractmethod
    def spanning_sample(self, degree_bound: int) -> List[Element]:
        """Basis monomials up to ``degree_bound`` (spans the checked subspace)"""

    @abc.abstractmethod
    def format_element(self, element: Element) -> Any:
        """JSON-ready text form of an element"""

    def embed(self, value: ScalarLike) -> Element:
        return self.one().scale(self.scalar(value))


class TraceKind:
    """
    Declared properties of a trace functional.

    twist_power k means tau(ab) = tau(sigma^k(b) a); k = 0 is an ordinary trace.
    """

    __slots__ = ("twist_power", "delta_invariant", "sigma_invariant")

    def __init__(self, twist_power: int, delta_invariant: bool = True, sigma_invariant: bool = True):
        self.twist_power = twist_power
        self.delta_invariant = delta_invariant
        self.sigma_invariant = sigma_invariant

    def __repr__(self) -> str:
        return (
            f"TraceKind(twist_power={self.twist_power}, "
            f"delta_invariant={self.delta_invariant}, "
            f"sigma_invariant={self.sigma_invariant})"
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "twist_power": self.twist_power,
            "delta_invariant": self.delta_invariant,
            "sigma_invariant": self.sigma_invariant,
        }


@dataclass(frozen=True)
class Trace:
    """Named trace functional A -> scalars with declared properties"""

    name: str
    func: Callable[[Element], ExactScalar]
    kind: TraceKind

    def __call__(self, element: Element) -> ExactScalar:
        return self.func(element)


def iterate(map_: EndoMap, i: int, a: Element) -> Element:
    """i-fold composition of ``map_`` applied to ``a`` (i >= 0)"""
    if i < 0:
        raise ValueError(f"iterate needs a non-negative count, got {i}")
    for _ in range(i):
        a = map_(a)
    return a


MEMO_MAXSIZE = 50_000

_MISSING = object()


class LRUMemo:
    """Size-capped memo; the least recently used entry goes first"""

    def __init__(self, maxsize: int = MEMO_MAXSIZE):
        if maxsize < 1:
            raise ValueError(f"memo size must be positive, got {maxsize}")
        self.maxsize = maxsize
        self._entries: "OrderedDict[Tuple, Any]" = OrderedDict()

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, key: Tuple) -> bool:
        return key in self._entries

    def get(self, key: Tuple, default: Any = None) -> Any:
        value = self._entries.get(key, _MISSING)
        if value is _MISSING:
            return default
        self._entries.move_to_end(key)
        return value

    def put(self, key: Tuple, value: Any) -> None:
        self._entries[key] = value
        self._entries.move_to_end(key)
        while len(self._entries) > self.maxsize:
            self._entries.popitem(last=False)

    def clear(self) -> None:
        self._entries.clear()


# ============================================================================
# ALGEBRA CONTEXT
# ============================================================================


@dataclass(frozen=True, eq=False)
class AlgebraContext:
    """
    The bundle (A, sigma, sigma^-1, deltas, traces) every symbol lives over.

    Contexts compare by identity. The hypotheses_checked flag is only ever set
    by verify_context, which returns a fresh context. sigma_period, when
    known, is an n > 0 with sigma^n = id.
    """

    kind: str
    algebra: BaseAlgebra
    sigma: EndoMap
    sigma_inv: EndoMap
    deltas: Tuple[EndoMap, ...]
    traces: Tuple[Trace, ...]
    sigma_is_identity: bool = False
    hypotheses_checked: bool = False
    report: Optional["HypothesisReport"] = None
    parameters: Dict[str, Any] = field(default_factory=dict)
    sigma_period: Optional[int] = None
    memo_size: int = MEMO_MAXSIZE
    memo: LRUMemo = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.deltas) not in (1, 2):
            raise ValueError(f"a context carries 1 or 2 derivations, got {len(self.deltas)}")
        if self.sigma_period is not None and self.sigma_period < 1:
            raise ValueError(f"sigma_period must be positive, got {self.sigma_period}")
        object.__setattr__(self, "memo", LRUMemo(self.memo_size))

    @property
    def dimension(self) -> int:
        return len(self.deltas)

    def one(self) -> Element:
        return self.algebra.one()

    def zero(self) -> Element:
        return self.algebra.zero()

    def _power(self, tag: Tuple, map_: EndoMap, count: int, a: Element) -> Element:
        # resume from the deepest memoized power below count
        start, value = 0, a
        for i in range(count, 0, -1):
            hit = self.memo.get(tag + (i, a), _MISSING)
            if hit is not _MISSING:
                start, value = i, hit
                break
        for i in range(start + 1, count + 1):
            value = map_(value)
            self.memo.put(tag + (i, a), value)
        return value

    def sigma_power(self, k: int, a: Element) -> Element:
        """sigma^k(a) for any integer k; negative powers go through sigma_inv"""
        if self.sigma_is_identity:
            return a
        if self.sigma_period is not None:
            k %= self.sigma_period
        if k == 0:
            return a
        if k > 0:
            return self._power(("sigma",), self.sigma, k, a)
        return self._power(("sigma_inv",), self.sigma_inv, -k, a)

    def delta_power(self, index: int, j: int, a: Element) -> Element:
        """delta_index^j(a), memoized"""
        if j == 0:
            return a
        return self._power(("delta", index), self.deltas[index], j, a)

    def memoize(self, key: Tuple, compute: Callable[[], Any]) -> Any:
        """Per-context cache for pure derived values (expansions, powers)"""
        cached = self.memo.get(key, _MISSING)
        if cached is _MISSING:
            cached = compute()
            self.memo.put(key, cached)
        return cached

    def trace(self, selector: TraceSelector = 0) -> Trace:
        """Look a trace up by position or by name"""
        if isinstance(selector, int):
            if not 0 <= selector < len(self.traces):
                raise ContextMismatchError(
                    f"context {self.kind} has {len(self.traces)} traces, no index {selector}"
                )
            return self.traces[selector]
        for candidate in self.traces:
            if candidate.name == selector or candidate.name == f"tau_{selector}":
                return candidate
        names = ", ".join(t.name for t in self.traces)
        raise ContextMismatchError(f"context {self.kind} has no trace {selector!r} (have {names})")

    def require_same(self, other: "AlgebraContext") -> None:
        if other is not self:
            raise ContextMismatchError(
                f"operands live in different contexts ({self.kind} vs {other.kind})"
            )

    def require_checked(self) -> None:
        if not self.hypotheses_checked:
            raise HypothesisError(
                f"context {self.kind} has not passed the hypothesis checker", self.report
            )

    def with_traces(self, traces: Sequence[Trace], kind: Optional[str] = None) -> "AlgebraContext":
        """Unverified copy with a different trace list"""
        return replace(
            self,
            kind=kind or self.kind,
            traces=tuple(traces),
            hypotheses_checked=False,
            report=None,
        )


def restrict_to_1d(ctx: AlgebraContext, delta_index: int = 0, degree_bound: Optional[int] = None) -> AlgebraContext:
    """One-derivation context keeping delta_{delta_index}, re-verified"""
    if not 0 <= delta_index < ctx.dimension:
        raise ValueError(f"context {ctx.kind} has no derivation {delta_index + 1}")
    restricted = replace(
        ctx,
        kind=f"{ctx.kind}/d{delta_index + 1}",
        deltas=(ctx.deltas[delta_index],),
        hypotheses_checked=False,
        report=None,
        parameters={**ctx.parameters, "restricted_from": ctx.kind, "delta_index": delta_index},
    )
    bound = degree_bound if degree_bound is not None else ctx.parameters.get("degree_bound", 2)
    return verify_context(restricted, degree_bound=bound)


# ============================================================================
# HYPOTHESIS CHECKER
# ============================================================================


class HypothesisKind(Enum):
    """Structural hypotheses checked on a context, with their exact laws"""

    SIGMA_MULTIPLICATIVE = ("sigma_multiplicative", "sigma(ab) = sigma(a) sigma(b)")
    SIGMA_UNIT = ("sigma_unit", "sigma(1) = 1")
    SIGMA_INVERTIBLE = ("sigma_invertible", "sigma(sigma_inv(a)) = sigma_inv(sigma(a)) = a")
    SIGMA_LEIBNIZ = ("sigma_leibniz", "delta(ab) = delta(a) b + sigma(a) delta(b)")
    DELTAS_COMMUTE = ("deltas_commute", "delta_1 delta_2 = delta_2 delta_1")
    DELTA_SIGMA_COMMUTE = ("delta_sigma_commute", "delta sigma = sigma delta")
    TRACE_DELTA_INVARIANT = ("trace_delta_invariant", "tau(delta(a)) = 0")
    TRACE_SIGMA_INVARIANT = ("trace_sigma_invariant", "tau(sigma(a)) = tau(a)")
    TWISTED_TRACE = ("twisted_trace", "tau(ab) = tau(sigma^k(b) a)")

    def __init__(self, key: str, law: str):
        self.key = key
        self.law = law


@dataclass(frozen=True)
class HypothesisResult:
    """Outcome of one hypothesis on one subject (a derivation, a trace, ...)"""

    kind: HypothesisKind
    subject: str
    passed: bool
    required: bool
    checked: int
    witness: Optional[Dict[str, str]] = None

    @property
    def name(self) -> str:
        return f"{self.kind.key}[{self.subject}]" if self.subject else self.kind.key

    def to_dict(self) -> Dict[str, Any]:
        entry: Dict[str, Any] = {
            "hypothesis": self.name,
            "law": self.kind.law,
            "passed": self.passed,
            "required": self.required,
            "checked": self.checked,
        }
        if self.witness is not None:
            entry["witness"] = self.witness
        return entry


@dataclass
class HypothesisReport:
    """Pass/fail record of every hypothesis checked on a context"""

    context_kind: str
    degree_bound: Optional[int]
    sample_size: int
    results: List[HypothesisResult] = field(default_factory=list)

    @property
    def success(self) -> bool:
        return all(r.passed for r in self.results if r.required)

    @property
    def failures(self) -> List[HypothesisResult]:
        return [r for r in self.results if r.required and not r.passed]

    def lookup(self, kind: HypothesisKind, subject: str = "") -> Optional[HypothesisResult]:
        for result in self.results:
            if result.kind is kind and result.subject == subject:
                return result
        return None

    def holds(self, kind: HypothesisKind, subject: str = "") -> bool:
        result = self.lookup(kind, subject)
        return result is not None and result.passed

    def to_dict(self) -> Dict[str, Any]:
        return {
            "context": self.context_kind,
            "degree_bound": self.degree_bound,
            "sample_size": self.sample_size,
            "success": self.success,
            "results": [r.to_dict() for r in self.results],
        }


class _Recorder:
    """Collects exact comparisons for one hypothesis and keeps the first witness"""

    def __init__(self, algebra: BaseAlgebra, kind: HypothesisKind, subject: str, required: bool):
        self.algebra = algebra
        self.kind = kind
        self.subject = subject
        self.required = required
        self.checked = 0
        self.witness: Optional[Dict[str, str]] = None

    def _text(self, value: Any) -> str:
        if isinstance(value, (int, Fraction, GaussianRational, Cyclotomic)):
            return format_scalar(value)
        return str(value)

    def compare(self, lhs: Any, rhs: Any, **inputs: Any) -> None:
        self.checked += 1
        if self.witness is not None:
            return
        difference = lhs - rhs
        zero = difference.is_zero() if hasattr(difference, "is_zero") else scalar_is_zero(difference)
        if not zero:
            self.witness = {name: self._text(value) for name, value in inputs.items()}
            self.witness["lhs"] = self._text(lhs)
            self.witness["rhs"] = self._text(rhs)

    def result(self) -> HypothesisResult:
        return HypothesisResult(
            kind=self.kind,
            subject=self.subject,
            passed=self.witness is None,
            required=self.required,
            checked=self.checked,
            witness=self.witness,
        )


def check_hypotheses(
    ctx: AlgebraContext,
    sample: Sequence[Element],
    degree_bound: Optional[int] = None,
) -> HypothesisReport:
    """
    Check every structural hypothesis exactly on all sample elements and pairs.

    By bilinearity a spanning monomial sample makes each check exact on the
    span of the sample; ``degree_bound`` documents which span that is.
    """
    if not sample:
        raise ValueError("check_hypotheses needs a non-empty sample")

    algebra = ctx.algebra
    report = HypothesisReport(ctx.kind, degree_bound, len(sample))
    pairs = list(itertools.product(sample, repeat=2))
    one = algebra.one()
    multi = ctx.dimension == 2

    def recorder(kind: HypothesisKind, subject: str = "", required: bool = True) -> _Recorder:
        return _Recorder(algebra, kind, subject, required)

    # sigma is an automorphism
    rec = recorder(HypothesisKind.SIGMA_UNIT)
    rec.compare(ctx.sigma(one), one)
    rec.compare(ctx.sigma_inv(one), one)
    report.results.append(rec.result())

    rec = recorder(HypothesisKind.SIGMA_INVERTIBLE)
    for a in sample:
        rec.compare(ctx.sigma(ctx.sigma_inv(a)), a, a=a)
        rec.compare(ctx.sigma_inv(ctx.sigma(a)), a, a=a)
    report.results.append(rec.result())

    rec = recorder(HypothesisKind.SIGMA_MULTIPLICATIVE)
    for a, b in pairs:
        rec.compare(ctx.sigma(a * b), ctx.sigma(a) * ctx.sigma(b), a=a, b=b)
    report.results.append(rec.result())

    for index, delta in enumerate(ctx.deltas):
        subject = f"delta{index + 1}"
        rec = recorder(HypothesisKind.SIGMA_LEIBNIZ, subject)
        for a, b in pairs:
            rec.compare(delta(a * b), delta(a) * b + ctx.sigma(a) * delta(b), a=a, b=b)
        report.results.append(rec.result())

        # required only where the product formulas rely on it
        rec = recorder(HypothesisKind.DELTA_SIGMA_COMMUTE, subject, required=multi)
        for a in sample:
            rec.compare(delta(ctx.sigma(a)), ctx.sigma(delta(a)), a=a)
        report.results.append(rec.result())

    if multi:
        rec = recorder(HypothesisKind.DELTAS_COMMUTE)
        for a in sample:
            rec.compare(ctx.deltas[0](ctx.deltas[1](a)), ctx.deltas[1](ctx.deltas[0](a)), a=a)
        report.results.append(rec.result())

    for trace in ctx.traces:
        kind = trace.kind
        for index, delta in enumerate(ctx.deltas):
            rec = recorder(
                HypothesisKind.TRACE_DELTA_INVARIANT,
                f"{trace.name},delta{index + 1}",
                required=kind.delta_invariant,
            )
            for a in sample:
                rec.compare(trace(delta(a)), algebra.scalar(0), a=a)
            report.results.append(rec.result())

        rec = recorder(HypothesisKind.TRACE_SIGMA_INVARIANT, trace.name, required=kind.sigma_invariant)
        for a in sample:
            rec.compare(trace(ctx.sigma(a)), trace(a), a=a)
        report.results.append(rec.result())

        rec = recorder(HypothesisKind.TWISTED_TRACE, f"{trace.name},k={kind.twist_power}")
        for a, b in pairs:
            rec.compare(trace(a * b), trace(ctx.sigma_power(kind.twist_power, b) * a), a=a, b=b)
        report.results.append(rec.result())

    for failure in report.failures:
        log.warning(
            "hypothesis_failed",
            context=ctx.kind,
            hypothesis=failure.name,
            witness=failure.witness,
        )
    log.debug(
        "hypotheses_checked",
        context=ctx.kind,
        sample_size=len(sample),
        degree_bound=degree_bound,
        success=report.success,
    )
    return report


def verify_context(ctx: AlgebraContext, degree_bound: int = 2, sample: Optional[Iterable[Element]] = None) -> AlgebraContext:
    """
    Run the checker on the algebra's spanning sample and return a verified copy.

    Raises:
        HypothesisError: naming the first failed hypothesis
    """
    elements = list(sample) if sample is not None else ctx.algebra.spanning_sample(degree_bound)
    report = check_hypotheses(ctx, elements, degree_bound)
    if not report.success:
        first = report.failures[0]
        raise HypothesisError(
            f"context {ctx.kind} violates {first.name}: {first.kind.law}", report
        )
    return replace(
        ctx,
        hypotheses_checked=True,
        report=report,
        parameters={**ctx.parameters, "degree_bound": degree_bound},
    )
