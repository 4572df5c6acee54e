from dataclasses import replace

import pytest

from psicalc.core import (
    ContextMismatchError,
    HypothesisError,
    HypothesisKind,
    LRUMemo,
    check_hypotheses,
    iterate,
    restrict_to_1d,
    verify_context,
)
from psicalc.instances import (
    TrigPoly,
    TupleElement,
    coefficient_trace,
    make_circle_context,
    make_qtorus_context,
    make_torus4_context,
    make_torus_context,
)
from psicalc.symbols1d import Symbol1D, res
from psicalc.symbols2d import Symbol2D, mul2


class TestHypothesisChecker:
    def test_report_lists_every_hypothesis(self):
        report = make_torus_context().report
        keys = {result.kind for result in report.results}
        assert keys == set(HypothesisKind)

    def test_broken_trace_fails_with_a_witness(self):
        ctx = make_torus_context()
        broken = ctx.with_traces([coefficient_trace(ctx.algebra, (1, 0))], kind="torus-broken")
        with pytest.raises(HypothesisError) as excinfo:
            verify_context(broken, degree_bound=1)
        report = excinfo.value.report
        assert not report.success
        failure = report.failures[0]
        assert failure.kind is HypothesisKind.TRACE_DELTA_INVARIANT
        assert failure.subject == "coeff_e[1,0],delta1"
        assert failure.witness["a"] == "e[1,0]"
        assert failure.witness["lhs"] == "1"
        assert failure.witness["rhs"] == "0"

    def test_broken_trace_report_serializes(self):
        ctx = make_torus_context()
        broken = ctx.with_traces([coefficient_trace(ctx.algebra, (0, 1))])
        report = check_hypotheses(broken, ctx.algebra.spanning_sample(1), 1)
        document = report.to_dict()
        assert document["success"] is False
        failed = [entry for entry in document["results"] if not entry["passed"]]
        assert [entry["hypothesis"] for entry in failed] == ["trace_delta_invariant[coeff_e[0,1],delta2]"]
        assert "witness" in failed[0]

    def test_constant_trace_passes(self):
        ctx = make_torus_context()
        renamed = ctx.with_traces([coefficient_trace(ctx.algebra, (0, 0), name="integral")])
        assert not renamed.hypotheses_checked
        verified = verify_context(renamed, degree_bound=1)
        assert verified.hypotheses_checked
        assert verified.report.success
        assert verified.parameters["degree_bound"] == 1

    def test_explicit_sample(self):
        ctx = make_circle_context()
        sample = [TrigPoly.mode((3,)), TrigPoly.mode((-5,))]
        verified = verify_context(ctx, degree_bound=5, sample=sample)
        assert verified.report.sample_size == 2

    def test_empty_sample_is_rejected(self):
        with pytest.raises(ValueError):
            check_hypotheses(make_circle_context(), [])

    def test_unchecked_context_refuses_residues(self):
        ctx = make_circle_context()
        unchecked = ctx.with_traces(ctx.traces)
        symbol = Symbol1D.xi(unchecked, -1)
        with pytest.raises(HypothesisError):
            unchecked.require_checked()
        with pytest.raises(HypothesisError):
            res(symbol)


class TestAlgebraContext:
    def test_contexts_compare_by_identity(self):
        a = make_torus4_context()
        with pytest.raises(ContextMismatchError):
            a.require_same(make_torus_context())
        a.require_same(a)

    def test_unknown_trace(self):
        ctx = make_torus4_context()
        with pytest.raises(ContextMismatchError):
            ctx.trace("33")
        with pytest.raises(ContextMismatchError):
            ctx.trace(4)

    def test_sigma_power_round_trip(self):
        ctx = make_qtorus_context()
        a = ctx.algebra.monomial(1, 2)
        assert ctx.sigma_power(-3, ctx.sigma_power(3, a)) == a
        assert ctx.sigma_power(2, a) == ctx.sigma(ctx.sigma(a))

    def test_delta_power(self):
        ctx = make_circle_context()
        a = TrigPoly.mode((2,))
        assert ctx.delta_power(0, 3, a) == TrigPoly.mode((2,), 8)

    def test_iterate(self):
        assert iterate(lambda x: x * 2, 3, 1) == 8
        with pytest.raises(ValueError):
            iterate(lambda x: x, -1, 0)

    def test_restrict_to_1d(self):
        ctx = make_qtorus_context()
        restricted = restrict_to_1d(ctx, 1)
        assert restricted.kind == "qtorus/d2"
        assert restricted.dimension == 1
        assert restricted.hypotheses_checked
        assert restricted.parameters["restricted_from"] == "qtorus"
        assert restricted.deltas[0] is ctx.deltas[1]

    def test_restrict_to_missing_derivation(self):
        with pytest.raises(ValueError):
            restrict_to_1d(make_circle_context(), 1)

    def test_deep_sigma_powers_reduce_by_the_period(self):
        ctx = make_qtorus_context()
        a = ctx.algebra.monomial(1, 2)
        assert ctx.sigma_period == 2
        assert ctx.sigma_power(5001, a) == ctx.sigma(a)
        assert ctx.sigma_power(-4000, a) == a

    def test_deep_powers_without_a_period(self):
        ctx = replace(make_qtorus_context(), sigma_period=None)
        a = ctx.algebra.monomial(1, 0)
        assert ctx.sigma_power(3001, a) == -a
        assert ctx.sigma_power(-3000, a) == a
        circle = make_circle_context()
        assert circle.delta_power(0, 3000, TrigPoly.mode((1,))) == TrigPoly.mode((1,))

    def test_powers_resume_from_memoized_steps(self):
        ctx = replace(make_qtorus_context(), sigma_period=None)
        calls = []

        def counting_sigma(a):
            calls.append(a)
            return ctx.sigma(a)

        counted = replace(ctx, sigma=counting_sigma)
        a = counted.algebra.monomial(0, 1)
        counted.sigma_power(5, a)
        counted.sigma_power(7, a)
        assert len(calls) == 7


class TestLRUMemo:
    def test_least_recently_used_entry_goes_first(self):
        memo = LRUMemo(2)
        memo.put(("a",), 1)
        memo.put(("b",), 2)
        assert memo.get(("a",)) == 1
        memo.put(("c",), 3)
        assert ("b",) not in memo
        assert ("a",) in memo and ("c",) in memo
        assert len(memo) == 2

    def test_default_for_missing_keys(self):
        memo = LRUMemo(4)
        assert memo.get(("x",)) is None
        assert memo.get(("x",), 0) == 0

    def test_size_must_be_positive(self):
        with pytest.raises(ValueError):
            LRUMemo(0)

    def test_context_memo_stays_bounded(self):
        full = make_torus4_context()
        small = replace(full, memo_size=32)
        for k in range(1, 25):
            element = TupleElement.broadcast(TrigPoly.mode((k, -k)), 4)
            left = Symbol2D.monomial(small, small.one(), 1, -1)
            right = Symbol2D.monomial(small, element, -2, 1)
            product = mul2(left, right, (-4, -4))
            assert len(small.memo) <= 32
            expected = mul2(
                Symbol2D.monomial(full, full.one(), 1, -1),
                Symbol2D.monomial(full, element, -2, 1),
                (-4, -4),
            )
            assert product.terms == expected.terms
