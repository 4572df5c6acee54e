from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis.strategies import integers

from psicalc.core import (
    ContextMismatchError,
    HypothesisError,
    UncertifiedError,
    restrict_to_1d,
)
from psicalc.instances import (
    TrigPoly,
    TupleElement,
    make_circle2_context,
    make_circle_context,
    make_qtorus_1d_context,
    make_qtorus_context,
    make_torus4_context,
    make_torus_context,
)
from psicalc.rewriter import oracle_mul
from psicalc.scalars import GaussianRational, binom, format_scalar
from psicalc.symbols1d import (
    Letter,
    Symbol1D,
    apply_word,
    commutator,
    format_word,
    mul,
    p_poly,
    res,
    res_class,
    res_sigma,
    residue_table,
    toeplitz_project,
    xi_inverse_remainder,
    xi_neg_pow_multi_index,
    xi_pow_times,
    xi_pow_times_binomial,
    xi_pow_times_iterated,
    xi_pow_times_words,
)

from .strategies import elements_for, symbols1d

CIRCLE = make_circle_context()
CIRCLE2 = make_circle2_context()
QTORUS1D = make_qtorus_1d_context()
QTORUS_D1 = restrict_to_1d(make_qtorus_context(), 0)


def e(k, c=1):
    return TrigPoly.mode((k,), c)


class TestOperatorWords:
    def test_p_3_4_is_the_four_word_expansion(self):
        assert [format_word(w) for w in p_poly(3, 4)] == ["δσ^3", "σδσ^2", "σ^2δσ", "σ^3δ"]

    @pytest.mark.parametrize("n", range(1, 9))
    def test_word_counts_are_binomial(self, n):
        for i in range(n + 1):
            words = p_poly(i, n)
            assert len(words) == binom(n, i)
            assert all(len(w) == n and w.count(Letter.SIGMA) == i for w in words)
            assert len(set(words)) == len(words)

    def test_bad_indices(self):
        with pytest.raises(ValueError):
            p_poly(0, 0)
        with pytest.raises(ValueError):
            p_poly(3, 2)

    def test_leftmost_letter_is_applied_last(self):
        U = QTORUS1D.algebra.monomial(1, 0)
        word = (Letter.SIGMA, Letter.DELTA)
        assert apply_word(QTORUS1D, word, U) == QTORUS1D.sigma(QTORUS1D.deltas[0](U))


class TestXiTimesElement:
    def test_xi_times_mode(self):
        product = mul(Symbol1D.xi(CIRCLE), Symbol1D.constant(CIRCLE, e(1)))
        assert product.terms == ((1, e(1)), (0, e(1)))
        assert product.is_exact

    def test_xi_inverse_times_mode(self):
        expansion = xi_pow_times(CIRCLE, -1, e(1), floor=-4)
        assert expansion.terms == ((-1, e(1)), (-2, e(1, -1)), (-3, e(1)), (-4, e(1, -1)))
        assert expansion.floor == -4

    def test_floor_above_leading_order(self):
        with pytest.raises(ValueError):
            xi_pow_times(CIRCLE, -2, e(1), floor=-1)

    def test_negative_power_needs_a_floor(self):
        with pytest.raises(UncertifiedError):
            xi_pow_times(QTORUS1D, -1, QTORUS1D.one())

    @given(integers(-4, 4), elements_for(CIRCLE))
    def test_binomial_formula_matches_iterated_rule(self, n, a):
        assert xi_pow_times(CIRCLE, n, a, -6) == xi_pow_times_iterated(CIRCLE, n, a, -6)

    @given(integers(1, 5), elements_for(QTORUS1D))
    def test_word_expansion_matches_iterated_rule(self, n, a):
        assert xi_pow_times_words(QTORUS1D, n, a) == xi_pow_times(QTORUS1D, n, a)

    @given(integers(-3, 3), elements_for(QTORUS_D1))
    def test_binomial_path_on_commuting_twist(self, n, a):
        assert xi_pow_times_binomial(QTORUS_D1, n, a, -5) == xi_pow_times(QTORUS_D1, n, a, -5)

    def test_binomial_path_refuses_noncommuting_twist(self):
        with pytest.raises(HypothesisError):
            xi_pow_times_binomial(QTORUS1D, 2, QTORUS1D.one())

    @given(integers(1, 3), elements_for(QTORUS1D))
    def test_multi_index_formula_matches_iterated_rule(self, n, a):
        assert xi_neg_pow_multi_index(QTORUS1D, n, a, -5) == xi_pow_times(QTORUS1D, -n, a, -5)

    def test_multi_index_ordering_is_validated(self):
        with pytest.raises(ValueError):
            xi_neg_pow_multi_index(QTORUS1D, 2, QTORUS1D.one(), -4, ordering="sideways")

    @given(integers(0, 3), elements_for(QTORUS1D))
    def test_truncated_inverse_identity(self, N, a):
        expansion = xi_inverse_remainder(QTORUS1D, a, N)
        assert expansion.remainder_order == -1 - N
        tail = mul(
            Symbol1D.xi(QTORUS1D, -1),
            Symbol1D.monomial(QTORUS1D, expansion.remainder, expansion.remainder_order),
            floor=-7,
        )
        assert (expansion.explicit + tail).agrees_with(xi_pow_times(QTORUS1D, -1, a, -7))

    def test_truncated_inverse_identity_on_the_circle(self):
        expansion = xi_inverse_remainder(CIRCLE, e(2), 1)
        assert expansion.explicit.terms == ((-1, e(2)), (-2, e(2, -2)))
        assert expansion.remainder == e(2, 4)


class TestSymbolArithmetic:
    def test_xi_and_its_inverse(self):
        product = mul(Symbol1D.xi(CIRCLE), Symbol1D.xi(CIRCLE, -1), floor=-6)
        assert product == Symbol1D(CIRCLE, {0: CIRCLE.one()}, top=0, floor=-6)

    def test_infinite_expansion_needs_a_floor(self):
        with pytest.raises(UncertifiedError):
            mul(Symbol1D.xi(CIRCLE, -1), Symbol1D.constant(CIRCLE, e(1)))

    def test_nonnegative_left_factor_is_exact(self):
        product = mul(Symbol1D.constant(CIRCLE, e(3)), Symbol1D.xi(CIRCLE, -2))
        assert product.is_exact
        assert product.terms == ((-2, e(3)),)

    def test_floor_propagation(self):
        d1 = Symbol1D(CIRCLE, {1: CIRCLE.one(), -2: e(1)}, top=1, floor=-3)
        product = mul(d1, Symbol1D.xi(CIRCLE, 2))
        assert product.top == 3
        assert product.floor == -1

    def test_requested_floor_is_clamped_to_top(self):
        product = mul(Symbol1D.xi(CIRCLE, -3), Symbol1D.xi(CIRCLE, -3), floor=0)
        assert product.floor == -6
        assert product.terms == ((-6, CIRCLE.one()),)

    def test_uncertified_coefficient(self):
        symbol = xi_pow_times(CIRCLE, -1, e(1), floor=-3)
        assert symbol.coefficient(-3) == e(1)
        assert symbol.coefficient(5).is_zero()
        with pytest.raises(UncertifiedError):
            symbol.coefficient(-4)

    def test_truncate(self):
        symbol = xi_pow_times(CIRCLE, -1, e(1), floor=-5).truncate(-2)
        assert symbol.floor == -2
        assert symbol.orders == [-1, -2]

    def test_scalar_multiples(self):
        symbol = Symbol1D.monomial(CIRCLE, e(1), 2)
        assert (2 * symbol).terms == ((2, e(1, 2)),)
        assert (symbol - symbol).terms == ()

    def test_operands_must_share_a_context(self):
        with pytest.raises(ContextMismatchError):
            mul(Symbol1D.xi(CIRCLE), Symbol1D.xi(CIRCLE2))

    def test_two_derivation_contexts_are_rejected(self):
        with pytest.raises(ContextMismatchError):
            Symbol1D.xi(make_torus4_context())

    def test_declared_top_is_enforced(self):
        with pytest.raises(ValueError):
            Symbol1D(CIRCLE, {3: CIRCLE.one()}, top=2)

    def test_table(self):
        symbol = Symbol1D(CIRCLE, {0: e(1), -1: CIRCLE.one().scale(2)}, top=1)
        assert symbol.to_table() == {
            "context": "circle",
            "dimension": 1,
            "top": 1,
            "floor": None,
            "exact": True,
            "terms": [
                {"order": -1, "coefficient": {"0": "2"}},
                {"order": 0, "coefficient": {"1": "1"}},
            ],
        }

    @settings(max_examples=100)
    @given(
        symbols1d(QTORUS1D, -2, 2),
        symbols1d(QTORUS1D, -2, 2),
        symbols1d(QTORUS1D, -2, 2),
    )
    def test_associativity(self, a, b, c):
        left = mul(mul(a, b, -5), c, -5)
        right = mul(a, mul(b, c, -5), -5)
        assert left.agrees_with(right, -5)

    @settings(max_examples=100)
    @given(symbols1d(QTORUS1D, -2, 2), symbols1d(QTORUS1D, -2, 2))
    def test_deeper_floors_agree_above_the_shallow_floor(self, a, b):
        assert mul(a, b, -7).agrees_with(mul(a, b, -4), -4)


@pytest.mark.slow
class TestRewriterOracle:
    @settings(max_examples=50)
    @given(symbols1d(QTORUS1D, -2, 2), symbols1d(QTORUS1D, -2, 2))
    def test_twisted_product_matches_oracle(self, a, b):
        assert mul(a, b, -5) == oracle_mul(a, b, -5)

    @settings(max_examples=50)
    @given(symbols1d(CIRCLE2, -2, 2), symbols1d(CIRCLE2, -2, 2))
    def test_untwisted_product_matches_oracle(self, a, b):
        assert mul(a, b, -5) == oracle_mul(a, b, -5)

    def test_oracle_needs_a_floor(self):
        with pytest.raises(UncertifiedError):
            oracle_mul(Symbol1D.xi(CIRCLE, -1), Symbol1D.constant(CIRCLE, e(1)))


class TestResidues:
    def test_residue_of_xi_inverse(self):
        assert res(Symbol1D.xi(CIRCLE, -1)) == GaussianRational(1)
        assert residue_table(Symbol1D.xi(CIRCLE2, -1)) == {"tau_1": "1", "tau_2": "1"}

    def test_residue_ignores_other_orders(self):
        symbol = Symbol1D(CIRCLE, {0: e(0), -2: e(0)}, top=0)
        assert res(symbol) == GaussianRational(0)

    def test_residue_needs_the_order_minus_one_coefficient(self):
        symbol = Symbol1D(CIRCLE, {0: CIRCLE.one()}, top=0, floor=0)
        with pytest.raises(UncertifiedError):
            res(symbol)

    def test_trace_selection(self):
        coefficient = TupleElement((TrigPoly.constant(1, 3), TrigPoly.constant(1, Fraction(1, 2))))
        symbol = Symbol1D.monomial(CIRCLE2, coefficient, -1)
        assert format_scalar(res(symbol, "1")) == "3"
        assert format_scalar(res(symbol, "tau_2")) == "1/2"
        assert format_scalar(res(symbol, 1)) == "1/2"

    def test_twisted_residue(self):
        W = QTORUS1D.algebra.monomial(1, 1)
        symbol = Symbol1D.monomial(QTORUS1D, W, -1)
        assert format_scalar(res_sigma(symbol, "W1")) == "1"

    @pytest.mark.parametrize("ctx, trace", [(QTORUS1D, "W1"), (QTORUS_D1, "W"), (QTORUS_D1, "W1")])
    def test_plain_residue_refuses_twisted_traces(self, ctx, trace):
        with pytest.raises(HypothesisError):
            res(Symbol1D.xi(ctx, -1), trace)
        with pytest.raises(HypothesisError):
            residue_table(Symbol1D.xi(ctx, -1))

    def test_twisted_residue_refuses_a_sigma_squared_trace(self):
        symbol = Symbol1D.xi(QTORUS_D1, -1)
        with pytest.raises(HypothesisError):
            res_sigma(symbol, "W")

    def test_residue_class_keeps_the_modes_delta_kills(self):
        symbol = Symbol1D.monomial(CIRCLE, e(1) + e(0, 3) + e(-2, 5), -1)
        assert res_class(symbol) == TrigPoly.constant(1, 3)
        coefficient = TupleElement((e(1) + e(0, 2), e(0, -1)))
        assert res_class(Symbol1D.monomial(CIRCLE2, coefficient, -1)) == TupleElement(
            (TrigPoly.constant(1, 2), TrigPoly.constant(1, -1))
        )

    def test_residue_class_along_the_kept_derivation(self):
        ctx = restrict_to_1d(make_torus_context(), 1)
        coefficient = TrigPoly.from_map(2, {(1, 0): 1, (0, 2): 1, (1, 1): 4})
        assert res_class(Symbol1D.monomial(ctx, coefficient, -1)) == TrigPoly.mode((1, 0))

    def test_residue_class_needs_a_fourier_context(self):
        with pytest.raises(ContextMismatchError):
            res_class(Symbol1D.xi(QTORUS1D, -1))

    def test_toeplitz_projection(self):
        coefficient = TupleElement((e(1), e(2)))
        projected = toeplitz_project(Symbol1D.monomial(CIRCLE2, coefficient, -1))
        assert projected.terms == ((-1, TupleElement((e(1), TrigPoly.zero_poly(1)))),)
        with pytest.raises(ContextMismatchError):
            toeplitz_project(Symbol1D.xi(CIRCLE))


@pytest.mark.slow
class TestTraceProperty:
    @settings(max_examples=200)
    @given(symbols1d(CIRCLE2), symbols1d(CIRCLE2))
    def test_residue_vanishes_on_commutators(self, a, b):
        bracket = commutator(a, b, -8)
        assert residue_table(bracket) == {"tau_1": "0", "tau_2": "0"}

    @settings(max_examples=100)
    @given(symbols1d(CIRCLE2), symbols1d(CIRCLE2))
    def test_residue_class_vanishes_on_commutators(self, a, b):
        assert res_class(commutator(a, b, -8)).is_zero()

    @settings(max_examples=200)
    @given(symbols1d(QTORUS_D1), symbols1d(QTORUS_D1))
    def test_twisted_residue_vanishes_on_commutators_of_a_restriction(self, a, b):
        assert res_sigma(commutator(a, b, -8), "W1").is_zero()

    @settings(max_examples=200)
    @given(symbols1d(QTORUS1D), symbols1d(QTORUS1D))
    def test_twisted_residue_vanishes_without_commuting_twist(self, a, b):
        assert res_sigma(commutator(a, b, -8), "W1").is_zero()
