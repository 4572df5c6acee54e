from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis.strategies import integers

from psicalc.core import HypothesisError
from psicalc.instances import (
    TORUS4_LABELS,
    FourierAlgebra,
    QTorusElement,
    QuantumTorusAlgebra,
    TrigPoly,
    TupleElement,
    make_circle2_context,
    make_circle_context,
    make_qtorus_1d_context,
    make_qtorus_context,
    make_torus4_context,
    make_torus_context,
    parse_qtorus_element,
)
from psicalc.scalars import Cyclotomic, GaussianRational, format_scalar

from .strategies import qtorus_elements, trig_polys


class TestTrigPoly:
    def test_modes_multiply_by_adding_frequencies(self):
        product = TrigPoly.mode((1, 0), 2) * TrigPoly.mode((-1, 3), 3)
        assert product == TrigPoly.mode((0, 3), 6)

    def test_zero_coefficients_are_dropped(self):
        assert TrigPoly.from_map(1, {(2,): 0}).is_zero()
        assert (TrigPoly.mode((1,)) - TrigPoly.mode((1,))).is_zero()

    def test_derivative_multiplies_by_frequency(self):
        poly = TrigPoly.from_map(2, {(3, -1): 1, (0, 2): GaussianRational(0, 1)})
        assert poly.derivative(0) == TrigPoly.mode((3, -1), 3)
        assert poly.derivative(1) == TrigPoly.from_map(2, {(3, -1): -1, (0, 2): GaussianRational(0, 2)})

    def test_text_forms(self):
        poly = TrigPoly.from_map(2, {(1, 0): 3, (0, -1): -1, (0, 0): GaussianRational(1, 1)})
        assert str(poly) == "-e[0,-1]+(1+i)*e[0,0]+3*e[1,0]"
        assert poly.to_json() == {"0,-1": "-1", "0,0": "1+i", "1,0": "3"}
        assert str(TrigPoly.zero_poly(1)) == "0"

    def test_dimension_mismatch(self):
        with pytest.raises(TypeError):
            TrigPoly.mode((1,)) + TrigPoly.mode((1, 0))

    @given(trig_polys(2), trig_polys(2), integers(0, 1))
    def test_derivative_is_a_derivation(self, a, b, axis):
        assert (a * b).derivative(axis) == a.derivative(axis) * b + a * b.derivative(axis)


class TestTupleElement:
    def test_components_do_not_interact(self):
        a = TupleElement.placed(TrigPoly.mode((1,)), 0, 2)
        b = TupleElement.placed(TrigPoly.mode((1,)), 1, 2)
        assert (a * b).is_zero()
        assert a.labels == ("1", "2")

    def test_component_lookup(self):
        algebra = FourierAlgebra(2, 4)
        element = algebra.placed(TrigPoly.mode((1, 1)), 2)
        assert element.component("21") == TrigPoly.mode((1, 1))
        assert element.component("11").is_zero()

    def test_text_form(self):
        element = TupleElement((TrigPoly.constant(1, 1), TrigPoly.constant(1, -1)))
        assert str(element) == "(e[0])@(1)+(-e[0])@(2)"
        assert str(TupleElement.broadcast(TrigPoly.mode((2,)), 2)) == "e[2]"

    def test_only_two_or_four_copies(self):
        with pytest.raises(ValueError):
            TupleElement((TrigPoly.constant(1),) * 3)


class TestQuantumTorus:
    def test_commutation_relation(self):
        algebra = QuantumTorusAlgebra(4)
        U, V = algebra.monomial(1, 0), algebra.monomial(0, 1)
        assert U * V == (V * U).scale(Cyclotomic.q_power(4, 1))

    def test_inverse_monomial(self):
        algebra = QuantumTorusAlgebra(3)
        for m, n in ((1, 1), (2, -1), (-3, 2)):
            w = algebra.monomial(m, n)
            assert w * algebra.inverse_monomial(m, n) == algebra.one()
            assert algebra.inverse_monomial(m, n) * w == algebra.one()

    @given(qtorus_elements(3), qtorus_elements(3), qtorus_elements(3))
    def test_associative(self, a, b, c):
        assert (a * b) * c == a * (b * c)

    def test_rejects_gaussian_coefficients(self):
        with pytest.raises(TypeError):
            QuantumTorusAlgebra(2).scalar(GaussianRational(0, 1))

    def test_text_form(self):
        element = QTorusElement.from_map(4, {(1, 0): 1, (0, 2): -1, (1, 1): Cyclotomic.q_power(4, 1)})
        assert str(element) == "-V^2+U+q*U*V"
        assert element.to_json() == {"0,2": "-1", "1,0": "1", "1,1": "q"}

    def test_parse_element(self):
        assert parse_qtorus_element("U^2*V^-1", 2) == QTorusElement.monomial(2, 2, -1)
        assert parse_qtorus_element("q*U", 4) == QTorusElement.monomial(4, 1, 0, Cyclotomic.q_power(4, 1))


class TestFourierContexts:
    @pytest.mark.parametrize(
        "factory, kind, traces",
        [
            (make_circle_context, "circle", ("tau",)),
            (make_torus_context, "torus", ("tau",)),
            (make_circle2_context, "circle2", ("tau_1", "tau_2")),
            (make_torus4_context, "torus4", tuple(f"tau_{label}" for label in TORUS4_LABELS)),
        ],
    )
    def test_built_in_contexts_are_verified(self, factory, kind, traces):
        ctx = factory()
        assert ctx.kind == kind
        assert ctx.hypotheses_checked
        assert ctx.report.success
        assert ctx.sigma_is_identity
        assert tuple(t.name for t in ctx.traces) == traces

    def test_factories_are_cached(self):
        assert make_torus4_context() is make_torus4_context()

    def test_traces_read_the_constant_coefficient_of_one_component(self):
        ctx = make_torus4_context()
        algebra = ctx.algebra
        element = algebra.placed(TrigPoly.from_map(2, {(0, 0): 5, (1, 0): 7}), 1)
        values = {t.name: t(element) for t in ctx.traces}
        assert values == {
            "tau_11": GaussianRational(0),
            "tau_12": GaussianRational(5),
            "tau_21": GaussianRational(0),
            "tau_22": GaussianRational(0),
        }

    def test_trace_selectors(self):
        ctx = make_torus4_context()
        assert ctx.trace("11").name == "tau_11"
        assert ctx.trace("tau_22").name == "tau_22"
        assert ctx.trace(3).name == "tau_22"


class TestQuantumTorusContexts:
    def test_default_context_passes_every_hypothesis(self):
        ctx = make_qtorus_context()
        assert ctx.hypotheses_checked
        assert ctx.report.success
        assert all(result.passed for result in ctx.report.results)
        assert ctx.report.degree_bound == 4
        assert ctx.report.sample_size == 81

    def test_default_twist_is_not_trivial(self):
        ctx = make_qtorus_context()
        U = ctx.algebra.monomial(1, 0)
        assert not ctx.sigma_is_identity
        assert ctx.sigma(U) != U
        assert ctx.sigma(U) == -U

    def test_traces_and_twist_powers(self):
        ctx = make_qtorus_context()
        assert [(t.name, t.kind.twist_power) for t in ctx.traces] == [("tau_W", 2), ("tau_W1", 1)]
        assert ctx.trace("W1").name == "tau_W1"

    @pytest.mark.parametrize("N, r, s", [(2, 1, 1), (4, 2, 2)])
    def test_weighted_traces_are_normalized_on_w(self, N, r, s):
        ctx = make_qtorus_context(N=N, r=r, s=s)
        W = ctx.algebra.monomial(r, s)
        assert format_scalar(ctx.trace("W")(W * W)) == "1"
        assert format_scalar(ctx.trace("W1")(W)) == "1"
        assert format_scalar(ctx.trace("W")(ctx.algebra.monomial(2 * r, 2 * s))) == format_scalar(
            Cyclotomic.q_power(N, r * s)
        )

    def test_non_central_twist_square_is_rejected(self):
        with pytest.raises(HypothesisError):
            make_qtorus_context(N=3, r=1, s=0)

    def test_x_given_as_text(self):
        ctx = make_qtorus_context(x1="U^2", x2="V^2")
        assert ctx.parameters["x1"] == "U^2"

    def test_one_derivation_context_has_noncommuting_sigma_and_delta(self):
        ctx = make_qtorus_1d_context()
        assert ctx.dimension == 1
        assert ctx.report.success
        commute = [r for r in ctx.report.results if r.kind.key == "delta_sigma_commute"]
        assert len(commute) == 1
        assert not commute[0].passed
        assert not commute[0].required
        assert commute[0].witness is not None

    def test_inner_derivation_formula(self):
        ctx = make_qtorus_1d_context()
        algebra = ctx.algebra
        V = algebra.monomial(0, 1)
        U = algebra.monomial(1, 0)
        delta = ctx.deltas[0]
        # delta(a) = U a - sigma(a) U
        assert delta(V) == U * V - ctx.sigma(V) * U
        assert delta(algebra.one()).is_zero()

    def test_rational_coefficients_embed(self):
        algebra = QuantumTorusAlgebra(2)
        assert algebra.embed(Fraction(1, 2)) == QTorusElement.monomial(2, 0, 0, Fraction(1, 2))
