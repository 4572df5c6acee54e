from hypothesis.strategies import (
    builds,
    composite,
    dictionaries,
    fractions,
    integers,
    just,
    lists,
    one_of,
    recursive,
    sampled_from,
    text,
    tuples,
)

from psicalc.dsl import (
    Add,
    Basis,
    Call,
    Commutator,
    Mul,
    Name,
    Neg,
    Pow,
    Scalar,
    Sub,
    Xi,
)
from psicalc.instances import FourierAlgebra, QTorusElement, TrigPoly, TupleElement
from psicalc.scalars import GaussianRational
from psicalc.symbols1d import Symbol1D
from psicalc.symbols2d import Symbol2D


def small_fractions(max_numerator=3, max_denominator=2):
    return fractions(
        min_value=-max_numerator, max_value=max_numerator, max_denominator=max_denominator
    )


def gaussians():
    return builds(GaussianRational, small_fractions(), small_fractions())


def nonzero_gaussians():
    return gaussians().filter(lambda g: not g.is_zero())


def trig_polys(dim, max_frequency=2, max_terms=3):
    modes = tuples(*[integers(-max_frequency, max_frequency)] * dim)
    return dictionaries(modes, gaussians(), max_size=max_terms).map(
        lambda coefficients: TrigPoly.from_map(dim, coefficients)
    )


def fourier_elements(algebra: FourierAlgebra, max_frequency=2, max_terms=2):
    """Elements of a (possibly direct-sum) Fourier algebra"""
    polys = trig_polys(algebra.dim, max_frequency, max_terms)
    if algebra.copies == 1:
        return polys
    return lists(polys, min_size=algebra.copies, max_size=algebra.copies).map(
        lambda components: TupleElement(tuple(components))
    )


def broadcast_elements(algebra: FourierAlgebra, max_frequency=2, max_terms=2):
    """Elements whose components all agree"""
    return trig_polys(algebra.dim, max_frequency, max_terms).map(algebra.lift)


def qtorus_elements(order, span=2, max_terms=2):
    monomials = tuples(integers(-span, span), integers(-span, span))
    return dictionaries(monomials, integers(-2, 2), max_size=max_terms).map(
        lambda coefficients: QTorusElement.from_map(order, coefficients)
    )


def elements_for(ctx, **kwargs):
    algebra = ctx.algebra
    if isinstance(algebra, FourierAlgebra):
        return fourier_elements(algebra, **kwargs)
    return qtorus_elements(algebra.order, **kwargs)


@composite
def symbols1d(draw, ctx, min_order=-3, max_order=3, max_terms=2, elements=None):
    """Exact one-dimensional symbols with orders in [min_order, max_order]"""
    elements = elements or elements_for(ctx)
    terms = draw(dictionaries(integers(min_order, max_order), elements, max_size=max_terms))
    top = draw(integers(max(terms, default=min_order), max_order))
    return Symbol1D(ctx, terms, top=top)


@composite
def symbols2d(draw, ctx, min_order=-3, max_order=3, max_terms=2, elements=None):
    """Exact two-dimensional symbols with bi-orders in [min_order, max_order]^2"""
    elements = elements or elements_for(ctx)
    orders = tuples(integers(min_order, max_order), integers(min_order, max_order))
    terms = draw(dictionaries(orders, elements, max_size=max_terms))
    tops = (
        max((m for m, _ in terms), default=0),
        max((n for _, n in terms), default=0),
    )
    return Symbol2D(ctx, terms, tops=tops)


@composite
def differential_symbols1d(draw, ctx, max_order=3, max_terms=2):
    """Polynomial symbols in xi with equal-component coefficients"""
    elements = broadcast_elements(ctx.algebra)
    return draw(symbols1d(ctx, 0, max_order, max_terms, elements))


@composite
def differential_symbols2d(draw, ctx, max_order=3, max_terms=2):
    elements = broadcast_elements(ctx.algebra)
    return draw(symbols2d(ctx, 0, max_order, max_terms, elements))


# ============================================================================
# EXPRESSION TREES
# ============================================================================

identifiers = text(alphabet="abcdfghjkw", min_size=1, max_size=3)

leaves = one_of(
    small_fractions(5, 4).filter(lambda f: f >= 0).map(Scalar),
    identifiers.map(Name),
    sampled_from([Xi(0), Xi(1), Xi(2)]),
    builds(
        Basis,
        tuples(integers(-3, 3), integers(-3, 3)),
        one_of(just(None), tuples(integers(1, 2), integers(1, 2))),
    ),
    builds(Basis, tuples(integers(-3, 3)), one_of(just(None), tuples(integers(1, 2)))),
)


def _extend(children):
    return one_of(
        builds(Add, children, children),
        builds(Sub, children, children),
        builds(Mul, children, children),
        builds(Neg, children),
        builds(Pow, children, integers(-3, 3)),
        builds(Commutator, children, children),
        builds(
            Call,
            sampled_from(["res", "res_sigma", "Res"]),
            children,
            one_of(just(None), sampled_from(["11", "22", "W1"])),
        ),
    )


expressions = recursive(leaves, _extend, max_leaves=8)
