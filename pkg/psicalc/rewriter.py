#!/usr/bin/env python3
"""
Single-Step Rewriter for psicalc
Brute-force products that only ever move one xi_i^(+1 or -1) across one
coefficient, using nothing but

    xi_i b    = sigma(b) xi_i + delta_i(b)
    xi_i^-1 b = sigma^-1(b) xi_i^-1 - xi_i^-1 delta_i(sigma^-1(b)) xi_i^-1

and the commutation of the xi's among themselves. Slow on purpose: it is
the independent oracle the closed product formulas are tested against.
"""

from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from .core import AlgebraContext, UncertifiedError
from .logging_utils import get_logger
from .symbols1d import Symbol1D, accumulate, join_floors, product_floor
from .symbols2d import Symbol2D, normalize_floors

log = get_logger(__name__)

Element = Any
Orders = Tuple[int, ...]
Letter = Tuple[int, int]  # (axis, +1 or -1)


def _letters(orders: Sequence[int]) -> List[Letter]:
    word: List[Letter] = []
    for axis, power in enumerate(orders):
        step = 1 if power > 0 else -1
        word.extend((axis, step) for _ in range(abs(power)))
    return word


def _reachable_top(prefix: Sequence[Letter], suffix: Sequence[int], axis: int) -> int:
    """Highest order on ``axis`` any descendant of this state can still reach"""
    return suffix[axis] + sum(step for a, step in prefix if a == axis)


def rewrite_monomial_product(
    ctx: AlgebraContext,
    a: Element,
    a_orders: Sequence[int],
    b: Element,
    b_orders: Sequence[int],
    floors: Sequence[Optional[int]],
) -> Dict[Orders, Element]:
    """
    Terms of (a xi^a_orders)(b xi^b_orders) at orders >= floors, one
    relation application at a time.
    """
    dimension = ctx.dimension
    results: Dict[Orders, Element] = {}
    stack: List[Tuple[Tuple[Letter, ...], Element, Tuple[int, ...]]] = [
        (tuple(_letters(a_orders)), b, tuple(b_orders))
    ]
    steps = 0
    while stack:
        prefix, coeff, suffix = stack.pop()
        if coeff.is_zero():
            continue
        if any(
            floors[axis] is not None and _reachable_top(prefix, suffix, axis) < floors[axis]
            for axis in range(dimension)
        ):
            continue
        if not prefix:
            accumulate(results, suffix, a * coeff)
            continue

        steps += 1
        (axis, step), rest = prefix[-1], prefix[:-1]
        delta = ctx.deltas[axis]
        moved = list(suffix)
        moved[axis] += step
        moved = tuple(moved)
        if step > 0:
            stack.append((rest, ctx.sigma(coeff), moved))
            stack.append((rest, delta(coeff), suffix))
        else:
            lowered = ctx.sigma_inv(coeff)
            stack.append((rest, lowered, moved))
            # the xi^-1 stays in front of the new coefficient
            stack.append((prefix, -delta(lowered), moved))

    log.debug("rewrite_finished", context=ctx.kind, steps=steps, terms=len(results))
    return {k: c for k, c in results.items() if not c.is_zero()}


def oracle_mul(
    d1: Union[Symbol1D, Symbol2D],
    d2: Union[Symbol1D, Symbol2D],
    floors: Union[None, int, Sequence[Optional[int]]] = None,
) -> Union[Symbol1D, Symbol2D]:
    """Product of two symbols by the rewriter, certified like mul / mul2"""
    d1.ctx.require_same(d2.ctx)
    ctx = d1.ctx
    if isinstance(d1, Symbol1D):
        floor = join_floors(
            product_floor(d1.floor, d1.top, d2.floor, d2.top), normalize_floors(floors)[0]
        )
        if floor is None and d1.has_negative_orders:
            raise UncertifiedError("the rewriter needs a floor for an infinite expansion")
        if floor is not None:
            floor = min(floor, d1.top + d2.top)
        acc: Dict[Orders, Element] = {}
        for n, a in d1.terms:
            for p, b in d2.terms:
                for order, c in rewrite_monomial_product(ctx, a, (n,), b, (p,), (floor,)).items():
                    accumulate(acc, order, c)
        return Symbol1D(ctx, {k[0]: c for k, c in acc.items()}, top=d1.top + d2.top, floor=floor)

    requested2 = normalize_floors(floors)
    tops = (d1.tops[0] + d2.tops[0], d1.tops[1] + d2.tops[1])
    result_floors = []
    for axis in range(2):
        floor = join_floors(
            product_floor(d1.floors[axis], d1.tops[axis], d2.floors[axis], d2.tops[axis]),
            requested2[axis],
        )
        if floor is None and d1.negative_on_axis(axis):
            raise UncertifiedError("the rewriter needs a floor for an infinite expansion")
        result_floors.append(None if floor is None else min(floor, tops[axis]))
    acc2: Dict[Orders, Element] = {}
    for (m, n), a in d1.terms:
        for (p, q), b in d2.terms:
            for order, c in rewrite_monomial_product(ctx, a, (m, n), b, (p, q), result_floors).items():
                accumulate(acc2, order, c)
    return Symbol2D(ctx, acc2, tops=tops, floors=tuple(result_floors))
