"""Property-based tests: ring axioms, Leibniz, numeric consistency."""

import math
from fractions import Fraction as F
from functools import reduce

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

import dunham.diffpoly as dp

coeffs = st.fractions(min_value=F(-8), max_value=F(8), max_denominator=8).filter(bool)
deriv_maps = st.dictionaries(st.integers(1, 4), st.integers(1, 2), max_size=3)


@st.composite
def monomials(draw):
    return dp.Monomial(
        draw(coeffs),
        draw(st.integers(-6, 6)),
        tuple(sorted(draw(deriv_maps).items())),
    )


@st.composite
def exprs(draw):
    monos = draw(st.lists(monomials(), max_size=4))
    return reduce(dp.add, (dp.DiffExpr((m,)) for m in monos), dp.ZERO)


@given(exprs())
def test_canonical_idempotent(a):
    rebuilt = reduce(dp.add, (dp.DiffExpr((m,)) for m in reversed(a.monomials)), dp.ZERO)
    assert dp.equals(rebuilt, a)


@given(exprs())
def test_plain_roundtrip(a):
    assert dp.equals(dp.parse_plain(dp.to_plain(a)), a)


@given(exprs(), exprs())
def test_add_commutes(a, b):
    assert dp.equals(dp.add(a, b), dp.add(b, a))


@given(exprs(), exprs(), exprs())
def test_add_associates(a, b, c):
    assert dp.equals(dp.add(dp.add(a, b), c), dp.add(a, dp.add(b, c)))


@given(exprs(), exprs())
def test_mul_commutes(a, b):
    assert dp.equals(dp.mul(a, b), dp.mul(b, a))


@given(exprs(), exprs(), exprs())
@settings(deadline=None)
def test_mul_associates(a, b, c):
    assert dp.equals(dp.mul(dp.mul(a, b), c), dp.mul(a, dp.mul(b, c)))


@given(exprs(), exprs(), exprs())
def test_mul_distributes(a, b, c):
    lhs = dp.mul(a, dp.add(b, c))
    rhs = dp.add(dp.mul(a, b), dp.mul(a, c))
    assert dp.equals(lhs, rhs)


@given(exprs(), exprs())
@settings(deadline=None)
def test_leibniz(a, b):
    lhs = dp.differentiate(dp.mul(a, b))
    rhs = dp.add(dp.mul(dp.differentiate(a), b), dp.mul(a, dp.differentiate(b)))
    assert dp.equals(lhs, rhs)


complex_vals = st.complex_numbers(
    min_magnitude=0.5, max_magnitude=2.0, allow_nan=False, allow_infinity=False
)


@given(exprs(), exprs(), complex_vals, st.lists(complex_vals, min_size=4, max_size=4),
       st.booleans())
def test_eval_is_homomorphic(a, b, q0, dvals, flip):
    q_derivs = [q0] + dvals
    sqrt_q = -np.sqrt(q0) if flip else np.sqrt(q0)
    ea = dp.eval_numeric(a, q_derivs, sqrt_q)
    eb = dp.eval_numeric(b, q_derivs, sqrt_q)
    esum = dp.eval_numeric(dp.add(a, b), q_derivs, sqrt_q)
    eprod = dp.eval_numeric(dp.mul(a, b), q_derivs, sqrt_q)
    assert abs(esum - (ea + eb)) <= 1e-12 * (1.0 + abs(ea) + abs(eb))
    assert abs(eprod - ea * eb) <= 1e-12 * (1.0 + abs(ea)) * (1.0 + abs(eb))


# Derivative consistency along a path where Q comes from a fixed polynomial
# Q(x) = x^2 + 2 (positive on the sample window, principal branch applies).

small_deriv_maps = st.dictionaries(st.integers(1, 3), st.integers(1, 2), max_size=2)


@st.composite
def tame_exprs(draw):
    monos = [
        dp.Monomial(
            draw(coeffs),
            draw(st.integers(-4, 4)),
            tuple(sorted(draw(small_deriv_maps).items())),
        )
        for _ in range(draw(st.integers(0, 3)))
    ]
    return reduce(dp.add, (dp.DiffExpr((m,)) for m in monos), dp.ZERO)


def _q_path(x: float) -> list[float]:
    # one spare order beyond the strategy's max, since d/dx bumps it by one
    return [x * x + 2.0, 2.0 * x, 2.0, 0.0, 0.0]


@given(tame_exprs(), st.floats(0.5, 1.5))
@settings(deadline=None)
def test_derivative_matches_finite_difference(a, x):
    h = 1e-5
    exact = dp.eval_numeric(dp.differentiate(a), _q_path(x), math.sqrt(x * x + 2.0))

    def val(xx):
        return dp.eval_numeric(a, _q_path(xx), math.sqrt(xx * xx + 2.0))

    fd = (val(x + h) - val(x - h)) / (2.0 * h)
    assert abs(fd - exact) <= 1e-6 * (1.0 + abs(exact))
