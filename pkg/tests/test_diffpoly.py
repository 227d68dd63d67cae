"""Unit tests for the differential-polynomial algebra."""

import json
import math
from fractions import Fraction as F

import pytest

import dunham.diffpoly as dp
from dunham.errors import BranchConsistencyError, ExprParseError, InputShapeError


def mono(coeff, q_half, derivs=None):
    """Single-monomial expression helper for fixtures."""
    d = tuple(sorted((derivs or {}).items()))
    return dp.DiffExpr((dp.Monomial(F(coeff), q_half, d),))


class TestConstructors:
    def test_q_power_half(self):
        e = dp.q_power(1)
        assert len(e.monomials) == 1
        m = e.monomials[0]
        assert m.coeff == 1 and m.q_half == 1 and m.derivs == ()

    def test_q_power_zero_is_one(self):
        assert dp.equals(dp.q_power(0), dp.ONE)

    def test_q_power_negative(self):
        assert dp.q_power(-3).monomials[0].q_half == -3

    def test_zero_monomial_rejected(self):
        with pytest.raises(ValueError):
            dp.Monomial(F(0), 0, ())

    def test_zero_exponent_entry_rejected(self):
        with pytest.raises(ValueError):
            dp.Monomial(F(1), 0, ((1, 0),))


class TestArithmetic:
    def test_additive_inverse(self):
        a = mono(1, -2, {1: 1})
        assert dp.equals(dp.add(a, dp.negate(a)), dp.ZERO)

    def test_rational_merge(self):
        a = mono(F(1, 2), 0, {2: 1})
        b = mono(F(1, 3), 0, {2: 1})
        assert dp.equals(dp.add(a, b), mono(F(5, 6), 0, {2: 1}))

    def test_disjoint_keys_keep_two_monomials(self):
        e = dp.add(dp.q_power(1), mono(1, 0, {1: 1}))
        assert len(e.monomials) == 2

    def test_canonical_order_by_weight_then_qhalf(self):
        # Q'' (weight 2, h=0) sorts after Q' (weight 1) and before nothing odd
        e = dp.add(mono(1, 0, {2: 1}), mono(1, 0, {1: 1}))
        assert e.monomials[0].derivs == ((1, 1),)
        assert e.monomials[1].derivs == ((2, 1),)

    def test_sqrt_squared_is_q(self):
        t0 = dp.negate(dp.q_power(1))
        assert dp.equals(dp.mul(t0, t0), dp.q_power(2))

    def test_mul_adds_exponents(self):
        a = mono(1, -2, {1: 1})
        assert dp.equals(dp.mul(a, a), mono(1, -4, {1: 2}))

    def test_mul_by_zero(self):
        a = mono(3, 1, {2: 2})
        assert dp.equals(dp.mul(a, dp.ZERO), dp.ZERO)

    def test_merged_power_keys_equal(self):
        # canonicalization merges exponents at construction: Q^(-1/2) * Q = Q^(1/2)
        assert dp.equals(dp.mul(dp.q_power(-1), dp.q_power(2)), dp.q_power(1))

    def test_operator_sugar_matches_functions(self):
        a, b = dp.q_power(1), mono(F(1, 4), 0, {1: 1})
        assert dp.equals(a + b, dp.add(a, b))
        assert dp.equals(a - b, dp.add(a, dp.negate(b)))
        assert dp.equals(a * b, dp.mul(a, b))
        assert dp.equals(-a, dp.negate(a))
        assert dp.equals(F(1, 2) * a, dp.scale(a, F(1, 2)))


class TestDifferentiate:
    def test_sqrt_q(self):
        got = dp.differentiate(dp.q_power(1))
        assert dp.equals(got, mono(F(1, 2), -1, {1: 1}))

    def test_product_rule(self):
        e = mono(F(1, 4), -2, {1: 1})  # (1/4) Q' / Q
        want = dp.add(mono(F(1, 4), -2, {2: 1}), mono(F(-1, 4), -4, {1: 2}))
        assert dp.equals(dp.differentiate(e), want)

    def test_constant(self):
        assert dp.equals(dp.differentiate(dp.ONE), dp.ZERO)

    def test_deriv_power(self):
        # d/dx (Q')^3 = 3 (Q')^2 Q''
        got = dp.differentiate(mono(1, 0, {1: 3}))
        assert dp.equals(got, mono(3, 0, {1: 2, 2: 1}))


class TestEvalNumeric:
    def test_integer_power_ignores_branch_sign(self):
        assert dp.eval_numeric(dp.q_power(2), [4.0], sqrt_q=-2.0) == pytest.approx(4.0)

    def test_leading_term_at_q4(self):
        e = dp.negate(dp.q_power(1))
        assert dp.eval_numeric(e, [4.0], sqrt_q=2.0) == pytest.approx(-2.0)

    def test_hand_checked_value(self):
        # -(1/4) Q'/Q at Q=2, Q'=6: -6/8 = -0.75
        e = mono(F(-1, 4), -2, {1: 1})
        got = dp.eval_numeric(e, [2.0, 6.0], sqrt_q=math.sqrt(2.0))
        assert got == pytest.approx(-0.75, abs=1e-15)

    def test_missing_derivative_raises(self):
        e = mono(1, 0, {3: 1})
        with pytest.raises(InputShapeError):
            dp.eval_numeric(e, [1.0, 2.0], sqrt_q=1.0)

    def test_inconsistent_branch_raises(self):
        with pytest.raises(BranchConsistencyError):
            dp.eval_numeric(dp.q_power(1), [4.0], sqrt_q=1.0)

    def test_half_power_without_branch_raises(self):
        with pytest.raises(BranchConsistencyError):
            dp.eval_numeric(dp.q_power(1), [4.0])

    def test_branch_sign_flips_half_powers(self):
        e = dp.q_power(1)
        assert dp.eval_numeric(e, [4.0], sqrt_q=-2.0) == pytest.approx(-2.0)

    def test_array_eval_matches_scalar(self):
        import numpy as np

        e = dp.add(mono(F(5, 32), -5, {1: 2}), mono(F(-1, 8), -3, {2: 1}))
        zs = np.array([1.5 + 0.5j, 2.0 - 1.0j, -0.3 + 2.0j])
        q = zs**2 + 1.0
        q1 = 2.0 * zs
        q2 = np.full_like(zs, 2.0)
        s = np.sqrt(q)
        vec = dp.eval_numeric_array(e, [q, q1, q2], s)
        for i in range(zs.size):
            ref = dp.eval_numeric(e, [q[i], q1[i], q2[i]], s[i])
            assert vec[i] == pytest.approx(ref, rel=1e-13)


class TestRendering:
    def test_plain_examples(self):
        assert dp.to_plain(dp.ZERO) == "0"
        assert dp.to_plain(dp.negate(dp.q_power(1))) == "-Q^(1/2)"
        t1 = mono(F(-1, 4), -2, {1: 1})
        assert dp.to_plain(t1) == "-1/4 * Q' * Q^-1"

    def test_plain_high_order_derivative(self):
        e = mono(2, 0, {4: 2})
        assert dp.to_plain(e) == "2 * Q(4)^2"
        assert dp.equals(dp.parse_plain("2 * Q(4)^2"), e)

    def test_latex_fraction_layout(self):
        t1 = mono(F(-1, 4), -2, {1: 1})
        assert dp.to_latex(t1) == "-\\frac{Q'}{4 Q}"

    def test_roundtrip_bijection(self, series15):
        for t in series15.terms:
            assert dp.equals(dp.parse_plain(dp.to_plain(t)), t)

    def test_parse_error_position(self):
        with pytest.raises(ExprParseError) as err:
            dp.parse_plain("1/4 * W")
        assert err.value.position == 6

    def test_parse_rejects_garbage(self):
        with pytest.raises(ExprParseError):
            dp.parse_plain("Q' Q''")  # missing '*'

    def test_json_roundtrip(self, series15):
        for t in series15.terms:
            doc = json.loads(json.dumps(dp.expr_to_json(t)))
            assert dp.equals(dp.expr_from_json(doc), t)
