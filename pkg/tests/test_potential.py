"""Potential construction, text parsing, and evaluation."""

from fractions import Fraction as F

import numpy as np
import pytest

from dunham.errors import PotentialParseError
from dunham.potential import Potential, parse_potential


class TestParsing:
    def test_simple_powers(self):
        assert parse_potential("x^2").coefficients == (F(0), F(0), F(1))
        assert parse_potential("x^4").coefficients == (F(0),) * 4 + (F(1),)

    def test_decimals_are_exact_fractions(self):
        V = parse_potential("0.5*x^2 + 0.1*x^4")
        assert V.coefficients[2] == F(1, 2)
        assert V.coefficients[4] == F(1, 10)

    def test_rational_literals(self):
        V = parse_potential("3/2*x^6")
        assert V.coefficients[6] == F(3, 2)

    def test_signs_and_constants(self):
        V = parse_potential("x^4 - 2*x^2 + 1")
        assert V.coefficients == (F(1), F(0), F(-2), F(0), F(1))

    def test_repeated_powers_merge(self):
        V = parse_potential("x^2 + x^2")
        assert V.coefficients[2] == F(2)

    def test_unknown_function_names_token(self):
        with pytest.raises(PotentialParseError) as err:
            parse_potential("sin(x)")
        assert err.value.token == "sin"
        assert err.value.position == 0

    def test_error_position_mid_string(self):
        with pytest.raises(PotentialParseError) as err:
            parse_potential("x^2 + cos(x)")
        assert err.value.token == "cos"
        assert err.value.position == 6

    def test_missing_operator_rejected(self):
        with pytest.raises(PotentialParseError):
            parse_potential("x^2 x^4")

    def test_empty_rejected(self):
        with pytest.raises(PotentialParseError):
            parse_potential("   ")


class TestInvariants:
    def test_degree_below_two_rejected(self):
        with pytest.raises(ValueError):
            parse_potential("x + 1")

    def test_nonconfining_rejected(self):
        with pytest.raises(ValueError):
            parse_potential("-x^2")

    def test_trailing_zeros_stripped(self):
        V = Potential((F(0), F(0), F(1), F(0)))
        assert V.degree == 2

    def test_float_coefficients_rejected(self):
        with pytest.raises(TypeError):
            Potential.from_coeffs([0, 0, 0.1])


class TestEvaluation:
    def test_matches_polyval(self):
        V = parse_potential("x^4 - 2*x^2 + 3")
        z = np.array([0.3 + 0.1j, -1.2 + 0.5j, 2.0 + 0.0j])
        ref = np.polyval([1.0, 0.0, -2.0, 0.0, 3.0], z)
        assert np.allclose(V(z), ref, rtol=1e-14)

    def test_exact_derivative_coefficients(self):
        V = parse_potential("x^4")
        assert V.deriv_coefficients(1) == (F(0), F(0), F(0), F(4))
        assert V.deriv_coefficients(3) == (F(0), F(24))
        assert V.deriv_coefficients(4) == (F(24),)
        assert V.deriv_coefficients(5) == (F(0),)

    def test_derivs_stack(self):
        V = parse_potential("x^2 + x^4")
        z = 1.0 + 1.0j
        vals = V.derivs(z, 5)
        assert vals[0] == pytest.approx(z**2 + z**4)
        assert vals[1] == pytest.approx(2 * z + 4 * z**3)
        assert vals[4] == pytest.approx(24.0)
        assert vals[5] == 0.0

    def test_real_minimum_shifted_well(self):
        V = parse_potential("x^2 - 2*x + 5")  # (x-1)^2 + 4
        xm, vm = V.real_minimum()
        assert xm == pytest.approx(1.0, abs=1e-12)
        assert vm == pytest.approx(4.0, abs=1e-12)

    def test_str_render(self):
        assert str(parse_potential("0.5*x^2 + 0.1*x^4")) == "1/10*x^4 + 1/2*x^2"
