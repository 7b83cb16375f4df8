"""
Unit tests for exactnum.py - rational parsing, rendering and series constants
"""

import pytest
from fractions import Fraction
import sys
import os

# Add src to path for imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../../src')))
from exactnum import to_rat, parse_rat, format_rat, format_decimal, bernoulli, coth_series_coeff
from errors import RationalFormatError, InputError


class TestParseRat:
    """Test parse_rat / to_rat"""

    def test_parse_fraction(self):
        """Test 'p/q' literal"""
        assert parse_rat("3/4") == Fraction(3, 4)

    def test_parse_reduces_to_lowest_terms(self):
        """Test normalisation on construction"""
        assert parse_rat("-6/8") == Fraction(-3, 4)

    def test_parse_integer_with_whitespace(self):
        """Test plain integer with surrounding whitespace"""
        assert parse_rat("  -7 ") == Fraction(-7)

    @pytest.mark.edge_case
    @pytest.mark.parametrize("text", ["", "1.5", "1e3", "2E1", "1/0", "abc", "1//2"])
    def test_parse_invalid_literals(self, text):
        """Test floats, exponents and garbage are rejected"""
        with pytest.raises(RationalFormatError):
            parse_rat(text)

    def test_parse_error_is_input_error(self):
        """Test bad literals map to the exit-1 family"""
        with pytest.raises(InputError):
            parse_rat("0.5")

    def test_to_rat_accepts_int_fraction_and_string(self):
        """Test accepted types"""
        assert to_rat(2) == Fraction(2)
        assert to_rat(Fraction(1, 3)) == Fraction(1, 3)
        assert to_rat("5/10") == Fraction(1, 2)

    @pytest.mark.edge_case
    def test_to_rat_rejects_float_and_bool(self):
        """Test floats and bools are not silently converted"""
        with pytest.raises(RationalFormatError):
            to_rat(0.5)
        with pytest.raises(RationalFormatError):
            to_rat(True)


class TestFormatting:
    """Test canonical rendering and decimal approximation"""

    def test_format_rat_integer(self):
        """Test denominator 1 renders without a slash"""
        assert format_rat(Fraction(4, 2)) == "2"

    def test_format_rat_negative_fraction(self):
        """Test sign goes on the numerator"""
        assert format_rat(Fraction(2, -3)) == "-2/3"

    def test_format_decimal_basic(self):
        """Test simple rounding"""
        assert format_decimal(Fraction(1, 3), 3) == "0.333"
        assert format_decimal(Fraction(2, 3), 2) == "0.67"

    @pytest.mark.edge_case
    def test_format_decimal_half_even(self):
        """Test ties round to the even digit"""
        assert format_decimal(Fraction(1, 8), 2) == "0.12"
        assert format_decimal(Fraction(3, 8), 2) == "0.38"
        assert format_decimal(Fraction(-1, 8), 2) == "-0.12"
        assert format_decimal(Fraction(5, 2), 0) == "2"

    def test_format_decimal_pads_zeros(self):
        """Test leading zeros in the fractional part"""
        assert format_decimal(Fraction(1, 100), 3) == "0.010"
        assert format_decimal(Fraction(-7, 2), 1) == "-3.5"

    def test_format_decimal_negative_digits(self):
        """Test negative digit count is rejected"""
        with pytest.raises(RationalFormatError):
            format_decimal(Fraction(1), -1)


class TestSeriesConstants:
    """Test Bernoulli numbers and x/tanh(x) coefficients"""

    @pytest.mark.parametrize("n,expected", [
        (0, Fraction(1)), (1, Fraction(-1, 2)), (2, Fraction(1, 6)), (3, Fraction(0)),
        (4, Fraction(-1, 30)), (6, Fraction(1, 42)), (8, Fraction(-1, 30)), (10, Fraction(5, 66)),
    ])
    def test_bernoulli_values(self, n, expected):
        """Test known Bernoulli numbers"""
        assert bernoulli(n) == expected

    def test_bernoulli_odd_vanish(self):
        """Test B_n = 0 for odd n > 1"""
        assert all(bernoulli(n) == 0 for n in range(3, 20, 2))

    def test_bernoulli_negative_index(self):
        """Test negative index"""
        with pytest.raises(ValueError):
            bernoulli(-1)

    def test_coth_coefficients(self):
        """Test x/tanh x = 1 + x^2/3 - x^4/45 + 2x^6/945 - ..."""
        assert coth_series_coeff(0) == 1
        assert coth_series_coeff(1) == Fraction(1, 3)
        assert coth_series_coeff(2) == Fraction(-1, 45)
        assert coth_series_coeff(3) == Fraction(2, 945)
