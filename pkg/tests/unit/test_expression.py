"""
Unit tests for expression.py - psi-hat expression parser
"""

import pytest
from fractions import Fraction
import sys
import os

# Add src to path for imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../../src')))
from expression import parse_polynomial, tokenize
from polyring import TruncatedPoly, elementary_symmetric
from errors import ExpressionSyntaxError, InputError


def var(j, m, cutoff):
    return TruncatedPoly.variable(j, m, cutoff)


class TestTokenize:
    """Test the tokenizer"""

    def test_token_positions(self):
        """Test token kinds and offsets"""
        tokens = tokenize("a1 + p[2]")
        assert [(t.kind, t.value, t.pos) for t in tokens] == [
            ('name', 'a1', 0), ('op', '+', 3), ('name', 'p', 5), ('punct', '[', 6), ('num', 2, 7), ('punct', ']', 8),
        ]

    @pytest.mark.edge_case
    def test_unexpected_character(self):
        """Test position of an unknown character"""
        with pytest.raises(ExpressionSyntaxError) as exc_info:
            tokenize("a1 $ a2")
        assert exc_info.value.position == 3


class TestParsePolynomial:
    """Test parse_polynomial semantics"""

    def test_simple_sum(self):
        """Test a1^2 + 2*a2"""
        p = parse_polynomial("a1^2 + 2*a2", 2)
        assert p.terms == {(2, 0): Fraction(1), (0, 1): Fraction(2)}

    def test_unary_minus_binds_looser_than_power(self):
        """Test -a1^2 == -(a1^2)"""
        assert parse_polynomial("-a1^2", 1).terms == {(2,): Fraction(-1)}

    def test_power_is_right_associative(self):
        """Test 2^3^2 = 2^9"""
        assert parse_polynomial("2^3^2", 1).constant_term() == 512

    def test_division_by_constant(self):
        """Test (a1 + a2)/2 and 1/2*a1"""
        p = parse_polynomial("(a1 + a2)/2", 2)
        assert p.terms == {(1, 0): Fraction(1, 2), (0, 1): Fraction(1, 2)}
        assert parse_polynomial("1/2*a1", 1).terms == {(1,): Fraction(1, 2)}

    def test_macros(self):
        """Test E, p[k] and e[k] macros"""
        m = 3
        assert parse_polynomial("E", m) == elementary_symmetric(3, range(3), 3, 3)
        assert parse_polynomial("p[1]", m) == elementary_symmetric(1, range(3), 3, 2, power=2)
        assert parse_polynomial("e[2]", m) == elementary_symmetric(2, range(3), 3, 2)

    def test_esym_of_arguments(self):
        """Test e[2](a1^2, a2^2, a3^2) == p[2]"""
        assert parse_polynomial("e[2](a1^2, a2^2, a3^2)", 3) == parse_polynomial("p[2]", 3)

    def test_newton_identity(self):
        """Test p[1]^2 - 2*p[2] = sum a_j^4"""
        p = parse_polynomial("p[1]^2 - 2*p[2]", 4)
        expected = sum((var(j, 4, 4) ** 4 for j in range(1, 4)), var(0, 4, 4) ** 4)
        assert p == expected

    def test_no_truncation_loss(self):
        """Test the default cutoff keeps every term"""
        p = parse_polynomial("a1^5 + a1", 1)
        assert p.cutoff == 5
        assert p.coefficient((5,)) == 1

    def test_cancellation(self):
        """Test a1^2 - a1^2 + a1 = a1"""
        assert parse_polynomial("a1^2 - a1^2 + a1", 1).terms == {(1,): Fraction(1)}


class TestParseErrors:
    """Test syntax errors carry positions"""

    def test_dangling_operator_position(self):
        """Test 'a1 + * a2' points at the '*'"""
        with pytest.raises(ExpressionSyntaxError) as exc_info:
            parse_polynomial("a1 + * a2", 2)
        assert exc_info.value.position == 5

    @pytest.mark.edge_case
    @pytest.mark.parametrize("text", [
        "", "   ", "a3", "a0", "(a1 + a2", "a1^a2", "a1^-1", "a1/0", "a1/a2", "p[x]", "e[4]", "q1", "a1 a2",
    ])
    def test_invalid_expressions(self, text):
        """Test malformed expressions for m = 2 or 3"""
        with pytest.raises(ExpressionSyntaxError):
            parse_polynomial(text, 2)

    def test_syntax_error_is_input_error(self):
        """Test the exit-1 family"""
        with pytest.raises(InputError):
            parse_polynomial("a1 +", 2)

    def test_non_ascii(self):
        """Test non-ASCII input"""
        with pytest.raises(ExpressionSyntaxError):
            parse_polynomial("a1 − a2", 2)
