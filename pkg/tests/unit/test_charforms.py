"""
Unit tests for charforms.py - invariant polynomial catalog and validation
"""

import pytest
from fractions import Fraction
import sys
import os

# Add src to path for imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../../src')))
from charforms import (pfaffian_poly, pontryagin_poly, l_genus_poly, parse_invariant, catalog, partitions,
                       resolve_psi, INVARIANT_FORM_REGISTRY)
from polyring import TruncatedPoly
from errors import (HomogeneityError, SymmetryError, SignFlipError, InvalidPartitionError,
                    UnsupportedDimensionError, InputError, InvariantViolationError)


class TestCatalog:
    """Test the built-in invariant forms"""

    def test_pfaffian(self):
        """Test psi-hat of the Euler form is a1 a2 a3"""
        assert pfaffian_poly(3).psi_hat.terms == {(1, 1, 1): Fraction(1)}

    def test_l_genus_dimension_four(self):
        """Test L_1 = p1/3"""
        assert l_genus_poly(2).psi_hat.terms == {(2, 0): Fraction(1, 3), (0, 2): Fraction(1, 3)}

    @pytest.mark.domain
    def test_l_genus_dimension_eight(self):
        """Test L_2 = (7 p2 - p1^2)/45 in Chern roots"""
        psi = l_genus_poly(4).psi_hat
        assert psi.coefficient((4, 0, 0, 0)) == Fraction(-1, 45)
        assert psi.coefficient((2, 2, 0, 0)) == Fraction(1, 9)
        assert psi.coefficient((2, 0, 2, 0)) == Fraction(1, 9)
        assert len(psi.terms) == 4 + 6

    def test_l_genus_needs_even_m(self):
        """Test dim M not divisible by 4"""
        with pytest.raises(UnsupportedDimensionError):
            l_genus_poly(3)

    def test_pontryagin_partition(self):
        """Test p_1^2 in m = 4 and its label"""
        psi = pontryagin_poly((1, 1), 4)
        assert psi.label == "p_1_1"
        assert psi.psi_hat.coefficient((4, 0, 0, 0)) == 1
        assert psi.psi_hat.coefficient((2, 2, 0, 0)) == 2

    @pytest.mark.edge_case
    @pytest.mark.parametrize("partition,m", [((1,), 4), ((2,), 2), ((), 2), ((0, 1), 2), ((-1, 2), 2)])
    def test_pontryagin_invalid_partition(self, partition, m):
        """Test partitions that do not match m/2"""
        with pytest.raises(InvalidPartitionError):
            pontryagin_poly(partition, m)

    def test_partitions(self):
        """Test integer partitions in non-increasing order"""
        assert list(partitions(3)) == [(3,), (2, 1), (1, 1, 1)]
        assert list(partitions(0)) == [()]

    def test_catalog_contents(self):
        """Test which forms exist per dimension"""
        assert [f.label for f in catalog(3)] == ["euler"]
        assert [f.label for f in catalog(4)] == ["euler", "L", "p_2", "p_1_1"]

    def test_registry(self):
        """Test named forms are registered"""
        assert set(INVARIANT_FORM_REGISTRY) >= {"euler", "L"}


class TestParseInvariant:
    """Test validation of user-supplied psi-hat expressions"""

    @pytest.mark.parametrize("m", [2, 3, 4, 5, 6])
    def test_catalog_round_trip(self, m):
        """Test parse(render(psi)) reproduces every catalog form"""
        for form in catalog(m):
            assert parse_invariant(form.render(), m).psi_hat == form.psi_hat

    def test_symmetry_violation(self):
        """Test a1^2 alone in m = 2"""
        with pytest.raises(SymmetryError) as exc_info:
            parse_invariant("a1^2", 2)
        assert exc_info.value.witness == ("a1^2", "a2^2")

    def test_homogeneity_violation(self):
        """Test a lower-degree term is reported, not dropped"""
        with pytest.raises(HomogeneityError):
            parse_invariant("a1*a2 + a1 + a2", 2)

    def test_higher_degree_term_reported(self):
        """Test terms above degree m are not silently truncated"""
        with pytest.raises(HomogeneityError):
            parse_invariant("a1*a2 + a1^2*a2^2", 2)

    def test_sign_flip_violation(self):
        """Test e1 e2 in m = 3 is symmetric but not flip-invariant"""
        with pytest.raises(SignFlipError):
            parse_invariant("e[1]*e[2]", 3)

    def test_violations_are_input_errors(self):
        """Test the exit-1 family"""
        with pytest.raises(InvariantViolationError):
            parse_invariant("a1^2", 2)
        with pytest.raises(InputError):
            parse_invariant("a1^2", 2)

    def test_valid_expression(self):
        """Test p[1]^2 - 2*p[2] is accepted in m = 4"""
        psi = parse_invariant("p[1]^2 - 2*p[2]", 4, label="sum_a4")
        assert psi.label == "sum_a4"
        assert psi.psi_hat.cutoff == 4

    def test_pfaffian_macro(self):
        """Test E equals the Pfaffian"""
        assert parse_invariant("E", 4).psi_hat == pfaffian_poly(4).psi_hat


class TestResolvePsi:
    """Test CLI psi selectors"""

    def test_named_forms(self):
        """Test euler and L"""
        assert resolve_psi("euler", 2).psi_hat == pfaffian_poly(2).psi_hat
        assert resolve_psi("L", 2).label == "L"

    def test_partition_selector(self):
        """Test p:1,1"""
        assert resolve_psi("p:1,1", 4).label == "p_1_1"

    def test_expression_selector(self):
        """Test expr:<text>"""
        assert resolve_psi("expr:p[1]", 2).psi_hat == pontryagin_poly((1,), 2).psi_hat

    @pytest.mark.edge_case
    def test_unknown_selector(self):
        """Test unknown names and malformed partitions"""
        with pytest.raises(InputError):
            resolve_psi("chern", 2)
        with pytest.raises(InvalidPartitionError):
            resolve_psi("p:x", 2)
