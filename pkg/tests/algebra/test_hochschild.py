"""Tests for hochschild: chains, cochains, the cap product and unit homotopies.

The reduced complex of the dual numbers is small enough to compute by
hand: in degree n it is spanned by 1 (x) x^n and x (x) x^n, and
b(1 (x) x^n) = (1 + (-1)^n) x (x) x^(n-1).
"""
from dataclasses import replace

import pytest

from algebra import builtin
from chain_complex import class_order, homology
from errors import ShapeError
from hochschild import (CochainComplexSpec, HochschildComplexSpec, build_a_r, build_b_r, build_cochain,
                        build_cohochschild, build_hochschild, cap, cap_identity_difference, chain_degree,
                        cochain_differential, hochschild_boundary, homology_table, quotient_is_chain_map,
                        verify_cap_identity, verify_unit_homotopies)


@pytest.fixture
def dual():
    """Z[x]/(x^2) in degree 0."""
    return builtin('dual')


# ============================================================================
# Test Group 1: The Hochschild complex
# ============================================================================

class TestHochschildComplex:
    """Assembly and homology of truncated Hochschild complexes."""

    def test_spec_bounds(self, dual):
        """n_max must be positive."""
        with pytest.raises(ShapeError):
            HochschildComplexSpec(dual, n_max=0)

    def test_chain_degree(self):
        """Degree is length - 1 plus the internal degree."""
        assert chain_degree(builtin('sphere2'), (0, 1)) == -1

    def test_boundary_of_unit_word(self, dual):
        """b(1 (x) x (x) x) is twice x (x) x up to the global sign."""
        boundary = hochschild_boundary(dual, {(0, 1, 1): 1})
        assert {word: abs(c) for word, c in boundary.items()} == {(1, 1): 2}

    def test_boundary_vanishes_in_odd_degree(self, dual):
        """b(1 (x) x) = 0 since the algebra is commutative."""
        assert hochschild_boundary(dual, {(0, 1): 1}) == {}

    def test_reduced_dual_numbers(self, dual):
        """HH_0 = Z^2, odd degrees Z + Z/2, even positive degrees Z."""
        c = build_hochschild(HochschildComplexSpec(dual, n_max=7, reduced=True))
        assert homology_table(c, range(5)) == {0: 'Z^2', 1: 'Z + Z/2', 2: 'Z', 3: 'Z + Z/2', 4: 'Z'}

    def test_rational_table(self, dual):
        """Over Q the torsion disappears."""
        c = build_hochschild(HochschildComplexSpec(dual, n_max=5, reduced=True))
        assert homology_table(c, [1], 'Q') == {1: 'Z'}

    def test_torsion_class(self, dual):
        """x (x) x has order 2."""
        c = build_hochschild(HochschildComplexSpec(dual, n_max=4, reduced=True))
        assert class_order(c, 1, {(1, 1): 1}) == 2
        assert class_order(c, 1, {(0, 1): 1}) == 0

    @pytest.mark.parametrize('name, lowest, highest', [('dual', 0, 4), ('sphere2', -6, 4), ('sphere3', -11, 4)])
    def test_unreduced_complex_assembles(self, name, lowest, highest):
        """Assembly checks d^2 = 0; degrees span x (x) ... (x) x up to 1 (x) ... (x) 1."""
        degrees = build_hochschild(HochschildComplexSpec(builtin(name), n_max=5)).degrees()
        assert degrees[0] == lowest
        assert degrees[-1] == highest

    def test_sphere_degrees_skip_gaps(self):
        """Words of length at most 5 over an odd class of degree -3 never reach -10."""
        degrees = build_hochschild(HochschildComplexSpec(builtin('sphere3'), n_max=5)).degrees()
        assert -10 not in degrees
        assert len(degrees) == 15

    def test_odd_boundary_is_integral(self):
        """Signs from negative degrees stay integers."""
        boundary = hochschild_boundary(builtin('sphere3'), {(0, 1, 0): 1})
        assert boundary
        assert all(type(c) is int for c in boundary.values())  # pylint: disable=unidiomatic-typecheck

    def test_reduction_is_a_chain_map(self, dual):
        """Projecting onto the reduced complex commutes with the boundaries."""
        assert quotient_is_chain_map(dual, 4).passed

    def test_partial_reduction(self, dual):
        """Quotienting by units in positions 2..r only keeps more words than full reduction."""
        partial = build_hochschild(HochschildComplexSpec(dual, n_max=4, reduce_up_to=2))
        full = build_hochschild(HochschildComplexSpec(dual, n_max=4, reduced=True))
        assert partial.dimension(3) > full.dimension(3)

    def test_spectator_factors(self, dual):
        """Spectator factors keep d^2 = 0."""
        c = build_hochschild(HochschildComplexSpec(dual, n_max=3, extra_tensor_factors=1))
        assert c.degrees() == [0, 1, 2]


# ============================================================================
# Test Group 2: Cochains and the cap product
# ============================================================================

class TestCochains:
    """Hochschild cochains and the cap product."""

    def test_zero_cochains_are_cocycles(self, dual):
        """0-cochains of a commutative algebra are central."""
        assert cochain_differential(dual, ((), 1)) == {}

    def test_cochain_homology_in_degree_zero(self, dual):
        """HH^0 of a commutative algebra is the algebra."""
        c = build_cochain(CochainComplexSpec(dual, q_max=2))
        assert homology(c, 0).betti == 2

    def test_negative_arity_rejected(self, dual):
        """q_max must be nonnegative."""
        with pytest.raises(ShapeError):
            CochainComplexSpec(dual, q_max=-1)

    def test_cap_with_zero_cochain(self, dual):
        """Capping with a 0-cochain multiplies the first letter."""
        assert cap(dual, {(0, 1): 1}, {((), 1): 1}) == {(1, 1): 1}

    def test_cap_below_arity_vanishes(self, dual):
        """a ∩ D = 0 when a is shorter than the arity of D."""
        assert cap(dual, {(0,): 1}, {((1,), 0): 1}) == {}

    @pytest.mark.parametrize('name', ['dual', 'sphere2', 'sphere3'])
    def test_cap_identity(self, name):
        """a ∩ dD = (-1)^|a| (d(a ∩ D) - (da) ∩ D)."""
        assert verify_cap_identity(builtin(name), p_max=3, q_max=2).passed

    def test_printed_cap_sign_on_odd_classes(self):
        """The printed sign differs from ours on 1 (x) x capped with x -> 1."""
        sphere = builtin('sphere3')
        assert cap(sphere, {(0, 1): 1}, {((1,), 0): 1}) == {(0,): -1}
        assert cap(sphere, {(0, 1): 1}, {((1,), 0): 1}, printed=True) == {(0,): 1}

    def test_printed_cap_sign_breaks_identity(self):
        """With the printed sign the identity fails at a = 1 (x) x (x) 1 (x) 1, D = (x (x) 1 -> 1)."""
        sphere = builtin('sphere3')
        assert cap_identity_difference(sphere, (0, 1, 0, 0), ((1, 0), 0)) == {}
        assert cap_identity_difference(sphere, (0, 1, 0, 0), ((1, 0), 0), printed=True)

    def test_printed_failures_reported(self):
        """Odd classes produce printed-sign failures; even algebras none."""
        odd = verify_cap_identity(builtin('sphere3'), p_max=3, q_max=2)
        assert odd.passed
        assert odd.details['printed_sign_failures'] > 0
        even = verify_cap_identity(builtin('dual'), p_max=3, q_max=2)
        assert even.details['printed_sign_failures'] == 0
        assert even.details['printed_sign_witness'] is None


# ============================================================================
# Test Group 3: Unit homotopies and the coHochschild complex
# ============================================================================

class TestUnitHomotopies:
    """A_r, B^r and their contracting homotopies."""

    @pytest.mark.parametrize('r', [2, 3])
    def test_homotopies(self, dual, r):
        """sd + ds = id on A_r and B^r."""
        report = verify_unit_homotopies(dual, r, 5)
        assert report.passed
        assert 'printed_sign_failing_lengths' in report.details

    def test_complexes_assemble(self, dual):
        """A_r and B^r have d^2 = 0."""
        assert build_a_r(dual, 2, 5).degrees() == [1, 2, 3, 4]
        assert build_b_r(dual, 2, 5).degrees() == [-4, -3, -2, -1]

    def test_needs_unit_basis_element(self, dual):
        """The homotopies need the unit as a basis element."""
        spec = replace(dual, unit=(1, 1))
        assert spec.unit_index is None
        with pytest.raises(ShapeError):
            verify_unit_homotopies(spec, 2, 4)

    def test_cohochschild_assembles(self, dual):
        """The coHochschild complex has d^2 = 0."""
        assert build_cohochschild(dual, 4).degrees() == [-3, -2, -1, 0]
