"""Tests for graph_core: orientations, canonical forms, blow-ups and surfaces.

Permutation signs are checked against sympy's Permutation.
"""
import random

import pytest
from sympy.combinatorics import Permutation

from errors import GraphStructureError
from graph_core import (BWGraph, Orientation, OrientedBWGraph, WHITE, boundary_cycles, canonical_form,
                        collapse, corolla_graph, degree, differential, from_json, graph_from_code, l_graph,
                        permutation_sign, random_bw_graph, relabel, reorder_sign, surface_type, to_dot,
                        to_json, vertex_blowups)


def shuffled_relabel(og, rng):
    """Rename vertices and half-edges by random bijections onto fresh ids."""
    vertices = og.graph.vertices
    halves = og.graph.half_edges
    new_vertices = list(range(100, 100 + len(vertices)))
    new_halves = list(range(200, 200 + len(halves)))
    rng.shuffle(new_vertices)
    rng.shuffle(new_halves)
    return relabel(og, dict(zip(vertices, new_vertices)), dict(zip(halves, new_halves)))


# ============================================================================
# Test Group 1: Permutation signs and orientations
# ============================================================================

class TestSigns:
    """permutation_sign, reorder_sign and Orientation."""

    def test_matches_sympy_parity(self):
        """permutation_sign should agree with sympy on random permutations."""
        rng = random.Random(3)
        for size in range(1, 8):
            perm = list(range(size))
            rng.shuffle(perm)
            assert permutation_sign(perm) == Permutation(perm).signature()

    def test_transposition(self):
        """A single swap is odd."""
        assert reorder_sign('abc', 'bac') == -1
        assert reorder_sign('abc', 'bca') == 1

    def test_repeated_items_rejected(self):
        """permutation_sign needs distinct items."""
        with pytest.raises(ValueError):
            permutation_sign([1, 1])

    def test_orientation_sign_must_be_unit(self):
        """Orientation signs other than +1 and -1 should be rejected."""
        with pytest.raises(GraphStructureError):
            Orientation((('v', 0),), 2)

    def test_relative_sign(self):
        """Swapping two generators flips the relative sign."""
        first = Orientation((('v', 0), ('h', 0)), 1)
        second = Orientation((('h', 0), ('v', 0)), 1)
        assert first.relative_sign(second) == -1
        assert first.relative_sign(-second) == 1


# ============================================================================
# Test Group 2: Graph validation
# ============================================================================

class TestValidation:
    """Structural checks on BW graphs."""

    def test_black_vertex_needs_valence_three(self):
        """A bivalent black vertex is not allowed."""
        with pytest.raises(GraphStructureError):
            BWGraph(cyclic_order={0: (0, 1)}, involution={0: 0, 1: 1})

    def test_white_start_must_be_incident(self):
        """The start half-edge of a white vertex must belong to it."""
        with pytest.raises(GraphStructureError):
            BWGraph(cyclic_order={0: (0,)}, involution={0: 0, 1: 1}, color={0: WHITE}, start={0: 1})

    def test_leaf_labels_distinct(self):
        """Two leaves may not share a label."""
        with pytest.raises(GraphStructureError):
            BWGraph(cyclic_order={0: (0, 1, 2)}, involution={0: 0, 1: 1, 2: 2}, leaf_labels={0: 1, 1: 1})

    def test_orientation_must_cover_generators(self):
        """An orientation missing a half-edge is rejected."""
        with pytest.raises(GraphStructureError):
            OrientedBWGraph(l_graph(2).graph, Orientation((('v', 0), ('h', 0)), 1))

    def test_l_graph_needs_a_spoke(self):
        """l_0 does not exist."""
        with pytest.raises(GraphStructureError):
            l_graph(0)


# ============================================================================
# Test Group 3: Degrees and surfaces
# ============================================================================

class TestSurfaces:
    """degree, boundary_cycles and surface_type."""

    @pytest.mark.parametrize('n', [1, 2, 3, 5])
    def test_l_graph_degree(self, n):
        """l_n has degree n - 1."""
        assert degree(l_graph(n).graph) == n - 1

    def test_corolla_degree(self):
        """A black corolla with k inputs has degree k - 2."""
        assert degree(corolla_graph(4).graph) == 2

    def test_corolla_is_a_disk(self):
        """A tree thickens to a disk with one boundary."""
        assert surface_type(corolla_graph(3).graph) == (0, 1)
        assert len(boundary_cycles(corolla_graph(3).graph)) == 1

    def test_l_graph_is_an_annulus(self):
        """A white vertex with leaves thickens to an annulus."""
        assert surface_type(l_graph(3).graph) == (0, 2)

    def test_disconnected_surface_raises(self):
        """surface_type needs a connected graph."""
        g = BWGraph(cyclic_order={0: (0, 1, 2), 1: (3, 4, 5)}, involution={h: h for h in range(6)})
        with pytest.raises(GraphStructureError):
            surface_type(g)


# ============================================================================
# Test Group 4: Canonical forms
# ============================================================================

class TestCanonicalForm:
    """Canonical codes and signs."""

    def test_relabel_invariance(self):
        """Renaming ids leaves the code and sign unchanged."""
        rng = random.Random(11)
        for _ in range(20):
            og = random_bw_graph(rng)
            assert canonical_form(shuffled_relabel(og, rng)) == canonical_form(og)

    def test_negation_flips_sign(self):
        """Negating the orientation negates the canonical sign."""
        code, sign = canonical_form(l_graph(3))
        assert canonical_form(-l_graph(3)) == (code, -sign)

    def test_graph_from_code_is_canonical(self):
        """The rebuilt representative has sign +1."""
        code, _ = canonical_form(corolla_graph(3))
        assert canonical_form(graph_from_code(code)) == (code, 1)

    def test_json_preserves_canonical_form(self):
        """from_json(to_json(g)) is the same oriented graph up to ids."""
        og = random_bw_graph(random.Random(5))
        assert canonical_form(from_json(to_json(og))) == canonical_form(og)

    def test_dot_marks_white_vertices(self):
        """White vertices are drawn as circles."""
        assert 'shape=circle' in to_dot(l_graph(2))


# ============================================================================
# Test Group 5: Blow-ups, collapse and the differential
# ============================================================================

class TestDifferential:
    """Blow-ups, collapse and d^2 = 0."""

    def test_collapse_undoes_blowup(self):
        """Collapsing the new edge of a blow-up returns the original graph."""
        og = corolla_graph(4)
        for term in vertex_blowups(og, 0):
            assert canonical_form(collapse(term.graph, term.old_half)) == canonical_form(og)

    def test_blowup_lowers_degree(self):
        """Every blow-up has degree one less."""
        og = l_graph(3)
        for term in vertex_blowups(og, 0):
            assert degree(term.graph.graph) == degree(og.graph) - 1

    def test_collapse_rejects_leaf(self):
        """Leaves cannot be collapsed."""
        with pytest.raises(GraphStructureError):
            collapse(corolla_graph(3), 0)

    @pytest.mark.parametrize('og', [l_graph(3), l_graph(4), corolla_graph(4)])
    def test_square_vanishes(self, og):
        """d^2 = 0 on small generators."""
        code, sign = canonical_form(og)
        assert differential(differential({code: sign})) == {}

    def test_square_vanishes_on_random_graphs(self):
        """d^2 = 0 on seeded random graphs."""
        rng = random.Random(17)
        for _ in range(15):
            code, sign = canonical_form(random_bw_graph(rng, max_degree=3))
            if sign:
                assert differential(differential({code: sign})) == {}
