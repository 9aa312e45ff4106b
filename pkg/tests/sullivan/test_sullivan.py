"""Tests for sullivan: normal forms, the differential and the classical picture."""
import json
import random

import pytest

from errors import GraphStructureError
from graph_core import (WHITE, BWGraph, Orientation, OrientedBWGraph, corolla_graph, generators, l_graph,
                        surface_type, vertex_blowups)
from sullivan import (SullivanDiagram, classical, diagram_to_dot, diagram_to_json, differential_faces, from_bw,
                      from_classical, is_cycle, mu_g, mu_graph, normalize, random_sullivan_graph,
                      representative, sd_differential, t_g, t_graph)


def only(combo):
    """The single diagram of a one-term combination."""
    assert len(combo) == 1
    return next(iter(combo))


def oriented(graph):
    """Graph with the default orientation."""
    return OrientedBWGraph(graph, Orientation(tuple(generators(graph)), 1))


@pytest.fixture
def black_cycle():
    """Two trivalent black vertices joined twice, hanging off one circle."""
    graph = BWGraph(cyclic_order={0: (0, 1, 2), 1: (3, 4, 5), 2: (6,)},
                    involution={0: 3, 3: 0, 1: 4, 4: 1, 2: 6, 6: 2, 5: 5},
                    color={2: WHITE}, white_labels={2: 1}, start={2: 6}, leaf_labels={5: 1})
    return oriented(graph)


@pytest.fixture
def four_valent():
    """A 4-valent black vertex between a circle and three leaves."""
    graph = BWGraph(cyclic_order={0: (0,), 1: (1, 2, 3, 4)},
                    involution={0: 1, 1: 0, 2: 2, 3: 3, 4: 4},
                    color={0: WHITE}, white_labels={0: 1}, start={0: 0}, leaf_labels={2: 1, 3: 2, 4: 3})
    return oriented(graph)


# ============================================================================
# Test Group 1: Normal forms
# ============================================================================

class TestNormalForms:
    """from_bw, normalize and representatives."""

    @pytest.mark.parametrize('n', [1, 2, 3, 4])
    def test_l_n(self, n):
        """l_n is its own normal form with sign +1 and degree n - 1."""
        combo = from_bw(l_graph(n))
        diagram = only(combo)
        assert combo[diagram] == 1
        assert diagram.degree == n - 1

    @pytest.mark.parametrize('g', [1, 2])
    def test_generator_degrees(self, g):
        """mu_g and t_g have degree 2g + 1."""
        assert only(mu_g(g)).degree == 2 * g + 1
        assert only(t_g(g)).degree == 2 * g + 1

    @pytest.mark.parametrize('g', [1, 2])
    def test_builders_carry_sign_one(self, g):
        """The builders return their own standard orientation."""
        assert list(t_g(g).values()) == [1]
        assert list(mu_g(g).values()) == [1]

    @pytest.mark.parametrize('builder, g', [(t_g, 1), (t_g, 2), (t_g, 3), (mu_g, 2), (mu_g, 3)])
    def test_builders_with_black_trees(self, builder, g):
        """Spokes meeting a black tree survive the collapse to hubs."""
        diagram = only(builder(g))
        assert diagram.degree == 2 * g + 1
        c = diagram.hub_graph()
        circle = c.vertices_of_color(WHITE)[0]
        assert c.valence(circle) == 2 * g + 2

    def test_surface_types(self):
        """mu_1 is a pair of pants with a leaf; t_1 has genus one."""
        assert surface_type(mu_graph(1).graph) == (0, 3)
        assert surface_type(t_graph(1).graph) == (1, 2)

    def test_tree_shape_does_not_matter(self):
        """Random trees on the same boundary give the same normal form and sign."""
        rng = random.Random(7)
        for _ in range(5):
            assert from_bw(t_graph(2, rng)) == t_g(2)

    def test_negation(self):
        """Reversing the orientation flips the sign."""
        diagram = only(t_g(1))
        assert from_bw(-t_graph(1)) == {diagram: -1}

    def test_black_cycle_is_zero(self, black_cycle):
        """A black component with a cycle vanishes."""
        assert from_bw(black_cycle) == {}

    def test_slide_relation(self, four_valent):
        """The two resolutions of a 4-valent black vertex cancel."""
        terms = [(term.graph, 1) for term in vertex_blowups(four_valent, 1)]
        assert len(terms) == 2
        assert normalize(terms) == {}

    def test_representative_round_trip(self):
        """Representatives have sign +1 against their normal form."""
        diagram = only(mu_g(2))
        assert from_bw(representative(diagram)) == {diagram: 1}
        assert from_bw(representative(diagram, random.Random(3))) == {diagram: 1}

    def test_rejects_non_trivalent(self):
        """Black vertices must be trivalent."""
        with pytest.raises(GraphStructureError):
            from_bw(corolla_graph(3))

    def test_genus_must_be_positive(self):
        """mu_0 and t_0 are not defined."""
        with pytest.raises(GraphStructureError):
            mu_graph(0)
        with pytest.raises(GraphStructureError):
            t_graph(0)


# ============================================================================
# Test Group 2: Differential
# ============================================================================

class TestDifferential:
    """differential_faces, sd_differential and is_cycle."""

    @pytest.mark.parametrize('g', [1, 2])
    def test_generators_are_cycles(self, g):
        """mu_g and t_g are cycles."""
        assert is_cycle(mu_g(g))
        assert is_cycle(t_g(g))

    @pytest.mark.parametrize('g', [1, 2])
    def test_face_count(self, g):
        """The 2g + 2 spokes give 2g + 2 adjacent pairs."""
        assert len(differential_faces(only(t_g(g)))) == 2 * g + 2
        assert len(differential_faces(only(mu_g(g)))) == 2 * g + 2

    def test_l_3_is_not_a_cycle(self):
        """l_3 has three distinct faces."""
        faces = differential_faces(only(from_bw(l_graph(3))))
        assert len(faces) == 3
        assert len({only(face.result) for face in faces}) == 3
        assert not is_cycle(from_bw(l_graph(3)))

    def test_faces_sorted(self):
        """Faces are listed by white vertex and position."""
        faces = differential_faces(only(from_bw(l_graph(4))))
        assert [face.position for face in faces] == sorted(face.position for face in faces)

    def test_squares_to_zero_on_l_n(self):
        """d^2 = 0 on the white corollas."""
        for n in (3, 4, 5):
            assert sd_differential(sd_differential(from_bw(l_graph(n)))) == {}

    def test_squares_to_zero_on_random_graphs(self):
        """d^2 = 0 on random diagrams."""
        rng = random.Random(11)
        for _ in range(15):
            combo = from_bw(random_sullivan_graph(rng, max_circles=2, max_spokes=5, max_hubs=1))
            assert sd_differential(sd_differential(combo)) == {}


# ============================================================================
# Test Group 3: Classical picture and export
# ============================================================================

class TestClassical:
    """classical, from_classical and the exporters."""

    @pytest.mark.parametrize('builder', [t_g, mu_g])
    def test_round_trip(self, builder):
        """Reading back the chord picture gives the same diagram with sign +1."""
        diagram = only(builder(1))
        assert from_classical(**classical(diagram)) == {diagram: 1}

    def test_round_trip_through_json(self):
        """Chord ends survive JSON as lists."""
        diagram = only(t_g(2))
        data = json.loads(json.dumps(classical(diagram)))
        assert from_classical(data['circles'], data['chords']) == {diagram: 1}

    def test_picture_of_l_n(self):
        """l_3 is one circle with three leaves and no chords."""
        picture = classical(only(from_bw(l_graph(3))))
        assert picture == {'circles': [[1, 2, 3]], 'chords': {}}

    def test_mismatched_chord(self):
        """A chord end must name a free site carrying its name."""
        with pytest.raises(GraphStructureError):
            from_classical([['A', 1]], {'A': [(0, 0), (0, 1)]})
        with pytest.raises(GraphStructureError):
            from_classical([['A', 'A']], {'A': [(0, 0)]})

    def test_json_export(self):
        """JSON carries the degree, the picture and a representative."""
        diagram = only(t_g(1))
        data = json.loads(diagram_to_json(diagram))
        assert data['degree'] == 3
        assert set(data) == {'degree', 'classical', 'representative'}

    def test_dot_export(self):
        """Dot output names the graph."""
        text = diagram_to_dot(only(mu_g(1)), name='mu1')
        assert 'mu1' in text

    def test_hub_graph(self):
        """The hub graph of t_1 has one circle and one hub."""
        c = only(t_g(1)).hub_graph()
        assert len(c.vertices_of_color(WHITE)) == 1
        assert len(c.vertices) == 2
        assert isinstance(only(t_g(1)), SullivanDiagram)
