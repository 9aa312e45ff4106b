"""Sullivan diagrams: BW graphs with trivalent black vertices up to slides.

A diagram is stored through its hub graph: every maximal black tree of a
trivalent representative is collapsed to one black hub whose cyclic order
is the boundary order of the tree. The canonical code of the hub graph is
the normal form.

Signs are read against a standard orientation of the representative:
each black vertex with cyclic order (a1, a2, a3) contributes the block
a2 ^ a3 ^ v ^ a1, the blocks come first, then the remaining half-edges
and the white vertices in the canonical order of the hub graph, so l_n
keeps its orientation s_1 ^ ... ^ s_n ^ w. Blocks have even length and
are invariant under rotation, so two trees with the same boundary order
give the same sign; the two resolutions of a 4-valent vertex then carry
opposite signs and cancel.
"""
import json
import random
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from chain_complex import Combination, add_term
from errors import GraphStructureError
from graph_core import (BLACK, UNIT, WHITE, BWGraph, Code, Generator, Orientation, OrientedBWGraph,
                        canonical_candidates, generators, graph_from_code, reorder_sign, to_dot, to_json,
                        vertex_blowups)
from logger import get_logger

logger = get_logger(__name__)

Site = Union[int, str]
ChordEnd = Union[Tuple[int, int], int]


@dataclass(frozen=True)
class SullivanDiagram:
    """Normal form of a Sullivan diagram: the canonical code of its hub graph."""
    code: Code

    @property
    def degree(self) -> int:
        """Sum of (valence - 1) over the white vertices."""
        total = 0
        for _, records, _ in self.code:
            for color_code, _, valence, _ in records:
                if color_code == 1:
                    total += valence - 1
        return total

    def hub_graph(self) -> BWGraph:
        """The hub graph rebuilt from the code."""
        return graph_from_code(self.code).graph


@dataclass(frozen=True)
class DiagramFace:
    """One uncancelled term of the differential.

    Attributes:
        white: White vertex of the representative that was blown up
        position: Index, counted from the start, of the first merged spoke
        block: The two merged half-edges
        result: Normal form of the blown-up graph (empty when it vanishes)
    """
    white: int
    position: int
    block: Tuple[int, int]
    result: Combination


# ----------------------------------------------------------------------------
# Normal form
# ----------------------------------------------------------------------------

def _check_trivalent(g: BWGraph) -> None:
    for v in g.vertices:
        kind = g.color_of(v)
        if kind == UNIT:
            raise GraphStructureError(f"unit vertex {v} has no meaning in a Sullivan diagram")
        if kind == BLACK and g.valence(v) != 3:
            raise GraphStructureError(f"black vertex {v} has valence {g.valence(v)}, expected 3")


def _is_internal(g: BWGraph, h: int) -> bool:
    """Whether h lies on an edge with both ends black."""
    partner = g.involution[h]
    if partner == h or g.source[h] is None or g.color_of(g.source[h]) != BLACK:
        return False
    return g.source[partner] is not None and g.color_of(g.source[partner]) == BLACK


def _black_trees(g: BWGraph) -> Optional[List[Tuple[List[int], Tuple[int, ...]]]]:
    """(vertices, boundary order) of each black tree; None if some black component has a cycle."""
    blacks = g.vertices_of_color(BLACK)
    parent = {v: v for v in blacks}

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    internal_halves: Dict[int, int] = {}
    for v in blacks:
        for h in g.cyclic_order[v]:
            if _is_internal(g, h):
                parent[find(v)] = find(g.source[g.involution[h]])
    for v in blacks:
        root = find(v)
        internal_halves[root] = internal_halves.get(root, 0) + sum(
            1 for h in g.cyclic_order[v] if _is_internal(g, h))
    members: Dict[int, List[int]] = {}
    for v in blacks:
        members.setdefault(find(v), []).append(v)
    trees = []
    for root, verts in sorted(members.items()):
        if internal_halves.get(root, 0) // 2 != len(verts) - 1:
            return None
        boundary = sorted(h for v in verts for h in g.cyclic_order[v] if not _is_internal(g, h))
        first = boundary[0]
        order = [first]
        h = first
        while True:
            h = g.next_half(h)
            while _is_internal(g, h):
                h = g.next_half(g.involution[h])
            if h == first:
                break
            order.append(h)
        trees.append((sorted(verts), tuple(order)))
    return trees


def _blocks(g: BWGraph) -> List[Generator]:
    result: List[Generator] = []
    for v in g.vertices_of_color(BLACK):
        a1, a2, a3 = g.cyclic_order[v]
        result.extend([('h', a2), ('h', a3), ('v', v), ('h', a1)])
    return result


def _hub_graph(g: BWGraph) -> Optional[BWGraph]:
    trees = _black_trees(g)
    if trees is None:
        return None
    cyclic_order = {v: order for v, order in g.cyclic_order.items() if g.color_of(v) == WHITE}
    for verts, boundary in trees:
        cyclic_order[verts[0]] = boundary
    involution = {h: p for h, p in g.involution.items() if not _is_internal(g, h)}
    return BWGraph(cyclic_order=cyclic_order, involution=involution,
                   color={v: WHITE for v in g.vertices_of_color(WHITE)},
                   white_labels=dict(g.white_labels), start=dict(g.start),
                   leaf_labels={h: lab for h, lab in g.leaf_labels.items() if h in involution})


def _white_generators(c: BWGraph) -> Optional[Tuple[Code, List[Generator]]]:
    """Canonical code and the white part of the standard ordering.

    Returns None when an automorphism of the hub graph acts by an odd
    permutation on the white part, which makes the diagram zero.
    """
    def restricted(candidate) -> List[Generator]:
        _, vertex_order, half_order = candidate
        whites = [('v', v) for v in vertex_order if c.color_of(v) == WHITE]
        halves = [('h', h) for h in half_order
                  if c.source[h] is None or c.color_of(c.source[h]) == WHITE]
        return halves + whites

    groups = canonical_candidates(c)
    for matches in groups:
        reference = restricted(matches[0])
        for other in matches[1:]:
            if reorder_sign(reference, restricted(other)) < 0:
                return None
    for first, second in zip(groups, groups[1:]):
        if first[0][0] == second[0][0] and len(restricted(first[0])) % 2:
            return None
    code = tuple(matches[0][0] for matches in groups)
    ordering = [gen for matches in groups for gen in restricted(matches[0])]
    return code, ordering


def _standard_ordering(g: BWGraph) -> Optional[Tuple[Code, Tuple[Generator, ...]]]:
    c = _hub_graph(g)
    if c is None:
        return None
    white = _white_generators(c)
    if white is None:
        return None
    code, white_part = white
    return code, tuple(_blocks(g)) + tuple(white_part)


def standard_sign(og: OrientedBWGraph) -> Optional[Tuple[SullivanDiagram, int]]:
    """Normal form and sign of a trivalent representative, or None when it vanishes.

    Raises:
        GraphStructureError: If a black vertex is not trivalent or a unit vertex occurs
    """
    _check_trivalent(og.graph)
    found = _standard_ordering(og.graph)
    if found is None:
        return None
    code, ordering = found
    return SullivanDiagram(code), Orientation(ordering, 1).relative_sign(og.orientation)


def from_bw(og: OrientedBWGraph) -> Combination:
    """Sullivan diagram of a BW graph with trivalent black vertices.

    Returns:
        {diagram: sign}, or {} when the graph is zero in the quotient (a
        black cycle or an orientation-reversing symmetry)

    Raises:
        GraphStructureError: If a black vertex is not trivalent
    """
    found = standard_sign(og)
    if found is None:
        return {}
    diagram, sign = found
    return {diagram: sign}


def normalize(terms: Iterable[Tuple[OrientedBWGraph, int]]) -> Combination:
    """Normal forms of ``coeff * graph`` terms, combined."""
    result: Combination = {}
    for og, coeff in terms:
        for diagram, sign in from_bw(og).items():
            add_term(result, diagram, sign * coeff)
    return result


# ----------------------------------------------------------------------------
# Representatives
# ----------------------------------------------------------------------------

def _expand_hubs(c: BWGraph, rng: Optional[random.Random] = None) -> BWGraph:
    """Replace every black vertex of valence k > 3 by a planar trivalent tree.

    Adjacent boundary half-edges are split off one pair at a time: always
    the first pair (a left-combed tree) or a random pair when ``rng`` is
    given. The boundary order of the tree is the old cyclic order.
    """
    cyclic_order = dict(c.cyclic_order)
    involution = dict(c.involution)
    next_vertex = max(c.vertices, default=-1) + 1
    next_half = max(c.half_edges, default=-1) + 1
    for hub in c.vertices_of_color(BLACK):
        items = list(cyclic_order[hub])
        while len(items) > 3:
            i = rng.randrange(len(items)) if rng is not None else 0
            x, y = items[i], items[(i + 1) % len(items)]
            e, f = next_half, next_half + 1
            next_half += 2
            cyclic_order[next_vertex] = (x, y, e)
            next_vertex += 1
            involution[e], involution[f] = f, e
            if i == len(items) - 1:
                items = items[1:-1] + [f]
            else:
                items = items[:i] + [f] + items[i + 2:]
        cyclic_order[hub] = tuple(items)
    return c.with_changes(cyclic_order=cyclic_order, involution=involution)


def _with_standard_orientation(g: BWGraph) -> OrientedBWGraph:
    found = _standard_ordering(g)
    if found is None:
        raise GraphStructureError("the diagram is zero in the quotient")
    return OrientedBWGraph(g, Orientation(found[1], 1))


def representative(diagram: SullivanDiagram, rng: Optional[random.Random] = None) -> OrientedBWGraph:
    """Trivalent representative with sign +1 against the normal form.

    Args:
        diagram: A normal form
        rng: Random tree shapes; left-combed trees when None
    """
    return _with_standard_orientation(_expand_hubs(diagram.hub_graph(), rng))


# ----------------------------------------------------------------------------
# Differential
# ----------------------------------------------------------------------------

def differential_faces(diagram: SullivanDiagram) -> List[DiagramFace]:
    """Every blow-up of a white vertex along two adjacent spokes, before cancellation.

    Blow-ups with larger blocks create a black vertex of valence above 3
    and vanish in the quotient.
    """
    og = representative(diagram)
    g = og.graph
    faces = []
    for w in g.vertices_of_color(WHITE):
        order = g.cyclic_order[w]
        start = order.index(g.start[w])
        for term in vertex_blowups(og, w):
            if len(term.block) != 2:
                continue
            position = (order.index(term.block[0]) - start) % len(order)
            faces.append(DiagramFace(w, position, (term.block[0], term.block[1]), from_bw(term.graph)))
    faces.sort(key=lambda face: (face.white, face.position))
    logger.debug("Computed faces", extra={'faces': len(faces), 'degree': diagram.degree})
    return faces


def sd_differential(combo: Mapping[SullivanDiagram, int]) -> Combination:
    """Differential of a combination of diagrams."""
    result: Combination = {}
    for diagram, coeff in combo.items():
        for face in differential_faces(diagram):
            for image, sign in face.result.items():
                add_term(result, image, coeff * sign)
    return result


def is_cycle(combo: Mapping[SullivanDiagram, int]) -> bool:
    """Whether the differential vanishes."""
    return not sd_differential(combo)


# ----------------------------------------------------------------------------
# Builders
# ----------------------------------------------------------------------------

def build_classical_graph(circles: Sequence[Sequence[Site]], chords: Mapping[str, Sequence[ChordEnd]],
                          rng: Optional[random.Random] = None) -> OrientedBWGraph:
    """Trivalent representative of a classical chord picture.

    Args:
        circles: Sites of each white circle, read from the start; an int is
            a labelled leaf on the circle, a string names the chord ending there
        chords: Chord name -> its ends in the cyclic order around the chord;
            an end is (circle, site) or an int labelling a leaf on the chord.
            Two circle ends give a plain edge, three or more a black tree
        rng: Random tree shapes; left-combed trees when None

    Raises:
        GraphStructureError: If sites and chord ends do not match up
    """
    cyclic_order: Dict[int, Tuple[int, ...]] = {}
    involution: Dict[int, int] = {}
    leaf_labels: Dict[int, int] = {}
    spoke: Dict[Tuple[int, int], int] = {}
    half = 0
    for c, sites in enumerate(circles):
        if not sites:
            raise GraphStructureError(f"circle {c} has no sites")
        halves = []
        for p, site in enumerate(sites):
            spoke[(c, p)] = half
            involution[half] = half
            if isinstance(site, int):
                leaf_labels[half] = site
            halves.append(half)
            half += 1
        cyclic_order[c] = tuple(halves)
    used = set()
    next_vertex = len(circles)
    for name in sorted(chords):
        ends = [tuple(end) if isinstance(end, list) else end for end in chords[name]]
        for end in ends:
            if isinstance(end, tuple):
                c, p = end
                if (c, p) not in spoke or circles[c][p] != name or (c, p) in used:
                    raise GraphStructureError(f"chord {name!r} end {end} does not match a free site")
                used.add((c, p))
        if len(ends) == 2 and all(isinstance(end, tuple) for end in ends):
            a, b = spoke[ends[0]], spoke[ends[1]]
            involution[a], involution[b] = b, a
            continue
        if len(ends) < 3:
            raise GraphStructureError(f"chord {name!r} needs two circle ends or at least three ends")
        hub_halves = []
        for end in ends:
            involution[half] = half
            if isinstance(end, tuple):
                target = spoke[end]
                involution[half], involution[target] = target, half
            else:
                leaf_labels[half] = end
            hub_halves.append(half)
            half += 1
        cyclic_order[next_vertex] = tuple(hub_halves)
        next_vertex += 1
    missing = [key for key, value in spoke.items() if isinstance(circles[key[0]][key[1]], str) and key not in used]
    if missing:
        raise GraphStructureError(f"sites {missing} name chords that never end there")
    hub = BWGraph(cyclic_order=cyclic_order, involution=involution,
                  color={c: WHITE for c in range(len(circles))},
                  white_labels={c: c + 1 for c in range(len(circles))},
                  start={c: cyclic_order[c][0] for c in range(len(circles))},
                  leaf_labels=leaf_labels)
    return _with_standard_orientation(_expand_hubs(hub, rng))


def from_classical(circles: Sequence[Sequence[Site]], chords: Mapping[str, Sequence[ChordEnd]]) -> Combination:
    """Normal form of a classical chord picture, with sign +1."""
    return from_bw(build_classical_graph(circles, chords))


def _check_genus(g: int) -> None:
    if g < 1:
        raise GraphStructureError(f"genus must be at least 1, got {g}")


def mu_graph(g: int, rng: Optional[random.Random] = None) -> OrientedBWGraph:
    """mu_g: l_{2g+2} with a tree on the odd spokes and leaves 1..g+1 on the even ones.

    The tree meets the spokes in the order x_1, x_{2g+1}, ..., x_3.
    """
    _check_genus(g)
    sites: List[Site] = ['A' if p % 2 == 0 else p // 2 + 1 for p in range(2 * g + 2)]
    ends = [(0, 0)] + [(0, p) for p in range(2 * g, 0, -2)]
    return build_classical_graph([sites], {'A': ends}, rng)


def t_graph(g: int, rng: Optional[random.Random] = None) -> OrientedBWGraph:
    """t_g: mu_g with a second tree on the even spokes carrying the leaf 1.

    The second tree meets x_2, x_{2g+2}, ..., x_4 and then its leaf.
    """
    _check_genus(g)
    sites: List[Site] = ['A' if p % 2 == 0 else 'B' for p in range(2 * g + 2)]
    first = [(0, 0)] + [(0, p) for p in range(2 * g, 0, -2)]
    second: List[ChordEnd] = [(0, 1)] + [(0, p) for p in range(2 * g + 1, 1, -2)] + [1]
    return build_classical_graph([sites], {'A': first, 'B': second}, rng)


def mu_g(g: int) -> Combination:
    """The diagram mu_g."""
    return from_bw(mu_graph(g))


def t_g(g: int) -> Combination:
    """The diagram t_g."""
    return from_bw(t_graph(g))


def random_sullivan_graph(rng: random.Random, max_circles: int = 2, max_spokes: int = 8,
                          max_hubs: int = 2) -> OrientedBWGraph:
    """Random trivalent representative with a random orientation.

    White vertices get random valences with at most ``max_spokes`` spokes
    in total, hubs of valence 3 or 4 are expanded into trees, half-edges
    are paired at random and the rest become labelled leaves.
    """
    circles = rng.randint(1, max_circles)
    valences = [1] * circles
    for _ in range(rng.randint(0, max_spokes - circles)):
        valences[rng.randrange(circles)] += 1
    hubs = [rng.randint(3, 4) for _ in range(rng.randint(0, max_hubs))]
    cyclic_order: Dict[int, Tuple[int, ...]] = {}
    half = 0
    for v, k in enumerate(valences + hubs):
        cyclic_order[v] = tuple(range(half, half + k))
        half += k
    pool = list(range(half))
    rng.shuffle(pool)
    involution = {h: h for h in pool}
    pairs = rng.randint(0, len(pool) // 2)
    for i in range(pairs):
        a, b = pool[2 * i], pool[2 * i + 1]
        involution[a], involution[b] = b, a
    hub = BWGraph(cyclic_order=cyclic_order, involution=involution,
                  color={v: WHITE for v in range(circles)},
                  white_labels={v: v + 1 for v in range(circles)},
                  start={v: rng.choice(cyclic_order[v]) for v in range(circles)},
                  leaf_labels={h: i + 1 for i, h in enumerate(pool[2 * pairs:])})
    g = _expand_hubs(hub, rng)
    ordering = generators(g)
    rng.shuffle(ordering)
    return OrientedBWGraph(g, Orientation(tuple(ordering), rng.choice((1, -1))))


# ----------------------------------------------------------------------------
# Export
# ----------------------------------------------------------------------------

def classical(diagram: SullivanDiagram) -> Dict[str, object]:
    """Chord picture of a normal form.

    Returns:
        {'circles': sites per white vertex from the start,
         'chords': chord name -> ends in cyclic order}
    """
    c = diagram.hub_graph()
    names: Dict[int, str] = {}
    chords: Dict[str, List[object]] = {}
    for v in c.vertices_of_color(BLACK):
        names[v] = f'T{len(names) + 1}'
        chords[names[v]] = []
    circles = []
    edge_names: Dict[int, str] = {}
    circle_index = {w: i for i, w in enumerate(c.vertices_of_color(WHITE))}
    for w in c.vertices_of_color(WHITE):
        order = c.cyclic_order[w]
        start = order.index(c.start[w])
        sites: List[object] = []
        for p, h in enumerate(order[start:] + order[:start]):
            partner = c.involution[h]
            if partner == h:
                sites.append(c.leaf_labels.get(h, 0))
            elif c.color_of(c.source[partner]) == BLACK:
                sites.append(names[c.source[partner]])
            else:
                name = edge_names.get(partner) or f'E{sum(1 for n in chords if n.startswith("E")) + 1}'
                edge_names[h] = name
                sites.append(name)
                chords.setdefault(name, []).append([circle_index[w], p])
        circles.append(sites)
    for v in c.vertices_of_color(BLACK):
        for h in c.cyclic_order[v]:
            partner = c.involution[h]
            if partner == h:
                chords[names[v]].append(c.leaf_labels.get(h, 0))
            else:
                w = c.source[partner]
                order = c.cyclic_order[w]
                start = order.index(c.start[w])
                chords[names[v]].append([circle_index[w], (order.index(partner) - start) % len(order)])
    return {'circles': circles, 'chords': chords}


def diagram_to_json(diagram: SullivanDiagram) -> str:
    """JSON with the classical picture, the degree and a trivalent representative."""
    data = {
        'degree': diagram.degree,
        'classical': classical(diagram),
        'representative': json.loads(to_json(representative(diagram))),
    }
    return json.dumps(data, sort_keys=True)


def diagram_to_dot(diagram: SullivanDiagram, name: str = 'SD') -> str:
    """Graphviz rendering of the hub graph."""
    c = diagram.hub_graph()
    ordering = tuple(generators(c))
    return to_dot(OrientedBWGraph(c, Orientation(ordering, 1)), name)
