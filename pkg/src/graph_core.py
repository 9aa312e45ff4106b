"""Fat graphs, black-and-white graphs and their orientations.

A graph is stored through its half-edges: each vertex lists its incident
half-edges in cyclic order and an involution pairs half-edges into edges
(fixed points are leaves). Half-edges that belong to no vertex are loose;
a single loose half-edge is the exceptional one-leaf graph.

Orientations are orderings of the generators ``('v', id)`` and
``('h', id)`` together with a sign. Canonical forms reduce an oriented
graph to an integer code plus a sign relative to the canonical ordering
(all vertices, then all half-edges, in canonical order).
"""
import json
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from chain_complex import Combination, add_term
from errors import GraphStructureError
from logger import get_logger

logger = get_logger(__name__)

BLACK = 'black'
WHITE = 'white'
UNIT = 'unit'
COLOR_CODES = {BLACK: 0, WHITE: 1, UNIT: 2}
CODE_COLORS = {code: color for color, code in COLOR_CODES.items()}

Generator = Tuple[str, int]
Code = Tuple[tuple, ...]


def permutation_sign(sequence: Iterable) -> int:
    """Sign of the permutation that sorts a sequence of distinct items.

    Args:
        sequence: Distinct, mutually comparable items

    Returns:
        +1 for an even permutation, -1 for an odd one
    """
    items = list(sequence)
    rank = {item: i for i, item in enumerate(sorted(items))}
    if len(rank) != len(items):
        raise ValueError("permutation_sign needs distinct items")
    perm = [rank[item] for item in items]
    seen = [False] * len(perm)
    transpositions = 0
    for i in range(len(perm)):
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length:
            transpositions += length - 1
    return -1 if transpositions % 2 else 1


def reorder_sign(ordering: Iterable, new_ordering: Iterable) -> int:
    """Sign of the permutation taking ``ordering`` to ``new_ordering``."""
    position = {item: i for i, item in enumerate(ordering)}
    return permutation_sign(position[item] for item in new_ordering)


@dataclass(frozen=True)
class Graph:
    """Plain combinatorial graph ``(V, H, s, i)``.

    Attributes:
        vertices: Vertex ids
        half_edges: Half-edge ids
        source: Half-edge -> vertex (None for a loose half-edge)
        involution: Self-inverse map on half-edges; fixed points are leaves
        allow_low_valence: Permit vertices of valence below 3
    """
    vertices: frozenset
    half_edges: frozenset
    source: Mapping[int, Optional[int]]
    involution: Mapping[int, int]
    allow_low_valence: bool = False

    def __post_init__(self):
        if set(self.involution) != set(self.half_edges) or set(self.source) != set(self.half_edges):
            raise GraphStructureError("source and involution must be defined on every half-edge")
        for h, partner in self.involution.items():
            if partner not in self.involution or self.involution[partner] != h:
                raise GraphStructureError(f"involution is not self-inverse at half-edge {h}")
        valence = {v: 0 for v in self.vertices}
        for h, v in self.source.items():
            if v is None:
                if self.involution[h] != h:
                    raise GraphStructureError(f"loose half-edge {h} must be a leaf")
                continue
            if v not in valence:
                raise GraphStructureError(f"half-edge {h} points at unknown vertex {v}")
            valence[v] += 1
        if not self.allow_low_valence:
            low = [v for v, k in valence.items() if k < 3]
            if low:
                raise GraphStructureError(f"vertices {sorted(low)} have valence below 3")

    @property
    def leaves(self) -> List[int]:
        """Fixed points of the involution."""
        return sorted(h for h, p in self.involution.items() if h == p)


@dataclass(frozen=True)
class FatGraph:
    """Graph with a cyclic ordering of the half-edges at each vertex.

    Attributes:
        cyclic_order: Vertex -> tuple of incident half-edges in cyclic order
        involution: Half-edge -> partner half-edge (itself for a leaf)
        allow_low_valence: Permit vertices of valence below 3
    """
    cyclic_order: Mapping[int, Tuple[int, ...]]
    involution: Mapping[int, int]
    allow_low_valence: bool = False

    def __post_init__(self):
        source: Dict[int, Optional[int]] = {}
        for v, order in self.cyclic_order.items():
            for h in order:
                if h in source:
                    raise GraphStructureError(f"half-edge {h} appears twice in cyclic orders")
                source[h] = v
        for h in self.involution:
            source.setdefault(h, None)
        object.__setattr__(self, '_source', source)
        object.__setattr__(self, '_graph', Graph(
            vertices=frozenset(self.cyclic_order),
            half_edges=frozenset(self.involution),
            source=source,
            involution=dict(self.involution),
            allow_low_valence=self.allow_low_valence,
        ))

    @property
    def graph(self) -> Graph:
        """Underlying plain graph."""
        return self._graph  # pylint: disable=no-member

    @property
    def source(self) -> Mapping[int, Optional[int]]:
        """Half-edge -> vertex."""
        return self._source  # pylint: disable=no-member

    @property
    def vertices(self) -> List[int]:
        """Sorted vertex ids."""
        return sorted(self.cyclic_order)

    @property
    def half_edges(self) -> List[int]:
        """Sorted half-edge ids."""
        return sorted(self.involution)

    def valence(self, v: int) -> int:
        """Number of half-edges at ``v``."""
        return len(self.cyclic_order[v])

    def is_leaf(self, h: int) -> bool:
        """Whether ``h`` is a fixed point of the involution."""
        return self.involution[h] == h

    def next_half(self, h: int) -> int:
        """Cyclic successor of ``h`` at its source vertex."""
        order = self.cyclic_order[self.source[h]]
        return order[(order.index(h) + 1) % len(order)]

    def edges(self) -> List[Tuple[int, int]]:
        """Internal edges as sorted half-edge pairs."""
        return sorted({tuple(sorted((h, p))) for h, p in self.involution.items() if h != p})


@dataclass(frozen=True)
class BWGraph(FatGraph):
    """Fat graph with black, white and unit vertices.

    White vertices carry a label and a start half-edge; leaves may carry
    nonzero integer labels (unlabelled leaves use 0 or are omitted).

    Attributes:
        color: Vertex -> 'black', 'white' or 'unit' (missing means black)
        white_labels: White vertex -> label
        start: White vertex -> incident start half-edge
        leaf_labels: Leaf -> nonzero label
    """
    color: Mapping[int, str] = field(default_factory=dict)
    white_labels: Mapping[int, int] = field(default_factory=dict)
    start: Mapping[int, int] = field(default_factory=dict)
    leaf_labels: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'allow_low_valence', True)
        super().__post_init__()
        for v, order in self.cyclic_order.items():
            kind = self.color_of(v)
            if kind not in COLOR_CODES:
                raise GraphStructureError(f"vertex {v} has unknown color {kind!r}")
            if kind == BLACK and len(order) < 3:
                raise GraphStructureError(f"black vertex {v} has valence {len(order)}")
            if kind == WHITE:
                if not order:
                    raise GraphStructureError(f"white vertex {v} has no half-edges")
                if self.start.get(v) not in order:
                    raise GraphStructureError(f"start half-edge of white vertex {v} is not incident")
            if kind == UNIT and len(order) != 1:
                raise GraphStructureError(f"unit vertex {v} must have valence 1")
        labels = [lab for h, lab in self.leaf_labels.items() if lab]
        if len(labels) != len(set(labels)):
            raise GraphStructureError("leaf labels must be distinct")
        for h in self.leaf_labels:
            if self.involution.get(h) != h:
                raise GraphStructureError(f"labelled half-edge {h} is not a leaf")

    def color_of(self, v: int) -> str:
        """Color of vertex ``v``."""
        return self.color.get(v, BLACK)

    def vertices_of_color(self, kind: str) -> List[int]:
        """Sorted vertices of one color."""
        return [v for v in self.vertices if self.color_of(v) == kind]

    def with_changes(self, **changes) -> 'BWGraph':
        """Return a copy with some fields replaced."""
        fields = {
            'cyclic_order': self.cyclic_order,
            'involution': self.involution,
            'color': self.color,
            'white_labels': self.white_labels,
            'start': self.start,
            'leaf_labels': self.leaf_labels,
        }
        fields.update(changes)
        return BWGraph(**fields)


@dataclass(frozen=True)
class Orientation:
    """Ordering of vertices and half-edges together with a sign."""
    ordering: Tuple[Generator, ...]
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise GraphStructureError(f"orientation sign must be +1 or -1, got {self.sign}")
        if len(set(self.ordering)) != len(self.ordering):
            raise GraphStructureError("orientation repeats a generator")

    def __neg__(self) -> 'Orientation':
        return Orientation(self.ordering, -self.sign)

    def relative_sign(self, other: 'Orientation') -> int:
        """Sign c with ``other = c * self`` (same generator set)."""
        return self.sign * other.sign * reorder_sign(self.ordering, other.ordering)


def generators(g: FatGraph) -> List[Generator]:
    """All orientation generators of ``g``: vertices then half-edges."""
    return [('v', v) for v in g.vertices] + [('h', h) for h in g.half_edges]


@dataclass(frozen=True)
class OrientedBWGraph:
    """BW graph with an orientation."""
    graph: BWGraph
    orientation: Orientation

    def __post_init__(self):
        if set(self.orientation.ordering) != set(generators(self.graph)):
            raise GraphStructureError("orientation must order exactly the vertices and half-edges")

    def __neg__(self) -> 'OrientedBWGraph':
        return OrientedBWGraph(self.graph, -self.orientation)


# ----------------------------------------------------------------------------
# Degree, boundary cycles, surface type
# ----------------------------------------------------------------------------

def degree(g: BWGraph) -> int:
    """Sum of (valence - 3) over black and (valence - 1) over white vertices."""
    total = 0
    for v, order in g.cyclic_order.items():
        kind = g.color_of(v)
        if kind == BLACK:
            total += len(order) - 3
        elif kind == WHITE:
            total += len(order) - 1
    return total


Slot = Tuple[int, int]


def _face_successor(g: FatGraph, slot: Slot) -> Slot:
    h, bar = slot
    if g.source[h] is None:
        return slot
    if bar:
        return (g.next_half(h), 0)
    partner = g.involution[h]
    if partner == h:
        return (h, 1)
    return (g.next_half(partner), 0)


def boundary_cycles(g: FatGraph) -> List[Tuple[Slot, ...]]:
    """Orbits of the face-traversal permutation.

    A slot is ``(h, 0)`` for a half-edge and ``(h, 1)`` for the far side
    of a leaf, so a leaf is visited twice. White vertices are traversed
    like black ones.

    Args:
        g: A fat graph

    Returns:
        Cycles as tuples of slots, each starting at its smallest slot,
        sorted
    """
    slots = [(h, 0) for h in g.half_edges]
    slots += [(h, 1) for h in g.half_edges if g.is_leaf(h) and g.source[h] is not None]
    remaining = set(slots)
    cycles = []
    for slot in sorted(slots):
        if slot not in remaining:
            continue
        cycle = []
        current = slot
        while current in remaining:
            remaining.discard(current)
            cycle.append(current)
            current = _face_successor(g, current)
        cycles.append(tuple(cycle))
    return sorted(cycles)


def connected_components(g: FatGraph) -> List[Tuple[List[int], List[int]]]:
    """Connected components as (vertices, half-edges), in order of smallest id."""
    parent: Dict[Generator, Generator] = {}

    def find(x: Generator) -> Generator:
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: Generator, b: Generator) -> None:
        parent[find(a)] = find(b)

    for h in g.half_edges:
        find(('h', h))
        if g.source[h] is not None:
            union(('h', h), ('v', g.source[h]))
        union(('h', h), ('h', g.involution[h]))
    for v in g.vertices:
        find(('v', v))
    groups: Dict[Generator, Tuple[List[int], List[int]]] = {}
    for gen in sorted(parent):
        verts, halves = groups.setdefault(find(gen), ([], []))
        (verts if gen[0] == 'v' else halves).append(gen[1])
    return sorted(groups.values(), key=lambda comp: (min(comp[1] or [10 ** 9]), comp[0]))


def surface_type(g: BWGraph) -> Tuple[int, int]:
    """Genus and number of boundary components of the thickened graph.

    White vertices thicken to annuli, so each contributes one boundary
    circle on top of the faces.

    Raises:
        GraphStructureError: If the graph is disconnected
    """
    if len(connected_components(g)) != 1:
        raise GraphStructureError("surface_type needs a connected graph")
    euler = sum(1 for v in g.vertices if g.color_of(v) != WHITE) - len(g.edges())
    euler += sum(1 for h in g.half_edges if g.source[h] is None)
    boundaries = len(boundary_cycles(g)) + len(g.vertices_of_color(WHITE))
    genus, remainder = divmod(2 - euler - boundaries, 2)
    if remainder:
        raise GraphStructureError("inconsistent Euler characteristic")
    return genus, boundaries


# ----------------------------------------------------------------------------
# Canonical forms
# ----------------------------------------------------------------------------

def _traverse(g: BWGraph, root: int) -> Tuple[tuple, List[int], List[int]]:
    """Breadth-first code of the component containing ``root``."""
    if g.source[root] is None:
        return (1, (), ((1, g.leaf_labels.get(root, 0)),)), [], [root]
    first = g.source[root]
    queue = deque([(first, root)])
    seen = {first}
    vertex_order: List[int] = []
    half_order: List[int] = []
    half_index: Dict[int, int] = {}
    records = []
    while queue:
        v, entry = queue.popleft()
        vertex_order.append(v)
        order = g.cyclic_order[v]
        k = order.index(entry)
        rotated = order[k:] + order[:k]
        start = g.start.get(v)
        records.append((COLOR_CODES[g.color_of(v)], g.white_labels.get(v, 0), len(rotated),
                        rotated.index(start) if start is not None else -1))
        for h in rotated:
            half_index[h] = len(half_order)
            half_order.append(h)
        for h in rotated:
            partner = g.involution[h]
            if partner != h:
                u = g.source[partner]
                if u not in seen:
                    seen.add(u)
                    queue.append((u, partner))
    halves = tuple((0, half_index[g.involution[h]]) if g.involution[h] != h
                   else (1, g.leaf_labels.get(h, 0)) for h in half_order)
    return (0, tuple(records), halves), vertex_order, half_order


def _roots(g: BWGraph, vertices: List[int], halves: List[int]) -> List[int]:
    labelled = [h for h in halves if g.involution[h] == h and g.leaf_labels.get(h, 0)]
    if labelled:
        return [min(labelled, key=lambda h: g.leaf_labels[h])]
    whites = [v for v in vertices if g.color_of(v) == WHITE and g.white_labels.get(v)]
    if whites:
        return [g.start[min(whites, key=lambda v: g.white_labels[v])]]
    return [h for h in halves if g.source[h] is not None] or halves


def _order_sign(first: List[int], second: List[int]) -> int:
    position = {x: i for i, x in enumerate(first)}
    return permutation_sign(position[x] for x in second)


def canonical_candidates(g: BWGraph) -> List[List[Tuple[tuple, List[int], List[int]]]]:
    """Minimal traversals of every component.

    Returns:
        One list per component, components sorted by code; each list holds
        every (code, vertex_order, half_order) traversal reaching the
        minimal code, so two entries differ by an automorphism
    """
    groups = []
    for verts, halves in connected_components(g):
        candidates = [_traverse(g, root) for root in _roots(g, verts, halves)]
        best = min(candidate[0] for candidate in candidates)
        groups.append([c for c in candidates if c[0] == best])
    groups.sort(key=lambda group: group[0][0])
    return groups


def canonical_labeling(g: BWGraph) -> Tuple[Optional[Code], List[int], List[int]]:
    """Canonical code and the canonical vertex and half-edge orders.

    Returns:
        (code, vertex_order, half_order); code is None when the graph has
        an orientation-reversing automorphism
    """
    groups = canonical_candidates(g)
    reversing = False
    for matches in groups:
        reference = matches[0]
        for other in matches[1:]:
            parity = _order_sign(reference[1], other[1]) * _order_sign(reference[2], other[2])
            if parity < 0:
                reversing = True
    components = [matches[0] for matches in groups]
    for first, second in zip(components, components[1:]):
        if first[0] == second[0] and (len(first[1]) + len(first[2])) % 2:
            reversing = True
    code = tuple(comp[0] for comp in components)
    vertex_order = [v for comp in components for v in comp[1]]
    half_order = [h for comp in components for h in comp[2]]
    return (None if reversing else code), vertex_order, half_order


def canonical_form(og: OrientedBWGraph) -> Tuple[Code, int]:
    """Canonical code and orientation sign.

    Args:
        og: Oriented BW graph

    Returns:
        (code, sign) where sign is +1/-1 relative to the canonical ordering,
        or 0 when an automorphism reverses the orientation
    """
    code, vertex_order, half_order = canonical_labeling(og.graph)
    if code is None:
        return _code_only(og.graph), 0
    index = {('v', v): i for i, v in enumerate(vertex_order)}
    offset = len(vertex_order)
    index.update({('h', h): offset + i for i, h in enumerate(half_order)})
    sign = og.orientation.sign * permutation_sign(index[gen] for gen in og.orientation.ordering)
    return code, sign


def canonical_labeling_unchecked(g: BWGraph) -> Tuple[Code, List[int], List[int]]:
    """Canonical code ignoring orientation-reversing automorphisms."""
    components = []
    for verts, halves in connected_components(g):
        components.append(min((_traverse(g, root) for root in _roots(g, verts, halves)),
                              key=lambda candidate: candidate[0]))
    components.sort(key=lambda comp: comp[0])
    return (tuple(comp[0] for comp in components),
            [v for comp in components for v in comp[1]],
            [h for comp in components for h in comp[2]])


def _code_only(g: BWGraph) -> Code:
    return canonical_labeling_unchecked(g)[0]


def graph_from_code(code: Code) -> OrientedBWGraph:
    """Rebuild the canonical representative of a code.

    Vertices are numbered 0..V-1 and half-edges 0..H-1 in canonical order;
    the orientation is that order with sign +1.
    """
    cyclic_order: Dict[int, Tuple[int, ...]] = {}
    involution: Dict[int, int] = {}
    color: Dict[int, str] = {}
    white_labels: Dict[int, int] = {}
    start: Dict[int, int] = {}
    leaf_labels: Dict[int, int] = {}
    next_vertex = 0
    next_half = 0
    for _, records, halves in code:
        base = next_half
        offset = base
        for color_code, white_label, valence, start_offset in records:
            v = next_vertex
            next_vertex += 1
            cyclic_order[v] = tuple(range(offset, offset + valence))
            color[v] = CODE_COLORS[color_code]
            if white_label:
                white_labels[v] = white_label
            if start_offset >= 0:
                start[v] = offset + start_offset
            offset += valence
        for local, (kind, value) in enumerate(halves):
            h = base + local
            if kind == 0:
                involution[h] = base + value
            else:
                involution[h] = h
                if value:
                    leaf_labels[h] = value
        next_half = base + len(halves)
    graph = BWGraph(cyclic_order=cyclic_order, involution=involution, color=color,
                    white_labels=white_labels, start=start, leaf_labels=leaf_labels)
    ordering = tuple(('v', v) for v in range(next_vertex)) + tuple(('h', h) for h in range(next_half))
    return OrientedBWGraph(graph, Orientation(ordering, 1))


def canonical_combination(terms: Iterable[Tuple[OrientedBWGraph, int]]) -> Combination:
    """Canonicalize ``coeff * graph`` terms and combine like terms."""
    combo: Combination = {}
    for og, coeff in terms:
        code, sign = canonical_form(og)
        add_term(combo, code, sign * coeff)
    return combo


def relabel(og: OrientedBWGraph, vertex_map: Mapping[int, int], half_map: Mapping[int, int]) -> OrientedBWGraph:
    """Rename vertices and half-edges by bijections."""
    g = og.graph
    graph = BWGraph(
        cyclic_order={vertex_map[v]: tuple(half_map[h] for h in order) for v, order in g.cyclic_order.items()},
        involution={half_map[h]: half_map[p] for h, p in g.involution.items()},
        color={vertex_map[v]: c for v, c in g.color.items()},
        white_labels={vertex_map[v]: lab for v, lab in g.white_labels.items()},
        start={vertex_map[v]: half_map[h] for v, h in g.start.items()},
        leaf_labels={half_map[h]: lab for h, lab in g.leaf_labels.items()},
    )
    ordering = tuple(('v', vertex_map[i]) if kind == 'v' else ('h', half_map[i])
                     for kind, i in og.orientation.ordering)
    return OrientedBWGraph(graph, Orientation(ordering, og.orientation.sign))


# ----------------------------------------------------------------------------
# Collapse and blow-up
# ----------------------------------------------------------------------------

def _after(order: Tuple[int, ...], h: int) -> Tuple[int, ...]:
    k = order.index(h)
    return order[k + 1:] + order[:k]


def _front_sign(orientation: Orientation, front: List[Generator]) -> Tuple[Tuple[Generator, ...], int]:
    """Move ``front`` to the start of the ordering; return the rest and the sign."""
    rest = tuple(gen for gen in orientation.ordering if gen not in front)
    return rest, orientation.sign * reorder_sign(orientation.ordering, tuple(front) + rest)


def collapse(og: OrientedBWGraph, half_edge: int) -> OrientedBWGraph:
    """Collapse the edge containing ``half_edge``.

    The cyclic order of the merged vertex lists the first endpoint's
    half-edges after h1 followed by the second endpoint's after h2, and the
    orientation v1^v2^h1^h2^X becomes v^X. A white endpoint keeps its
    color, label and id; if its start was the collapsed half-edge, the
    start moves to the first half-edge after the black end.

    Raises:
        GraphStructureError: For leaves, loops, white-white edges and unit
            vertices
    """
    g = og.graph
    h1 = half_edge
    h2 = g.involution[h1]
    if h1 == h2:
        raise GraphStructureError(f"half-edge {h1} is a leaf")
    v1, v2 = g.source[h1], g.source[h2]
    if v1 == v2:
        raise GraphStructureError(f"edge ({h1}, {h2}) is a loop")
    colors = (g.color_of(v1), g.color_of(v2))
    if colors == (WHITE, WHITE):
        raise GraphStructureError(f"edge ({h1}, {h2}) joins two white vertices")
    if UNIT in colors:
        raise GraphStructureError(f"edge ({h1}, {h2}) meets a unit vertex")
    after1 = _after(g.cyclic_order[v1], h1)
    after2 = _after(g.cyclic_order[v2], h2)
    keep = v2 if colors[1] == WHITE else v1
    merged = after1 + after2
    cyclic_order = {v: order for v, order in g.cyclic_order.items() if v not in (v1, v2)}
    cyclic_order[keep] = merged
    involution = {h: p for h, p in g.involution.items() if h not in (h1, h2)}
    color = {v: c for v, c in g.color.items() if v not in (v1, v2)}
    white_labels = {v: lab for v, lab in g.white_labels.items() if v not in (v1, v2)}
    start = {v: s for v, s in g.start.items() if v not in (v1, v2)}
    if WHITE in colors:
        white, white_half, black_after = (v1, h1, after2) if colors[0] == WHITE else (v2, h2, after1)
        color[keep] = WHITE
        white_labels[keep] = g.white_labels[white]
        old_start = g.start[white]
        start[keep] = black_after[0] if old_start == white_half else old_start
    graph = g.with_changes(cyclic_order=cyclic_order, involution=involution, color=color,
                           white_labels=white_labels, start=start)
    rest, sign = _front_sign(og.orientation, [('v', v1), ('v', v2), ('h', h1), ('h', h2)])
    return OrientedBWGraph(graph, Orientation((('v', keep),) + rest, sign))


@dataclass(frozen=True)
class BlowupTerm:
    """One explicit blow-up: the new graph and its new edge.

    Attributes:
        graph: Oriented blown-up graph
        old_half: Half-edge of the new edge at the original vertex
        new_half: Half-edge of the new edge at the new black vertex
        new_vertex: Id of the new black vertex
        block: Half-edges moved to the new vertex, in cyclic order
    """
    graph: OrientedBWGraph
    old_half: int
    new_half: int
    new_vertex: int
    block: Tuple[int, ...]


def vertex_blowups(og: OrientedBWGraph, v: int) -> List[BlowupTerm]:
    """All blow-ups at one vertex, uncombined and with explicit ids.

    A black vertex of valence k splits off a cyclic block of size 2..k-2
    (taken among positions 1..k-1 so each split appears once). A white
    vertex of valence k gives a new black vertex holding a cyclic block
    of size 2..k; when the block contains the start, the white end of the
    new edge becomes the start. The orientation v^X becomes
    v1^v2^h1^h2^X with v1 the original vertex and h1 its new half-edge.
    """
    g = og.graph
    order = g.cyclic_order[v]
    k = len(order)
    kind = g.color_of(v)
    new_vertex = max(g.vertices) + 1
    top = max(g.half_edges) if g.involution else -1
    h_old, h_new = top + 1, top + 2
    blocks: List[Tuple[Tuple[int, ...], Tuple[int, ...]]] = []
    if kind == BLACK:
        for first in range(1, k):
            for size in range(2, k - 1):
                if first + size - 1 > k - 1:
                    break
                block = order[first:first + size]
                rest = order[first + size:] + order[:first]
                blocks.append((block, rest))
    elif kind == WHITE:
        for first in range(k):
            for size in range(2, k + 1):
                rotated = order[first:] + order[:first]
                blocks.append((rotated[:size], rotated[size:]))
    rest_gens, sign = _front_sign(og.orientation, [('v', v)])
    ordering = (('v', v), ('v', new_vertex), ('h', h_old), ('h', h_new)) + rest_gens
    terms = []
    for block, rest in blocks:
        cyclic_order = dict(g.cyclic_order)
        cyclic_order[v] = (h_old,) + rest
        cyclic_order[new_vertex] = (h_new,) + block
        involution = dict(g.involution)
        involution[h_old] = h_new
        involution[h_new] = h_old
        color = dict(g.color)
        color[new_vertex] = BLACK
        start = dict(g.start)
        if kind == WHITE and g.start[v] in block:
            start[v] = h_old
        graph = g.with_changes(cyclic_order=cyclic_order, involution=involution, color=color, start=start)
        terms.append(BlowupTerm(OrientedBWGraph(graph, Orientation(ordering, sign)),
                                h_old, h_new, new_vertex, block))
    return terms


def blowups(og: OrientedBWGraph) -> Combination:
    """Graph differential: the signed sum of all blow-ups, canonicalized."""
    terms = []
    for v in og.graph.vertices:
        terms.extend((term.graph, 1) for term in vertex_blowups(og, v))
    return canonical_combination(terms)


def differential(combo: Mapping[Code, int]) -> Combination:
    """Extend :func:`blowups` linearly over canonical codes."""
    result: Combination = {}
    for code, coeff in combo.items():
        for image, sign in blowups(graph_from_code(code)).items():
            add_term(result, image, coeff * sign)
    return result


# ----------------------------------------------------------------------------
# Builders
# ----------------------------------------------------------------------------

def corolla_graph(k: int) -> OrientedBWGraph:
    """Black corolla with inputs labelled 1..k and root leaf labelled -1.

    Orientation h_1^...^h_k^v^h_0.
    """
    if k < 2:
        raise GraphStructureError(f"corolla needs at least 2 inputs, got {k}")
    graph = BWGraph(cyclic_order={0: tuple(range(k + 1))},
                    involution={h: h for h in range(k + 1)},
                    leaf_labels={0: -1, **{h: h for h in range(1, k + 1)}})
    ordering = tuple(('h', h) for h in range(1, k + 1)) + (('v', 0), ('h', 0))
    return OrientedBWGraph(graph, Orientation(ordering, 1))


def l_graph(n: int) -> OrientedBWGraph:
    """White vertex with n leaf spokes labelled 1..n from the start.

    Orientation s_1^...^s_n^w.
    """
    if n < 1:
        raise GraphStructureError(f"l_n needs n >= 1, got {n}")
    graph = BWGraph(cyclic_order={0: tuple(range(n))},
                    involution={h: h for h in range(n)},
                    color={0: WHITE}, white_labels={0: 1}, start={0: 0},
                    leaf_labels={h: h + 1 for h in range(n)})
    ordering = tuple(('h', h) for h in range(n)) + (('v', 0),)
    return OrientedBWGraph(graph, Orientation(ordering, 1))


def exceptional_graph(label: int = 1) -> OrientedBWGraph:
    """The one-leaf graph without vertices."""
    graph = BWGraph(cyclic_order={}, involution={0: 0}, leaf_labels={0: label} if label else {})
    return OrientedBWGraph(graph, Orientation((('h', 0),), 1))


def random_bw_graph(rng: random.Random, max_degree: int = 4, max_white: int = 2,
                    max_black: int = 2) -> OrientedBWGraph:
    """Random oriented BW graph of degree at most ``max_degree``.

    Vertices get random valences, half-edges are randomly paired, the
    remaining half-edges become leaves labelled 1..L, and the orientation
    is a random ordering with a random sign.
    """
    while True:
        whites = rng.randint(0, max_white)
        blacks = rng.randint(0, max_black)
        if whites + blacks == 0:
            continue
        valences = [rng.randint(1, 3) for _ in range(whites)] + [rng.randint(3, 4) for _ in range(blacks)]
        if sum(k - 1 for k in valences[:whites]) + sum(k - 3 for k in valences[whites:]) <= max_degree:
            break
    cyclic_order = {}
    next_half = 0
    for v, k in enumerate(valences):
        halves = list(range(next_half, next_half + k))
        rng.shuffle(halves)
        cyclic_order[v] = tuple(halves)
        next_half += k
    pool = list(range(next_half))
    rng.shuffle(pool)
    pairs = rng.randint(0, len(pool) // 2)
    involution = {h: h for h in pool}
    for i in range(pairs):
        a, b = pool[2 * i], pool[2 * i + 1]
        involution[a], involution[b] = b, a
    leaves = pool[2 * pairs:]
    graph = BWGraph(
        cyclic_order=cyclic_order,
        involution=involution,
        color={v: WHITE if v < whites else BLACK for v in cyclic_order},
        white_labels={v: v + 1 for v in range(whites)},
        start={v: rng.choice(cyclic_order[v]) for v in range(whites)},
        leaf_labels={h: i + 1 for i, h in enumerate(leaves)},
    )
    ordering = generators(graph)
    rng.shuffle(ordering)
    return OrientedBWGraph(graph, Orientation(tuple(ordering), rng.choice((1, -1))))


# ----------------------------------------------------------------------------
# Import / export
# ----------------------------------------------------------------------------

def to_json(og: OrientedBWGraph) -> str:
    """Serialize an oriented graph to the JSON graph format."""
    g = og.graph
    vertices = []
    for v in g.vertices:
        record = {'id': v, 'color': g.color_of(v)}
        if v in g.white_labels:
            record['label'] = g.white_labels[v]
        if v in g.start:
            record['start'] = g.start[v]
        vertices.append(record)
    half_edges = []
    for h in g.half_edges:
        record = {'id': h, 'source': g.source[h], 'partner': g.involution[h]}
        if g.leaf_labels.get(h):
            record['leaf_label'] = g.leaf_labels[h]
        half_edges.append(record)
    data = {
        'vertices': vertices,
        'half_edges': half_edges,
        'cyclic_order': {str(v): list(g.cyclic_order[v]) for v in g.vertices},
        'orientation': [f'{kind}{i}' for kind, i in og.orientation.ordering],
        'orientation_sign': og.orientation.sign,
    }
    return json.dumps(data, sort_keys=True)


def from_json(text: str) -> OrientedBWGraph:
    """Parse the JSON graph format.

    Raises:
        GraphStructureError: If sources disagree with the cyclic orders
    """
    data = json.loads(text)
    cyclic_order = {int(v): tuple(order) for v, order in data['cyclic_order'].items()}
    involution = {rec['id']: rec['partner'] for rec in data['half_edges']}
    graph = BWGraph(
        cyclic_order=cyclic_order,
        involution=involution,
        color={rec['id']: rec['color'] for rec in data['vertices']},
        white_labels={rec['id']: rec['label'] for rec in data['vertices'] if 'label' in rec},
        start={rec['id']: rec['start'] for rec in data['vertices'] if 'start' in rec},
        leaf_labels={rec['id']: rec['leaf_label'] for rec in data['half_edges'] if 'leaf_label' in rec},
    )
    for rec in data['half_edges']:
        if graph.source[rec['id']] != rec['source']:
            raise GraphStructureError(f"half-edge {rec['id']} has inconsistent source")
    if 'orientation' in data:
        ordering = tuple((item[0], int(item[1:])) for item in data['orientation'])
    else:
        ordering = tuple(generators(graph))
    return OrientedBWGraph(graph, Orientation(ordering, data.get('orientation_sign', 1)))


def to_dot(og: OrientedBWGraph, name: str = 'G') -> str:
    """Graphviz rendering: white vertices as circles, black as points.

    The start half-edge of each white vertex is drawn bold.
    """
    g = og.graph
    lines = [f'graph {name} {{']
    for v in g.vertices:
        kind = g.color_of(v)
        if kind == WHITE:
            lines.append(f'  v{v} [shape=circle, label="{g.white_labels.get(v, "")}"];')
        elif kind == UNIT:
            lines.append(f'  v{v} [shape=square, label="u"];')
        else:
            lines.append(f'  v{v} [shape=point];')
    starts = set(g.start.values())
    for h in g.half_edges:
        style = ', style=bold' if h in starts else ''
        if g.is_leaf(h):
            lines.append(f'  l{h} [shape=plaintext, label="{g.leaf_labels.get(h, "")}"];')
            tail = f'v{g.source[h]}' if g.source[h] is not None else f'l{h}'
            lines.append(f'  {tail} -- l{h} [taillabel="{h}"{style}];')
        elif h < g.involution[h]:
            p = g.involution[h]
            if p in starts:
                style = ', style=bold'
            lines.append(f'  v{g.source[h]} -- v{g.source[p]} [taillabel="{h}", headlabel="{p}"{style}];')
    lines.append('}')
    return '\n'.join(lines)
