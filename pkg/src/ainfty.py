"""Planar forests: the A-infinity dg-category and its unital extension.

A morphism n -> m is an integer combination of oriented planar forests.
Each forest is stored as the canonical code of its graph together with
its strands (inputs wired straight to outputs). Input leaves carry the
labels 1..n and root leaves the labels -1..-m. Unit vertices (color
'unit', valence 1) model the 0-ary generator of the unital extension and
are rewritten away eagerly whenever they feed a black vertex.

Composition is written in diagrammatic order: ``compose(f, g)`` runs f
first and glues root -j of f to input j of g, with orientation
``o_f ^ o_g``.
"""
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product as cartesian
from typing import Dict, Iterator, List, Mapping, Optional, Tuple

from chain_complex import Combination, VerificationReport, add_term
from errors import ArityError, GraphStructureError
from graph_core import (BLACK, UNIT, BWGraph, Code, Orientation, OrientedBWGraph,
                        blowups, canonical_combination, canonical_form, corolla_graph,
                        degree as graph_degree, graph_from_code, l_graph, relabel,
                        reorder_sign, vertex_blowups)
from logger import get_logger

logger = get_logger(__name__)

Strand = Tuple[int, int]
TermKey = Tuple[Code, Tuple[Strand, ...]]


@dataclass(frozen=True)
class ForestMorphism:
    """Integer combination of oriented planar forests from n inputs to m roots.

    Attributes:
        n_in: Number of inputs
        n_out: Number of roots
        terms: (graph code, strands) -> coefficient; zeros are dropped
    """
    n_in: int
    n_out: int
    terms: Mapping[TermKey, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'terms', {k: c for k, c in self.terms.items() if c})

    def __add__(self, other: 'ForestMorphism') -> 'ForestMorphism':
        _check_same_arity(self, other)
        combo = dict(self.terms)
        for key, coeff in other.terms.items():
            add_term(combo, key, coeff)
        return ForestMorphism(self.n_in, self.n_out, combo)

    def __neg__(self) -> 'ForestMorphism':
        return self.scaled(-1)

    def __sub__(self, other: 'ForestMorphism') -> 'ForestMorphism':
        return self + (-other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ForestMorphism):
            return NotImplemented
        return (self.n_in, self.n_out, dict(self.terms)) == (other.n_in, other.n_out, dict(other.terms))

    def __hash__(self):
        return hash((self.n_in, self.n_out, tuple(sorted(self.terms.items()))))

    def scaled(self, factor: int) -> 'ForestMorphism':
        """Multiply every coefficient by ``factor``."""
        return ForestMorphism(self.n_in, self.n_out, {k: factor * c for k, c in self.terms.items()})

    def is_zero(self) -> bool:
        """Whether every coefficient vanishes."""
        return not self.terms

    @property
    def degree(self) -> Optional[int]:
        """Homological degree of the terms; None for the zero morphism."""
        degrees = {term_degree(key) for key in self.terms}
        if len(degrees) > 1:
            raise GraphStructureError(f"forest combination mixes degrees {sorted(degrees)}")
        return degrees.pop() if degrees else None


def _check_same_arity(f: ForestMorphism, g: ForestMorphism) -> None:
    if (f.n_in, f.n_out) != (g.n_in, g.n_out):
        raise ArityError(f"cannot add {f.n_in}->{f.n_out} and {g.n_in}->{g.n_out} morphisms")


def term_degree(key: TermKey) -> int:
    """Degree of one forest: sum of (valence - 3) over black vertices."""
    return graph_degree(graph_from_code(key[0]).graph)


@dataclass(frozen=True)
class LGenerator:
    """The generator l_n: one white vertex with n spokes, degree n - 1."""
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ArityError(f"l_n needs n >= 1, got {self.n}")

    @property
    def degree(self) -> int:
        """Degree n - 1."""
        return self.n - 1

    def graph(self) -> OrientedBWGraph:
        """Oriented graph with orientation s_1^...^s_n^w."""
        return l_graph(self.n)


# ----------------------------------------------------------------------------
# Mutable working copy of a glued forest
# ----------------------------------------------------------------------------

class _Workspace:  # pylint: disable=too-few-public-methods
    """Forest under construction: plain dicts plus orientation and strands."""

    def __init__(self):
        self.cyclic_order: Dict[int, Tuple[int, ...]] = {}
        self.involution: Dict[int, int] = {}
        self.color: Dict[int, str] = {}
        self.leaf_labels: Dict[int, int] = {}
        self.ordering: List[Tuple[str, int]] = []
        self.sign = 1
        self.strands: List[Strand] = []

    def add_graph(self, og: OrientedBWGraph, labels: Mapping[int, int]) -> None:
        g = og.graph
        self.cyclic_order.update(g.cyclic_order)
        self.involution.update(g.involution)
        self.color.update(g.color)
        self.leaf_labels.update(labels)
        self.ordering.extend(og.orientation.ordering)
        self.sign *= og.orientation.sign

    def source(self, h: int) -> Optional[int]:
        for v, order in self.cyclic_order.items():
            if h in order:
                return v
        return None

    def leads_to_root(self, h: int) -> bool:
        """Whether the subtree beyond half-edge ``h`` holds a root leaf."""
        partner = self.involution[h]
        if partner == h:
            return self.leaf_labels.get(h, 0) < 0
        w = self.source(partner)
        return any(self.leads_to_root(x) for x in self.cyclic_order[w] if x != partner)

    def root_half(self, v: int) -> int:
        for h in self.cyclic_order[v]:
            if self.leads_to_root(h):
                return h
        raise GraphStructureError(f"vertex {v} is not connected to a root")

    def rewrite_units(self) -> bool:
        """Apply the unit rules until no unit feeds a vertex.

        Returns:
            False when the forest vanishes (a unit feeds a vertex of valence >= 4)
        """
        while True:
            found = None
            for u, order in self.cyclic_order.items():
                if self.color.get(u) == UNIT and self.involution[order[0]] != order[0]:
                    found = (u, order[0], self.involution[order[0]])
                    break
            if found is None:
                return True
            u, h_unit, h_in = found
            v = self.source(h_in)
            if self.color.get(v, BLACK) != BLACK:
                raise GraphStructureError(f"unit {u} feeds a non-black vertex {v}")
            if len(self.cyclic_order[v]) != 3:
                return False
            h_root = self.root_half(v)
            order = self.cyclic_order[v]
            k = order.index(h_root)
            x1, x2 = order[(k + 1) % 3], order[(k + 2) % 3]
            block = [('v', u), ('h', h_unit), ('h', x1), ('h', x2), ('v', v), ('h', h_root)]
            rest = [gen for gen in self.ordering if gen not in block]
            self.sign *= reorder_sign(self.ordering, block + rest)
            self.ordering = rest
            other = x2 if h_in == x1 else x1
            p_other, p_root = self.involution[other], self.involution[h_root]
            label_other = self.leaf_labels.pop(other, 0)
            label_root = self.leaf_labels.pop(h_root, 0)
            for vertex in (u, v):
                del self.cyclic_order[vertex]
                self.color.pop(vertex, None)
            for h in (h_unit, x1, x2, h_root):
                del self.involution[h]
            if p_other != other and p_root != h_root:
                self.involution[p_other] = p_root
                self.involution[p_root] = p_other
            elif p_root != h_root:
                self.involution[p_root] = p_root
                self.leaf_labels[p_root] = label_other
            elif p_other != other:
                self.involution[p_other] = p_other
                self.leaf_labels[p_other] = label_root
            else:
                self.strands.append((label_other, label_root))

    def key(self) -> Tuple[TermKey, int]:
        graph = BWGraph(cyclic_order=self.cyclic_order, involution=self.involution,
                        color=self.color, leaf_labels=self.leaf_labels)
        code, sign = canonical_form(OrientedBWGraph(graph, Orientation(tuple(self.ordering), self.sign)))
        return (code, tuple(sorted(self.strands))), sign


def _shifted(og: OrientedBWGraph, vertex_offset: int, half_offset: int) -> OrientedBWGraph:
    g = og.graph
    return relabel(og, {v: v + vertex_offset for v in g.vertices},
                   {h: h + half_offset for h in g.half_edges})


def _pieces(first: TermKey, second: TermKey) -> Tuple[OrientedBWGraph, OrientedBWGraph]:
    a = graph_from_code(first[0])
    b = graph_from_code(second[0])
    b = _shifted(b, len(a.graph.vertices), len(a.graph.half_edges))
    return a, b


# ----------------------------------------------------------------------------
# Constructors
# ----------------------------------------------------------------------------

@lru_cache(maxsize=None)
def identity(n: int) -> ForestMorphism:
    """Identity forest on n strands."""
    return ForestMorphism(n, n, {((), tuple((i, -i) for i in range(1, n + 1))): 1})


@lru_cache(maxsize=None)
def mk(k: int) -> ForestMorphism:
    """Corolla m_k: k -> 1 with orientation h_1^...^h_k^v^h_0.

    Raises:
        ArityError: If k < 2
    """
    if k < 2:
        raise ArityError(f"m_k needs k >= 2, got {k}")
    code, sign = canonical_form(corolla_graph(k))
    return ForestMorphism(k, 1, {(code, ()): sign})


@lru_cache(maxsize=None)
def unit_insertion(n: int, r: int) -> ForestMorphism:
    """Forest n -> n+1 inserting the unit as output r (1-based)."""
    if not 1 <= r <= n + 1:
        raise ArityError(f"unit position {r} out of range for {n} inputs")
    graph = BWGraph(cyclic_order={0: (0,)}, involution={0: 0}, color={0: UNIT}, leaf_labels={0: -r})
    og = OrientedBWGraph(graph, Orientation((('v', 0), ('h', 0)), 1))
    code, sign = canonical_form(og)
    strands = tuple((i, -(i if i < r else i + 1)) for i in range(1, n + 1))
    return ForestMorphism(n, n + 1, {(code, strands): sign})


def tensor(f: ForestMorphism, g: ForestMorphism) -> ForestMorphism:
    """Juxtapose f to the left of g; orientation o_f ^ o_g."""
    result: Combination = {}
    for (fk, fc), (gk, gc) in cartesian(f.terms.items(), g.terms.items()):
        a, b = _pieces(fk, gk)
        work = _Workspace()
        work.add_graph(a, a.graph.leaf_labels)
        shifted = {h: (lab + f.n_in if lab > 0 else lab - f.n_out) for h, lab in b.graph.leaf_labels.items()}
        work.add_graph(b, shifted)
        work.strands = list(fk[1]) + [(i + f.n_in, j - f.n_out) for i, j in gk[1]]
        key, sign = work.key()
        add_term(result, key, sign * fc * gc)
    return ForestMorphism(f.n_in + g.n_in, f.n_out + g.n_out, result)


def compose(f: ForestMorphism, g: ForestMorphism) -> ForestMorphism:
    """Run f, then g: root -j of f is glued to input j of g.

    Raises:
        ArityError: If f has a different number of roots than g has inputs
    """
    if f.n_out != g.n_in:
        raise ArityError(f"cannot compose {f.n_in}->{f.n_out} with {g.n_in}->{g.n_out}")
    result: Combination = {}
    for (fk, fc), (gk, gc) in cartesian(f.terms.items(), g.terms.items()):
        a, b = _pieces(fk, gk)
        work = _Workspace()
        work.add_graph(a, {h: lab for h, lab in a.graph.leaf_labels.items() if lab > 0})
        work.add_graph(b, {h: lab for h, lab in b.graph.leaf_labels.items() if lab < 0})
        roots = {-lab: h for h, lab in a.graph.leaf_labels.items() if lab < 0}
        inputs = {lab: h for h, lab in b.graph.leaf_labels.items() if lab > 0}
        strand_out = {-j: i for i, j in fk[1]}
        strand_in = {i: j for i, j in gk[1]}
        for j in range(1, f.n_out + 1):
            if j in roots and j in inputs:
                work.involution[roots[j]] = inputs[j]
                work.involution[inputs[j]] = roots[j]
            elif j in roots:
                work.leaf_labels[roots[j]] = strand_in[j]
            elif j in inputs:
                work.leaf_labels[inputs[j]] = strand_out[j]
            else:
                work.strands.append((strand_out[j], strand_in[j]))
        if not work.rewrite_units():
            continue
        key, sign = work.key()
        add_term(result, key, sign * fc * gc)
    return ForestMorphism(f.n_in, g.n_out, result)


def differential(f: ForestMorphism) -> ForestMorphism:
    """Sum of all blow-ups of every forest; strands are untouched."""
    result: Combination = {}
    for (code, strands), coeff in f.terms.items():
        for image, sign in blowups(graph_from_code(code)).items():
            add_term(result, (image, strands), coeff * sign)
    return ForestMorphism(f.n_in, f.n_out, result)


# ----------------------------------------------------------------------------
# f_{n,k}: the white-valence-k slice of d(l_n)
# ----------------------------------------------------------------------------

def _split_term(n: int, term) -> Tuple[int, int, ForestMorphism]:
    """Read (k, first block label, signed forest) off one blow-up of l_n."""
    g = term.graph.graph
    white = 0
    white_order = g.cyclic_order[white]
    start = white_order.index(g.start[white])
    from_start = white_order[start:] + white_order[:start]
    k = len(from_start)
    output = from_start.index(term.old_half) + 1
    block_labels = [g.leaf_labels[h] for h in term.block]
    strands = tuple(sorted((g.leaf_labels[h], -(i + 1)) for i, h in enumerate(from_start) if h != term.old_half))

    forest_order = tuple(term.block) + (term.new_half,)
    forest_orientation = [('h', h) for h in term.block] + [('v', term.new_vertex), ('h', term.new_half)]
    l_orientation = [('h', h) for h in from_start] + [('v', white)]
    epsilon = term.graph.orientation.relative_sign(Orientation(tuple(forest_orientation + l_orientation), 1))

    forest = BWGraph(cyclic_order={term.new_vertex: forest_order},
                     involution={h: h for h in forest_order},
                     leaf_labels={**{h: lab for h, lab in zip(term.block, block_labels)}, term.new_half: -output})
    code, sign = canonical_form(OrientedBWGraph(forest, Orientation(tuple(forest_orientation), epsilon)))
    return k, block_labels[0], ForestMorphism(n, k, {(code, strands): sign})


def _slices(n: int) -> Iterator[Tuple[int, int, ForestMorphism]]:
    if n < 2:
        return
    og = l_graph(n)
    for term in vertex_blowups(og, 0):
        yield _split_term(n, term)


@lru_cache(maxsize=None)
def f_nk(n: int, k: int) -> ForestMorphism:
    """The morphism f_{n,k}: n -> k, the sum of the terms m^i_{n,k}.

    Raises:
        ArityError: Unless 1 <= k < n
    """
    if not 1 <= k < n:
        raise ArityError(f"f_nk needs 1 <= k < n, got n={n}, k={k}")
    total = ForestMorphism(n, k)
    for arity, _, forest in _slices(n):
        if arity == k:
            total = total + forest
    logger.debug("Built f_%d,%d", n, k, extra={'terms': len(total.terms)})
    return total


@lru_cache(maxsize=None)
def m_i_nk(n: int, k: int, i: int) -> ForestMorphism:
    """The single signed term of f_{n,k} whose multiplied block starts at input i."""
    if not 1 <= k < n or not 1 <= i <= n:
        raise ArityError(f"m^i_n,k needs 1 <= k < n and 1 <= i <= n, got n={n}, k={k}, i={i}")
    for arity, first, forest in _slices(n):
        if arity == k and first == i:
            return forest
    raise ArityError(f"no term m^{i}_{n},{k}")  # pragma: no cover


def attach_to_l(f: ForestMorphism) -> Combination:
    """Glue the roots of f to the spokes of l_{n_out}: the graph f . l_k.

    Root -j is glued to the j-th spoke from the start; orientation o_f ^ o_l.
    """
    result: Combination = {}
    l_code, l_sign = canonical_form(l_graph(f.n_out))
    for key, coeff in f.terms.items():
        coeff *= l_sign
        a, b = _pieces(key, (l_code, ()))
        spokes = {lab: h for h, lab in b.graph.leaf_labels.items()}
        roots = {-lab: h for h, lab in a.graph.leaf_labels.items() if lab < 0}
        labels = {h: lab for h, lab in a.graph.leaf_labels.items() if lab > 0}
        involution = {**a.graph.involution, **b.graph.involution}
        for i, j in key[1]:
            labels[spokes[-j]] = i
        for j, h in roots.items():
            involution[h] = spokes[j]
            involution[spokes[j]] = h
        graph = BWGraph(cyclic_order={**a.graph.cyclic_order, **b.graph.cyclic_order},
                        involution=involution,
                        color={**a.graph.color, **b.graph.color},
                        white_labels=b.graph.white_labels,
                        start=b.graph.start,
                        leaf_labels=labels)
        og = OrientedBWGraph(graph, Orientation(a.orientation.ordering + b.orientation.ordering,
                                                a.orientation.sign * b.orientation.sign))
        for code, sign in canonical_combination([(og, coeff)]).items():
            add_term(result, code, sign)
    return result


# ----------------------------------------------------------------------------
# Enumeration and verification
# ----------------------------------------------------------------------------

def planar_trees(n: int) -> List[ForestMorphism]:
    """All planar trees n -> 1 with at least 2 inputs per vertex, as single terms."""
    if n == 1:
        return [identity(1)]
    trees = []
    for parts in _compositions(n):
        if len(parts) < 2:
            continue
        for choice in cartesian(*(planar_trees(p) for p in parts)):
            below = choice[0]
            for extra in choice[1:]:
                below = tensor(below, extra)
            trees.append(compose(below, mk(len(parts))))
    return trees


def planar_forests(n: int, m: int) -> List[ForestMorphism]:
    """All planar forests n -> m as single terms."""
    if m == 1:
        return planar_trees(n)
    forests = []
    for first in range(1, n - m + 2):
        for head in planar_trees(first):
            for tail in planar_forests(n - first, m - 1):
                forests.append(tensor(head, tail))
    return forests


def _compositions(n: int) -> Iterator[Tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for first in range(1, n + 1):
        for rest in _compositions(n - first):
            yield (first,) + rest


def verify_m3_identity(k: int = 3) -> VerificationReport:
    """Check d(m_3) = m_2(m_2 + id) - m_2(id + m_2).

    For k > 3 the blow-ups of m_k are compared with the sum over all
    two-vertex trees, each contributing with the sign of its own gluing.
    """
    d_mk = differential(mk(k))
    if k == 3:
        expected = (compose(tensor(mk(2), identity(1)), mk(2))
                    - compose(tensor(identity(1), mk(2)), mk(2)))
        passed = d_mk == expected
        witness = None if passed else (d_mk - expected).terms
        return VerificationReport('m3_identity', passed, len(d_mk.terms), witness,
                                  {'terms': len(d_mk.terms)})
    two_vertex = [t for t in planar_trees(k) if term_degree(next(iter(t.terms))) == k - 3]
    keys_match = {key for t in two_vertex for key in t.terms} == set(d_mk.terms)
    units = all(abs(c) == 1 for c in d_mk.terms.values())
    return VerificationReport(f'm{k}_blowups', keys_match and units, len(d_mk.terms),
                              None if keys_match else sorted(d_mk.terms), {'terms': len(d_mk.terms)})


def verify_l_squared(n_max: int) -> VerificationReport:
    """Check d(f_{n,j}) + sum_k (-1)^(n-k-1) f_{n,k} f_{k,j} = 0 for n <= n_max."""
    checked = 0
    for n in range(2, n_max + 1):
        for j in range(1, n):
            total = differential(f_nk(n, j))
            for k in range(j + 1, n):
                total = total + compose(f_nk(n, k), f_nk(k, j)).scaled((-1) ** (n - k - 1))
            checked += 1
            if not total.is_zero():
                return VerificationReport('l_squared', False, checked, (n, j), {'residual': len(total.terms)})
    return VerificationReport('l_squared', True, checked)
