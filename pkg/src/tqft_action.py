"""Action of Sullivan diagrams on Hochschild chains of a Frobenius algebra.

Evaluation is a state sum over the hub graph of a diagram. A hub (or a
plain edge between two spokes) whose boundary order is (b_1, ..., b_m)
contributes epsilon(v_1 ... v_m), where v_i is the input vector of a
labelled leaf or the dual basis element e^k when b_i meets a spoke that
outputs e_k. A leaf sitting directly on the circle passes its input
through. The output word is read around the circle from the start.

Letters are grouped by hub while the sum is formed; moving them into
spoke order (and the inputs from label order into hub order) costs the
Koszul sign of the permutation.
"""
from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from algebra import FrobeniusAlgebraSpec, Vector, Word, koszul_sign
from chain_complex import Combination, VerificationReport, add_into, add_term, class_order, is_boundary, scaled
from errors import ArityError
from graph_core import WHITE, BWGraph, OrientedBWGraph, l_graph
from hochschild import HochschildComplexSpec, build_hochschild, chain_degree, hochschild_boundary
from logger import get_logger
from sullivan import SullivanDiagram, from_bw, mu_graph, sd_differential, t_graph

logger = get_logger(__name__)

Slot = Tuple[str, int]


@dataclass(frozen=True)
class LabeledDiagram:
    """A diagram together with an input vector for each labelled leaf.

    Attributes:
        diagram: Trivalent representative of the diagram
        inputs: Leaf label -> sparse vector in the algebra
    """
    diagram: OrientedBWGraph
    inputs: Mapping[int, Vector] = field(default_factory=dict)

    def __post_init__(self):
        labels = {lab for lab in self.diagram.graph.leaf_labels.values() if lab}
        if labels != set(self.inputs):
            raise ArityError(f"inputs {sorted(self.inputs)} do not match leaf labels {sorted(labels)}")


def _circle(c: BWGraph) -> Tuple[int, Tuple[int, ...]]:
    whites = c.vertices_of_color(WHITE)
    if len(whites) != 1:
        raise ArityError(f"evaluation needs exactly one circle, got {len(whites)}")
    w = whites[0]
    order = c.cyclic_order[w]
    k = order.index(c.start[w])
    return w, order[k:] + order[:k]


def _components(c: BWGraph) -> Tuple[int, List[List[Slot]]]:
    """Number of spokes and the slot lists of every hub, edge and spoke leaf.

    A slot is ('spoke', position) or ('leaf', label).
    """
    w, spokes = _circle(c)
    position = {h: p for p, h in enumerate(spokes)}
    components: List[List[Slot]] = []
    for p, h in enumerate(spokes):
        partner = c.involution[h]
        if partner == h:
            components.append([('spoke', p), ('leaf', c.leaf_labels.get(h, 0))])
        elif c.source[partner] == w and p < position[partner]:
            components.append([('spoke', p), ('spoke', position[partner])])
    for v in c.vertices:
        if c.color_of(v) == WHITE:
            continue
        slots: List[Slot] = []
        for h in c.cyclic_order[v]:
            partner = c.involution[h]
            if partner == h:
                slots.append(('leaf', c.leaf_labels.get(h, 0)))
            elif c.source[partner] == w:
                slots.append(('spoke', position[partner]))
            else:
                raise ArityError("hubs must meet the circle or leaves only")
        components.append(slots)
    return len(spokes), components


def _leaf_passthrough(slots: Sequence[Slot]) -> bool:
    return len(slots) == 2 and slots[0][0] == 'spoke' and slots[1][0] == 'leaf'


def _component_table(algebra: FrobeniusAlgebraSpec, slots: Sequence[Slot],
                     inputs: Mapping[int, Vector]) -> Dict[Tuple[Word, Word], int]:
    """(spoke letters, input letters) -> coefficient for one component."""
    if _leaf_passthrough(slots):
        return {((a,), (a,)): c for a, c in inputs[slots[1][1]].items() if c}
    choices = []
    for kind, value in slots:
        if kind == 'spoke':
            choices.append([(k, algebra.dual_basis(k), 1) for k in range(algebra.dim)])
        else:
            choices.append([(a, {a: 1}, c) for a, c in inputs[value].items() if c])
    table: Dict[Tuple[Word, Word], int] = {}
    for picks in cartesian(*choices):
        product: Vector = {algebra.unit_index: 1} if algebra.unit_index is not None else dict(
            enumerate(algebra.unit))
        coeff = 1
        for _, vector, c in picks:
            product = algebra.multiply_vectors(product, vector)
            coeff *= c
        value = sum(algebra.counit[i] * a for i, a in product.items())
        if not value:
            continue
        spoke_letters = tuple(letter for (kind, _), (letter, _, _) in zip(slots, picks) if kind == 'spoke')
        input_letters = tuple(letter for (kind, _), (letter, _, _) in zip(slots, picks) if kind == 'leaf')
        add_term(table, (spoke_letters, input_letters), value * coeff)
    return table


def state_sum(algebra: FrobeniusAlgebraSpec, diagram: SullivanDiagram, inputs: Mapping[int, Vector],
              reduced: bool = False) -> Combination:
    """Output chain of one normal form on the given leaf inputs.

    Args:
        algebra: Symmetric Frobenius algebra
        diagram: Normal form with exactly one circle
        inputs: Leaf label -> sparse vector
        reduced: Drop words with the unit after the first position

    Raises:
        ArityError: If the diagram has several circles or inputs are missing
    """
    c = diagram.hub_graph()
    n_spokes, components = _components(c)
    labels = sorted({value for comp in components for kind, value in comp if kind == 'leaf'})
    if labels != sorted(inputs):
        raise ArityError(f"inputs {sorted(inputs)} do not match leaf labels {labels}")
    spoke_order = [value for comp in components for kind, value in comp if kind == 'spoke']
    leaf_order = [labels.index(value) for comp in components for kind, value in comp if kind == 'leaf']
    spoke_perm = [spoke_order.index(p) for p in range(n_spokes)]
    tables = [_component_table(algebra, comp, inputs) for comp in components]
    unit = algebra.unit_index
    result: Combination = {}
    for entries in cartesian(*(table.items() for table in tables)):
        grouped_spokes = tuple(letter for (spokes, _), _ in entries for letter in spokes)
        grouped_inputs = tuple(letter for (_, ins), _ in entries for letter in ins)
        word = tuple(grouped_spokes[i] for i in spoke_perm)
        if reduced and unit is not None and unit in word[1:]:
            continue
        coeff = 1
        for _, c_entry in entries:
            coeff *= c_entry
        sign = koszul_sign(spoke_perm, [algebra.degrees[a] for a in grouped_spokes])
        input_degrees = [0] * len(labels)
        for rank, letter in zip(leaf_order, grouped_inputs):
            input_degrees[rank] = algebra.degrees[letter]
        sign *= koszul_sign(leaf_order, input_degrees)
        add_term(result, word, sign * coeff)
    logger.debug("Evaluated state sum", extra={'algebra': algebra.name, 'spokes': n_spokes,
                                               'terms': len(result)})
    return result


def evaluate_combination(algebra: FrobeniusAlgebraSpec, combo: Mapping[SullivanDiagram, int],
                         inputs: Mapping[int, Vector], reduced: bool = False) -> Combination:
    """Linear extension of :func:`state_sum`."""
    result: Combination = {}
    for diagram, coeff in combo.items():
        add_into(result, state_sum(algebra, diagram, inputs, reduced), coeff)
    return result


def evaluate(labeled: LabeledDiagram, algebra: FrobeniusAlgebraSpec, reduced: bool = False) -> Combination:
    """Hochschild chain produced by a labelled diagram.

    The representative is normalized first; its sign against the normal
    form multiplies the state sum.

    Examples:
        >>> x = {1: 1}
        >>> evaluate(LabeledDiagram(t_graph(1), {1: x}), builtin('dual'), reduced=True)
        {(0, 1, 1, 1): 1}
    """
    return evaluate_combination(algebra, from_bw(labeled.diagram), labeled.inputs, reduced)


# ----------------------------------------------------------------------------
# Reports
# ----------------------------------------------------------------------------

def _generator(algebra: FrobeniusAlgebraSpec) -> int:
    if 'x' in algebra.basis:
        return algebra.basis.index('x')
    others = [i for i in range(algebra.dim) if i != algebra.unit_index]
    if not others:
        raise ArityError(f"algebra {algebra.name!r} has no non-unit basis element")
    return others[-1]


def class_record(algebra: FrobeniusAlgebraSpec, chain: Combination) -> Dict[str, object]:
    length = max((len(word) for word in chain), default=1)
    complex_ = build_hochschild(HochschildComplexSpec(algebra, n_max=length + 1, reduced=True))
    if not chain:
        return {'cycle': True, 'order': 1, 'nonzero_Z': False, 'nonzero_Q': False}
    degree = chain_degree(algebra, next(iter(chain)))
    cycle = not complex_.differential(degree, chain)
    if not cycle:
        return {'cycle': False, 'degree': degree}
    order = class_order(complex_, degree, chain)
    return {
        'cycle': True,
        'degree': degree,
        'order': order,
        'nonzero_Z': order != 1,
        'nonzero_Q': not is_boundary(complex_, degree, chain, 'Q'),
    }


def homology_action_report(algebra: FrobeniusAlgebraSpec, g_max: int) -> VerificationReport:
    """Evaluate t_g on x for g = 1..g_max and check the output is a nonzero class.

    The class must be nonzero over Z and over Q in the reduced complex, and
    the chain must be 1 (x) x (x) ... (x) x up to sign.
    """
    x = _generator(algebra)
    unit = algebra.unit_index
    details: Dict[str, object] = {}
    witness = None
    for g in range(1, g_max + 1):
        chain = evaluate(LabeledDiagram(t_graph(g), {1: {x: 1}}), algebra, reduced=True)
        expected_word = (unit,) + (x,) * (2 * g + 1)
        record = class_record(algebra, chain)
        record['chain'] = algebra.format_combination(chain)
        record['shape_ok'] = set(chain) == {expected_word} and abs(chain[expected_word]) == 1
        details[f't_{g}'] = record
        ok = record['shape_ok'] and record['cycle'] and record.get('nonzero_Z') and record.get('nonzero_Q')
        if not ok and witness is None:
            witness = ('t', g)
    logger.info("Checked t_g action", extra={'algebra': algebra.name, 'g_max': g_max, 'passed': witness is None})
    return VerificationReport(f'tqft_action:t:{algebra.name}', witness is None, g_max, witness, details)


def mu_action_report(algebra: FrobeniusAlgebraSpec, g_max: int) -> VerificationReport:
    """Evaluate mu_g on x (x) ... (x) x (g+1 inputs) and check for a nonzero class."""
    x = _generator(algebra)
    details: Dict[str, object] = {}
    witness = None
    for g in range(1, g_max + 1):
        inputs = {label: {x: 1} for label in range(1, g + 2)}
        chain = evaluate(LabeledDiagram(mu_graph(g), inputs), algebra, reduced=True)
        record = class_record(algebra, chain)
        record['chain'] = algebra.format_combination(chain)
        details[f'mu_{g}'] = record
        if not (record['cycle'] and record.get('nonzero_Z') and record.get('nonzero_Q')) and witness is None:
            witness = ('mu', g)
    return VerificationReport(f'tqft_action:mu:{algebra.name}', witness is None, g_max, witness, details)


def _small_diagrams(g_max: int) -> Iterable[Tuple[str, OrientedBWGraph]]:
    for n in (2, 3):
        yield f'l_{n}', l_graph(n)
    for g in range(1, g_max + 1):
        yield f'mu_{g}', mu_graph(g)
        yield f't_{g}', t_graph(g)


def chain_map_report(algebra: FrobeniusAlgebraSpec, g_max: int = 1,
                     inputs: Optional[Mapping[int, Vector]] = None) -> VerificationReport:
    """Compare evaluate(d G) with the Hochschild boundary of evaluate(G).

    Inputs are length-one chains, which are cycles, so a chain-map action
    makes the two agree up to one global sign. Both signs are tried and the
    matching one is recorded per diagram. The report is informational:
    ``passed`` says whether every diagram matched with some sign.
    """
    x = _generator(algebra)
    details: Dict[str, object] = {}
    witness = None
    checked = 0
    for name, og in _small_diagrams(g_max):
        labels = sorted(lab for lab in og.graph.leaf_labels.values() if lab)
        leaf_inputs = {lab: dict((inputs or {}).get(lab, {x: 1})) for lab in labels}
        combo = from_bw(og)
        lhs = evaluate_combination(algebra, sd_differential(combo), leaf_inputs)
        rhs = hochschild_boundary(algebra, evaluate_combination(algebra, combo, leaf_inputs))
        matching = [s for s in (1, -1) if _equal(lhs, scaled(rhs, s))]
        details[name] = {'sign': matching[0] if matching else None,
                         'lhs': algebra.format_combination(lhs), 'rhs': algebra.format_combination(rhs)}
        checked += 1
        if not matching and witness is None:
            witness = name
    if witness is not None:
        logger.warning("State sum is not a chain map on a small diagram",
                       extra={'algebra': algebra.name, 'diagram': witness})
    return VerificationReport(f'tqft_action:chain_map:{algebra.name}', witness is None, checked, witness, details)


def _equal(a: Mapping[Word, int], b: Mapping[Word, int]) -> bool:
    difference: Combination = dict(a)
    add_into(difference, b, -1)
    return not difference
