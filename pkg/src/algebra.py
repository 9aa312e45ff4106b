"""Finite graded symmetric Frobenius algebras given by structure constants.

Degrees are homological: the cohomology class x of H*(S^n) sits in
degree -n. Tensors are combinations of words, a word being a tuple of
basis indices.
"""
import json
from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import sympy

from chain_complex import Combination, VerificationReport, add_term
from errors import AlgebraAxiomError, ArityError, ShapeError
from graph_core import UNIT, graph_from_code, reorder_sign
from logger import get_logger

logger = get_logger(__name__)

Word = Tuple[int, ...]
Vector = Dict[int, int]


@dataclass(frozen=True)
class FrobeniusAlgebraSpec:  # pylint: disable=too-many-instance-attributes
    """Structure constants of a graded Frobenius algebra.

    Attributes:
        name: Display name
        basis: Basis element names; index 0 is not assumed to be the unit
        degrees: Homological degree of each basis element
        unit: Coefficients of the unit
        product: product[i][j][k] is the coefficient of e_k in e_i e_j
        counit: counit[i] is epsilon(e_i)
        coproduct: coproduct[i][j][k] is the coefficient of e_j (x) e_k in nu(e_i)
        differential: differential[i][j] is the coefficient of e_j in d(e_i)
    """
    name: str
    basis: Tuple[str, ...]
    degrees: Tuple[int, ...]
    unit: Tuple[int, ...]
    product: Tuple[Tuple[Tuple[int, ...], ...], ...]
    counit: Tuple[int, ...]
    coproduct: Tuple[Tuple[Tuple[int, ...], ...], ...]
    differential: Optional[Tuple[Tuple[int, ...], ...]] = None
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        n = len(self.basis)
        shapes = {
            'degrees': len(self.degrees) == n,
            'unit': len(self.unit) == n,
            'counit': len(self.counit) == n,
            'product': _is_cube(self.product, n),
            'coproduct': _is_cube(self.coproduct, n),
            'differential': self.differential is None or (
                len(self.differential) == n and all(len(row) == n for row in self.differential)),
        }
        bad = [name for name, ok in shapes.items() if not ok]
        if bad:
            raise ShapeError(f"algebra {self.name!r} has malformed fields: {', '.join(bad)}")

    @property
    def dim(self) -> int:
        """Rank of the underlying free module."""
        return len(self.basis)

    @property
    def unit_index(self) -> Optional[int]:
        """Index of the unit when it is a basis element."""
        support = [i for i, c in enumerate(self.unit) if c]
        if len(support) == 1 and self.unit[support[0]] == 1:
            return support[0]
        return None

    def multiply(self, i: int, j: int) -> Vector:
        """e_i e_j as a sparse vector."""
        return {k: c for k, c in enumerate(self.product[i][j]) if c}

    def multiply_vectors(self, a: Mapping[int, int], b: Mapping[int, int]) -> Vector:
        """Bilinear product of sparse vectors."""
        result: Vector = {}
        for (i, ca), (j, cb) in cartesian(a.items(), b.items()):
            for k, c in self.multiply(i, j).items():
                add_term(result, k, ca * cb * c)
        return result

    def d_internal(self, i: int) -> Vector:
        """Internal differential of e_i."""
        if self.differential is None:
            return {}
        return {j: c for j, c in enumerate(self.differential[i]) if c}

    def has_differential(self) -> bool:
        """Whether the internal differential is nonzero."""
        return self.differential is not None and any(any(row) for row in self.differential)

    def word_degree(self, word: Sequence[int]) -> int:
        """Sum of the degrees of the letters."""
        return sum(self.degrees[i] for i in word)

    def pairing(self) -> List[List[int]]:
        """Matrix of epsilon(e_i e_j)."""
        return [[sum(self.product[i][j][k] * self.counit[k] for k in range(self.dim))
                 for j in range(self.dim)] for i in range(self.dim)]

    def copairing(self) -> List[List[int]]:
        """Inverse of the pairing matrix.

        Raises:
            AlgebraAxiomError: If the pairing is not invertible over Z
        """
        if 'copairing' not in self._cache:
            matrix = sympy.Matrix(self.pairing())
            if matrix.det() not in (1, -1):
                raise AlgebraAxiomError('non-degenerate pairing', (int(matrix.det()),))
            inverse = matrix.inv()
            self._cache['copairing'] = [[int(inverse[i, j]) for j in range(self.dim)] for i in range(self.dim)]
        return self._cache['copairing']

    def dual_basis(self, j: int) -> Vector:
        """The element e^j with epsilon(e_i e^j) = delta_ij."""
        inverse = self.copairing()
        return {i: inverse[i][j] for i in range(self.dim) if inverse[i][j]}

    def coproduct_of(self, i: int) -> Dict[Tuple[int, int], int]:
        """nu(e_i) as pairs (j, k) -> coefficient."""
        return {(j, k): c for j, row in enumerate(self.coproduct[i]) for k, c in enumerate(row) if c}

    def coproduct_degree(self) -> int:
        """Degree of the coproduct (0 when it vanishes)."""
        for i in range(self.dim):
            for (j, k) in self.coproduct_of(i):
                return self.degrees[j] + self.degrees[k] - self.degrees[i]
        return 0

    def format_word(self, word: Sequence[int]) -> str:
        """Render a word as ``a (x) b (x) ...`` using basis names."""
        return '⊗'.join(self.basis[i] for i in word)

    def format_combination(self, combo: Mapping[Word, int]) -> str:
        """Render a tensor combination."""
        if not combo:
            return '0'
        parts = []
        for word, coeff in sorted(combo.items()):
            text = self.format_word(word)
            parts.append(text if coeff == 1 else f'-{text}' if coeff == -1 else f'{coeff}*{text}')
        return ' + '.join(parts).replace('+ -', '- ')


def _is_cube(tensor, n: int) -> bool:
    return len(tensor) == n and all(len(row) == n and all(len(col) == n for col in row) for row in tensor)


@dataclass(frozen=True)
class TensorElement:
    """Combination of words of basis elements of one algebra.

    Attributes:
        algebra: The algebra whose basis indexes the words
        terms: word -> coefficient
    """
    algebra: FrobeniusAlgebraSpec
    terms: Mapping[Word, int]

    def __post_init__(self):
        object.__setattr__(self, 'terms', {w: c for w, c in self.terms.items() if c})
        degrees = {self.algebra.word_degree(w) + len(w) - 1 for w in self.terms}
        if len(degrees) > 1:
            raise ShapeError(f"tensor mixes homological degrees {sorted(degrees)}")

    @classmethod
    def from_names(cls, algebra: FrobeniusAlgebraSpec, *names: str) -> 'TensorElement':
        """Single word from basis names, e.g. ``from_names(A, '1', 'x')``."""
        index = {name: i for i, name in enumerate(algebra.basis)}
        try:
            word = tuple(index[name] for name in names)
        except KeyError as exc:
            raise ShapeError(f"unknown basis element {exc.args[0]!r}") from exc
        return cls(algebra, {word: 1})

    @property
    def degree(self) -> Optional[int]:
        """Hochschild degree (length - 1 + internal degree)."""
        for word in self.terms:
            return len(word) - 1 + self.algebra.word_degree(word)
        return None

    def __str__(self):
        return self.algebra.format_combination(self.terms)


# ----------------------------------------------------------------------------
# Built-in algebras
# ----------------------------------------------------------------------------

def _from_constants(name: str, basis, degrees, unit, products: Mapping[Tuple[int, int], Vector],
                    counit) -> FrobeniusAlgebraSpec:
    """Assemble an algebra, deriving the coproduct from the pairing."""
    n = len(basis)
    product = tuple(tuple(tuple(products.get((i, j), {}).get(k, 0) for k in range(n))
                          for j in range(n)) for i in range(n))
    bare = FrobeniusAlgebraSpec(name, tuple(basis), tuple(degrees), tuple(unit), product, tuple(counit),
                                tuple(tuple(tuple(0 for _ in range(n)) for _ in range(n)) for _ in range(n)))
    coproduct = tuple(tuple(tuple(c) for c in rows) for rows in _adjoint_coproduct(bare))
    spec = FrobeniusAlgebraSpec(name, tuple(basis), tuple(degrees), tuple(unit), product, tuple(counit), coproduct)
    validate(spec)
    return spec


def _adjoint_coproduct(algebra: FrobeniusAlgebraSpec) -> List[List[List[int]]]:
    """nu(e_i) = sum_{j,k} g^{jk} (e_i e_j) (x) e_k."""
    n = algebra.dim
    inverse = algebra.copairing()
    result = [[[0] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if not inverse[j][k]:
                    continue
                for a, c in algebra.multiply(i, j).items():
                    result[i][a][k] += inverse[j][k] * c
    return result


def builtin_dual_numbers() -> FrobeniusAlgebraSpec:
    """Z[x]/(x^2) in degree 0 with epsilon(1) = 0, epsilon(x) = 1.

    The coproduct is nu(1) = 1 (x) x + x (x) 1 and nu(x) = x (x) x.
    """
    return _from_constants(
        'dual', ('1', 'x'), (0, 0), (1, 0),
        {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}},
        (0, 1),
    )


def builtin_sphere_cohomology(n: int) -> FrobeniusAlgebraSpec:
    """H*(S^n) with x in homological degree -n.

    Raises:
        ShapeError: If n < 2
    """
    if n < 2:
        raise ShapeError(f"sphere dimension must be at least 2, got {n}")
    return _from_constants(
        f'sphere{n}', ('1', 'x'), (0, -n), (1, 0),
        {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}},
        (0, 1),
    )


def builtin(name: str) -> FrobeniusAlgebraSpec:
    """Look up a built-in algebra: ``dual`` or ``sphereN``.

    Raises:
        ShapeError: For an unknown name
    """
    if name == 'dual':
        return builtin_dual_numbers()
    if name.startswith('sphere') and name[len('sphere'):].isdigit():
        return builtin_sphere_cohomology(int(name[len('sphere'):]))
    raise ShapeError(f"unknown built-in algebra {name!r}")


# ----------------------------------------------------------------------------
# Axioms
# ----------------------------------------------------------------------------

def _axiom_failures(algebra: FrobeniusAlgebraSpec):
    n = algebra.dim
    deg = algebra.degrees
    unit = {i: c for i, c in enumerate(algebra.unit) if c}
    for i in range(n):
        if algebra.multiply_vectors(unit, {i: 1}) != {i: 1} or algebra.multiply_vectors({i: 1}, unit) != {i: 1}:
            yield 'unit', (i,)
    for i, j in cartesian(range(n), repeat=2):
        for k in algebra.multiply(i, j):
            if deg[k] != deg[i] + deg[j]:
                yield 'product degree', (i, j, k)
    for i, j, k in cartesian(range(n), repeat=3):
        left = algebra.multiply_vectors(algebra.multiply(i, j), {k: 1})
        right = algebra.multiply_vectors({i: 1}, algebra.multiply(j, k))
        if left != right:
            yield 'associativity', (i, j, k)
    pairing = algebra.pairing()
    for i, j in cartesian(range(n), repeat=2):
        if pairing[i][j] != parity_sign(deg[i] * deg[j]) * pairing[j][i]:
            yield 'symmetry', (i, j)
    if sympy.Matrix(pairing).det() not in (1, -1):
        yield 'non-degenerate pairing', ()
        return
    expected = _adjoint_coproduct(algebra)
    for i in range(n):
        if [list(row) for row in algebra.coproduct[i]] != expected[i]:
            yield 'coproduct adjointness', (i,)
    shifts = {deg[j] + deg[k] - deg[i] for i in range(n) for (j, k) in algebra.coproduct_of(i)}
    if len(shifts) > 1:
        yield 'coproduct degree', tuple(sorted(shifts))
    if algebra.differential is not None:
        for i in range(n):
            if any(deg[j] != deg[i] - 1 for j in algebra.d_internal(i)):
                yield 'differential degree', (i,)
            square: Vector = {}
            for j, c in algebra.d_internal(i).items():
                for k, c2 in algebra.d_internal(j).items():
                    add_term(square, k, c * c2)
            if square:
                yield 'differential square', (i,)


def verify_frobenius(algebra: FrobeniusAlgebraSpec) -> VerificationReport:
    """Check unit, associativity, symmetry, non-degeneracy and adjointness."""
    failures = list(_axiom_failures(algebra))
    checked = algebra.dim ** 3
    if failures:
        axiom, witness = failures[0]
        return VerificationReport(f'frobenius:{algebra.name}', False, checked, witness, {'axiom': axiom})
    return VerificationReport(f'frobenius:{algebra.name}', True, checked)


def validate(algebra: FrobeniusAlgebraSpec) -> None:
    """Raise on the first failing axiom.

    Raises:
        AlgebraAxiomError: Naming the axiom and a witness
    """
    for axiom, witness in _axiom_failures(algebra):
        raise AlgebraAxiomError(axiom, witness)


def from_json(text: str) -> FrobeniusAlgebraSpec:
    """Load an algebra from JSON and validate it.

    The coproduct may be omitted, in which case it is derived from the
    pairing.

    Raises:
        ShapeError: On malformed fields
        AlgebraAxiomError: On a failing axiom
    """
    data = json.loads(text)
    try:
        basis = tuple(data['basis'])
        fields = dict(
            name=data.get('name', 'custom'),
            basis=basis,
            degrees=tuple(data['degree']),
            unit=tuple(data['unit']),
            product=_freeze(data['product']),
            counit=tuple(data['counit']),
        )
    except KeyError as exc:
        raise ShapeError(f"algebra JSON is missing field {exc.args[0]!r}") from exc
    n = len(basis)
    zero = tuple(tuple(tuple(0 for _ in range(n)) for _ in range(n)) for _ in range(n))
    differential = _freeze(data['differential']) if data.get('differential') else None
    spec = FrobeniusAlgebraSpec(coproduct=zero, differential=differential, **fields)
    coproduct = _freeze(data['coproduct']) if 'coproduct' in data else _freeze(_adjoint_coproduct(spec))
    spec = FrobeniusAlgebraSpec(coproduct=coproduct, differential=differential, **fields)
    validate(spec)
    return spec


def to_json(algebra: FrobeniusAlgebraSpec) -> str:
    """Serialize to the JSON algebra format."""
    data = {
        'name': algebra.name,
        'basis': list(algebra.basis),
        'degree': list(algebra.degrees),
        'unit': list(algebra.unit),
        'product': algebra.product,
        'counit': list(algebra.counit),
        'coproduct': algebra.coproduct,
    }
    if algebra.differential is not None:
        data['differential'] = algebra.differential
    return json.dumps(data, sort_keys=True)


def _freeze(value):
    if isinstance(value, (list, tuple)):
        return tuple(_freeze(v) for v in value)
    return value


# ----------------------------------------------------------------------------
# Signs and forest evaluation
# ----------------------------------------------------------------------------

def parity_sign(exponent: int) -> int:
    """(-1)^exponent as an int, for negative exponents too."""
    return -1 if exponent % 2 else 1


def koszul_sign(perm: Sequence[int], degrees: Sequence[int]) -> int:
    """Sign of reordering graded elements.

    Args:
        perm: perm[p] is the original index of the element placed at position p
        degrees: Degree of each element, indexed by original position

    Returns:
        Product of (-1)^(|a||b|) over pairs whose relative order is inverted

    Raises:
        ShapeError: If the lengths differ
    """
    if len(perm) != len(degrees) or sorted(perm) != list(range(len(perm))):
        raise ShapeError("koszul_sign needs a permutation matching the degree list")
    exponent = 0
    for a in range(len(perm)):
        for b in range(a + 1, len(perm)):
            if perm[a] > perm[b]:
                exponent += degrees[perm[a]] * degrees[perm[b]]
    return -1 if exponent % 2 else 1


class _Forest:  # pylint: disable=too-few-public-methods
    """Tree structure of one canonical forest, read off its graph."""

    def __init__(self, code, strands, n_out: int):
        og = graph_from_code(code)
        self.graph = og.graph
        self.ordering = og.orientation.ordering
        self.strands = {-j: i for i, j in strands}
        self.roots = {-lab: h for h, lab in self.graph.leaf_labels.items() if lab < 0}
        self.n_out = n_out
        self.blocks: List[Tuple[str, int]] = []
        self.vanishes = False
        self.planar: List[int] = []
        self.tree_inputs: Dict[int, List[int]] = {}
        for j in range(1, n_out + 1):
            if j in self.strands:
                self.tree_inputs[j] = [self.strands[j]]
            elif j in self.roots:
                labels: List[int] = []
                self._walk(self.roots[j], labels)
                self.tree_inputs[j] = labels
            else:
                raise ArityError(f"forest has no output {j}")
            self.planar.extend(self.tree_inputs[j])

    def _walk(self, out_half: int, labels: List[int]) -> None:
        g = self.graph
        v = g.source[out_half]
        order = g.cyclic_order[v]
        k = order.index(out_half)
        inputs = order[k + 1:] + order[:k]
        if g.color_of(v) == UNIT:
            self.blocks.extend([('v', v), ('h', out_half)])
            return
        if len(order) != 3:
            self.vanishes = True
        self.blocks.extend([('h', h) for h in inputs] + [('v', v), ('h', out_half)])
        for h in inputs:
            partner = g.involution[h]
            if partner == h:
                labels.append(g.leaf_labels[h])
            else:
                self._walk(partner, labels)

    def orientation_sign(self) -> int:
        return reorder_sign(self.ordering, self.blocks)

    def evaluate_tree(self, algebra: FrobeniusAlgebraSpec, j: int, values: Mapping[int, Vector]) -> Vector:
        if j in self.strands:
            return dict(values[self.strands[j]])
        return self._value(algebra, self.roots[j], values)

    def _value(self, algebra: FrobeniusAlgebraSpec, out_half: int, values: Mapping[int, Vector]) -> Vector:
        g = self.graph
        v = g.source[out_half]
        if g.color_of(v) == UNIT:
            return {i: c for i, c in enumerate(algebra.unit) if c}
        order = g.cyclic_order[v]
        k = order.index(out_half)
        inputs = order[k + 1:] + order[:k]
        parts = []
        for h in inputs:
            partner = g.involution[h]
            parts.append(dict(values[g.leaf_labels[h]]) if partner == h else self._value(algebra, partner, values))
        result = parts[0]
        for part in parts[1:]:
            result = algebra.multiply_vectors(result, part)
        return result


def _expand(vectors: Sequence[Mapping[int, int]]) -> Dict[Word, int]:
    result: Dict[Word, int] = {}
    for choice in cartesian(*(sorted(vec.items()) for vec in vectors)):
        coeff = 1
        for _, c in choice:
            coeff *= c
        add_term(result, tuple(i for i, _ in choice), coeff)
    return result


def apply_forest(algebra: FrobeniusAlgebraSpec, forest, tensor: Mapping[Word, int]) -> Combination:
    """Evaluate a forest morphism on a tensor (right action).

    Inputs are Koszul-reordered into the planar order of the forest, binary
    vertices multiply, unit vertices insert the unit and vertices of
    valence four or more vanish (strict algebras have no higher products).
    Each forest contributes the sign of its orientation against the
    product of its vertex blocks ``inputs ^ v ^ out``.

    Raises:
        ArityError: If a word's length differs from the forest's inputs
    """
    result: Combination = {}
    for (code, strands), coeff in forest.terms.items():
        shape = _Forest(code, strands, forest.n_out)
        if shape.vanishes:
            continue
        orientation = shape.orientation_sign()
        perm = [label - 1 for label in shape.planar]
        for word, t_coeff in tensor.items():
            if len(word) != forest.n_in:
                raise ArityError(f"forest takes {forest.n_in} inputs, word has {len(word)}")
            sign = koszul_sign(perm, [algebra.degrees[i] for i in word])
            values = {label: {word[label - 1]: 1} for label in range(1, forest.n_in + 1)}
            outputs = [shape.evaluate_tree(algebra, j, values) for j in range(1, forest.n_out + 1)]
            for out_word, c in _expand(outputs).items():
                add_term(result, out_word, coeff * t_coeff * sign * orientation * c)
    return result


def apply_forest_op(algebra: FrobeniusAlgebraSpec, forest, tensor: Mapping[Word, int]) -> Combination:
    """Evaluate a forest backwards through the coalgebra structure.

    Each root takes one letter of the word; binary vertices apply the
    coproduct, unit vertices the counit. The outputs land on the input
    labels of the forest.

    Raises:
        ArityError: If a word's length differs from the forest's roots
        ShapeError: For algebras with odd-degree elements
    """
    if any(d % 2 for d in algebra.degrees):
        raise ShapeError("dual evaluation is only available for evenly graded algebras")
    result: Combination = {}
    for (code, strands), coeff in forest.terms.items():
        shape = _Forest(code, strands, forest.n_out)
        if shape.vanishes:
            continue
        orientation = shape.orientation_sign()
        for word, t_coeff in tensor.items():
            if len(word) != forest.n_out:
                raise ArityError(f"forest has {forest.n_out} roots, word has {len(word)}")
            partial: Dict[Tuple[Tuple[int, int], ...], int] = {(): 1}
            for j in range(1, forest.n_out + 1):
                letter = word[j - 1]
                if j in shape.strands:
                    branches = {((shape.strands[j], letter),): 1}
                else:
                    branches = _co_value(algebra, shape.graph, shape.roots[j], letter)
                partial = {prev + extra: c1 * c2 for prev, c1 in partial.items()
                           for extra, c2 in branches.items()}
            for assignment, c in partial.items():
                if not c:
                    continue
                letters = dict(assignment)
                out_word = tuple(letters[label] for label in range(1, forest.n_in + 1))
                add_term(result, out_word, coeff * t_coeff * orientation * c)
    return result


def _co_value(algebra: FrobeniusAlgebraSpec, g, out_half: int, letter: int) -> Dict[Tuple[Tuple[int, int], ...], int]:
    """Spread one letter down a tree: assignments (input label, letter) -> coefficient."""
    v = g.source[out_half]
    if g.color_of(v) == UNIT:
        c = algebra.counit[letter]
        return {(): c} if c else {}
    order = g.cyclic_order[v]
    k = order.index(out_half)
    left, right = order[k + 1:] + order[:k]
    result: Dict[Tuple[Tuple[int, int], ...], int] = {}
    for (a, b), c in algebra.coproduct_of(letter).items():
        lefts = _leaf_or_tree(algebra, g, left, a)
        rights = _leaf_or_tree(algebra, g, right, b)
        for la, ca in lefts.items():
            for rb, cb in rights.items():
                add_term(result, la + rb, c * ca * cb)
    return result


def _leaf_or_tree(algebra: FrobeniusAlgebraSpec, g, h: int, letter: int):
    partner = g.involution[h]
    if partner == h:
        return {((g.leaf_labels[h], letter),): 1}
    return _co_value(algebra, g, partner, letter)

