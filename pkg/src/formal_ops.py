"""Truncated complex of formal operations on Hochschild chains.

An element is a family of linear maps g_j: A^(x)j -> sum_k A^(x)k. A basis
element (j, k, v, w) sends the word v of length j to the word w of length
k and every other word of length j to zero; its degree is
|w| - |v| + k - j.

The differential on the j-component is

    d(g)_j = (-1)^(j-1) ( d_E(g_j)
                          + sum_k (-1)^|g_{j,k}| f_{k,k'} o g_{j,k}
                          - sum_{j' < j} g_{j'} o f_{j,j'} )

which on a chain a reads (-1)^|a| (d(g(a)) - g(d a)). Inputs are cut off
at J (a quotient) and outputs at K (a subcomplex).
"""
import random
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Tuple

from ainfty import f_nk
from algebra import FrobeniusAlgebraSpec, Word, apply_forest, parity_sign
from chain_complex import Combination, FreeChainComplex, VerificationReport, add_into, add_term, assemble
from errors import ShapeError
from hochschild import CochainKey, cap, cochain_differential, internal_boundary, verify_cap_identity, words
from logger import get_logger

logger = get_logger(__name__)

NatKey = Tuple[int, int, Word, Word]


@dataclass
class NatTruncation:
    """Bounds of the truncated complex together with cached f-images.

    Attributes:
        algebra: Coefficient algebra
        j_max: Largest input arity J
        k_max: Largest output arity K
        flip_global_sign: Drop the (-1)^(j-1) factor (for sensitivity checks)
    """
    algebra: FrobeniusAlgebraSpec
    j_max: int = 6
    k_max: int = 6
    flip_global_sign: bool = False
    _f_images: Dict[Word, Combination] = field(default_factory=dict, repr=False)
    _f_preimages: Dict[Word, List[Tuple[Word, int]]] = field(default=None, repr=False)
    _d_preimages: Dict[Word, List[Tuple[Word, int]]] = field(default=None, repr=False)

    def __post_init__(self):
        if self.j_max < 1 or self.k_max < 1:
            raise ShapeError(f"truncation bounds must be positive, got J={self.j_max}, K={self.k_max}")

    def input_words(self) -> Iterable[Word]:
        """Words of length 1..J."""
        for j in range(1, self.j_max + 1):
            yield from words(self.algebra.dim, j)

    def keys(self) -> List[NatKey]:
        """Every basis element of the truncation."""
        return [(len(v), k, v, w) for v in self.input_words()
                for k in range(1, self.k_max + 1) for w in words(self.algebra.dim, k)]

    def degree(self, key: NatKey) -> int:
        """|w| - |v| + k - j."""
        j, k, v, w = key
        return self.algebra.word_degree(w) - self.algebra.word_degree(v) + k - j

    def f_image(self, word: Word) -> Combination:
        """sum_{k < n} f_{n,k}(word), unsigned."""
        if word not in self._f_images:
            n = len(word)
            image: Combination = {}
            for k in range(1, n):
                add_into(image, apply_forest(self.algebra, f_nk(n, k), {word: 1}))
            self._f_images[word] = image
        return self._f_images[word]

    def _build_preimages(self) -> None:
        self._f_preimages, self._d_preimages = {}, {}
        for a in self.input_words():
            for v, c in self.f_image(a).items():
                self._f_preimages.setdefault(v, []).append((a, c))
            for v, c in internal_boundary(self.algebra, a).items():
                self._d_preimages.setdefault(v, []).append((a, c))
        logger.debug("Cached f-preimages", extra={'algebra': self.algebra.name, 'j_max': self.j_max,
                                                  'targets': len(self._f_preimages)})

    def f_preimages(self, word: Word) -> List[Tuple[Word, int]]:
        """Words a of length at most J whose f-image contains ``word``."""
        if self._f_preimages is None:
            self._build_preimages()
        return self._f_preimages.get(word, [])

    def d_preimages(self, word: Word) -> List[Tuple[Word, int]]:
        """Words a of length at most J whose internal boundary contains ``word``."""
        if self._d_preimages is None:
            self._build_preimages()
        return self._d_preimages.get(word, [])

    def global_sign(self, j: int) -> int:
        """(-1)^(j-1), or 1 when flipped."""
        return 1 if self.flip_global_sign else parity_sign(j - 1)


def _internal_part(nat: NatTruncation, key: NatKey) -> Combination:
    """(-1)^(j-1) d_E(g_j): (-1)^|v| (d_A o g - g o d_A) on a = v."""
    j, k, v, w = key
    algebra = nat.algebra
    result: Combination = {}
    sign = nat.global_sign(j) * parity_sign(algebra.word_degree(v))
    for w2, c in internal_boundary(algebra, w).items():
        add_term(result, (j, k, v, w2), sign * c)
    for a, c in nat.d_preimages(v):
        add_term(result, (j, k, a, w), -nat.global_sign(j) * parity_sign(algebra.word_degree(a)) * c)
    return result


def _post_part(nat: NatTruncation, key: NatKey) -> Combination:
    """(-1)^(j-1) (-1)^|g| f_{k,k'} o g."""
    j, _, v, w = key
    algebra = nat.algebra
    sign = nat.global_sign(j) * parity_sign(algebra.word_degree(w) - algebra.word_degree(v))
    return {(j, len(w2), v, w2): sign * c for w2, c in nat.f_image(w).items() if c}


def _pre_part(nat: NatTruncation, key: NatKey) -> Combination:
    """-(-1)^(j''-1) g o f_{j'',j} for every longer input length j'' <= J."""
    _, k, v, w = key
    result: Combination = {}
    for a, c in nat.f_preimages(v):
        add_term(result, (len(a), k, a, w), -nat.global_sign(len(a)) * c)
    return result


def nat_differential(nat: NatTruncation, element: Mapping[NatKey, int]) -> Combination:
    """Differential of a combination of basis maps.

    Raises:
        ShapeError: If a key lies outside the truncation
    """
    result: Combination = {}
    for key, coeff in element.items():
        j, k, v, w = key
        if not (1 <= j <= nat.j_max and 1 <= k <= nat.k_max and len(v) == j and len(w) == k):
            raise ShapeError(f"{key!r} is outside the truncation J={nat.j_max}, K={nat.k_max}")
        for part in (_internal_part, _post_part, _pre_part):
            add_into(result, part(nat, key), coeff)
    return result


def embed_cochain(nat: NatTruncation, cochain: Mapping[CochainKey, int]) -> Combination:
    """F(D): the maps a -> a ∩ D for input arities j <= J.

    Components of arity j <= q vanish; outputs longer than K are dropped.
    """
    result: Combination = {}
    for a in nat.input_words():
        for out_word, c in cap(nat.algebra, {a: 1}, cochain).items():
            if len(out_word) <= nat.k_max:
                add_term(result, (len(a), len(out_word), a, out_word), c)
    return result


def _restrict(element: Mapping[NatKey, int], k_max: int) -> Combination:
    return {key: c for key, c in element.items() if key[1] <= k_max}


def verify_capprop(algebra: FrobeniusAlgebraSpec, q_max: int = 3, j_max: int = 6, k_max: int = 6,
                   flip_global_sign: bool = False) -> VerificationReport:
    """Check F(dD) = d(F(D)) for every basis cochain D of arity at most q_max.

    The comparison is made on components j <= J, k <= K, with the
    differential computed before cutting at K. The cap identity in the
    Hochschild module is run as a cross-check and reported in details.

    Raises:
        ShapeError: If q_max >= J
    """
    if q_max >= j_max:
        raise ShapeError(f"q_max must be below J, got q_max={q_max}, J={j_max}")
    nat = NatTruncation(algebra, j_max, max(j_max, k_max), flip_global_sign)
    checked = 0
    witness = None
    difference: Combination = {}
    for q in range(q_max + 1):
        for in_word in words(algebra.dim, q):
            for out in range(algebra.dim):
                key = (in_word, out)
                lhs = _restrict(embed_cochain(nat, cochain_differential(algebra, key)), k_max)
                rhs = _restrict(nat_differential(nat, embed_cochain(nat, {key: 1})), k_max)
                difference = add_into(dict(lhs), rhs, -1)
                checked += 1
                if difference:
                    failing = min(difference)
                    witness = (failing[0], failing[1], key)
                    break
            if witness:
                break
        if witness:
            break
    cap_report = verify_cap_identity(algebra, p_max=min(4, j_max - 1), q_max=q_max)
    details = {'cap_identity': cap_report.to_dict(), 'j_max': j_max, 'k_max': k_max}
    if witness:
        details['difference_terms'] = len(difference)
    passed = witness is None and cap_report.passed
    logger.info("Checked cap embedding", extra={'algebra': algebra.name, 'passed': passed, 'checked': checked})
    return VerificationReport(f'capprop:{algebra.name}', passed, checked, witness, details)


def nat_complex(nat: NatTruncation) -> FreeChainComplex:
    """Assemble the truncation; assembly checks d^2 = 0."""
    basis: Dict[int, List[NatKey]] = {}
    for key in nat.keys():
        basis.setdefault(nat.degree(key), []).append(key)
    basis = {d: sorted(keys) for d, keys in basis.items()}
    return assemble(basis, lambda key: nat_differential(nat, {key: 1}), drop_unknown=True,
                    name=f'nat:{nat.algebra.name}')


def random_element(nat: NatTruncation, rng: random.Random, terms: int = 4) -> Combination:
    """Random combination of basis maps with small coefficients."""
    keys = nat.keys()
    element: Combination = {}
    for _ in range(terms):
        add_term(element, rng.choice(keys), rng.choice((-2, -1, 1, 2)))
    return element


def verify_nat_square(nat: NatTruncation, rng: random.Random, samples: int = 30) -> VerificationReport:
    """d^2 = 0 on random elements."""
    for i in range(samples):
        element = random_element(nat, rng)
        square = nat_differential(nat, nat_differential(nat, element))
        if square:
            return VerificationReport(f'nat_square:{nat.algebra.name}', False, i + 1, element,
                                      {'square_terms': len(square)})
    return VerificationReport(f'nat_square:{nat.algebra.name}', True, samples)
