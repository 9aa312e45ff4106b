"""Hochschild chains, cochains, the cap product and the unit homotopies.

Chains are words ``(a_0, ..., a_p)`` of basis indices in homological
degree ``p + sum |a_i|``. The boundary is

    d x = d_A x + (-1)^{|x|} sum_k f_{n,k}(x)

with the forests f_{n,k} evaluated through the algebra, so the signs come
from graph orientations rather than from a hand-written formula.
"""
from dataclasses import dataclass
from itertools import product as cartesian
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from ainfty import f_nk, identity, m_i_nk, tensor, unit_insertion
from algebra import FrobeniusAlgebraSpec, Word, apply_forest, apply_forest_op, parity_sign
from chain_complex import (Combination, FreeChainComplex, VerificationReport, add_into, add_term,
                           assemble, homology)
from errors import ShapeError
from logger import get_logger

logger = get_logger(__name__)

CochainKey = Tuple[Word, int]


@dataclass(frozen=True)
class HochschildComplexSpec:
    """Parameters of a truncated Hochschild complex.

    Attributes:
        algebra: The coefficient algebra
        n_max: Largest word length
        reduced: Quotient by words with a unit in positions 2..n
        reduce_up_to: Quotient only by units in positions 2..r (overrides ``reduced``)
        extra_tensor_factors: Spectator factors m appended to every word
    """
    algebra: FrobeniusAlgebraSpec
    n_max: int
    reduced: bool = False
    reduce_up_to: Optional[int] = None
    extra_tensor_factors: int = 0

    def __post_init__(self):
        if self.n_max < 1:
            raise ShapeError(f"n_max must be at least 1, got {self.n_max}")
        if self.extra_tensor_factors < 0:
            raise ShapeError("extra_tensor_factors must be nonnegative")
        if (self.reduced or self.reduce_up_to) and self.algebra.unit_index is None:
            raise ShapeError(f"algebra {self.algebra.name!r} has no unit basis element to reduce by")

    @property
    def reduction_bound(self) -> int:
        """Largest position whose unit is killed; 1 means unreduced."""
        if self.reduce_up_to is not None:
            return self.reduce_up_to
        return self.n_max if self.reduced else 1


@dataclass(frozen=True)
class CochainComplexSpec:
    """Parameters of a truncated Hochschild cochain complex."""
    algebra: FrobeniusAlgebraSpec
    q_max: int

    def __post_init__(self):
        if self.q_max < 0:
            raise ShapeError(f"q_max must be nonnegative, got {self.q_max}")


def words(dim: int, length: int) -> Iterable[Word]:
    """All words of a given length over ``dim`` letters."""
    return cartesian(range(dim), repeat=length)


def chain_degree(algebra: FrobeniusAlgebraSpec, word: Sequence[int], extra: int = 0) -> int:
    """Homological degree of a Hochschild chain word."""
    return len(word) - extra - 1 + algebra.word_degree(word)


def internal_boundary(algebra: FrobeniusAlgebraSpec, word: Word) -> Combination:
    """Leibniz extension of the algebra differential to a word."""
    result: Combination = {}
    if not algebra.has_differential():
        return result
    passed = 0
    for i, letter in enumerate(word):
        for image, c in algebra.d_internal(letter).items():
            add_term(result, word[:i] + (image,) + word[i + 1:], parity_sign(passed) * c)
        passed += algebra.degrees[letter]
    return result


def _f_action(n: int, k: int, extra: int):
    forest = f_nk(n, k)
    return tensor(forest, identity(extra)) if extra else forest


def hochschild_boundary(algebra: FrobeniusAlgebraSpec, chain: Mapping[Word, int], extra: int = 0) -> Combination:
    """Untruncated Hochschild boundary of a chain."""
    result: Combination = {}
    for word, coeff in chain.items():
        add_into(result, internal_boundary(algebra, word), coeff)
        n = len(word) - extra
        sign = parity_sign(algebra.word_degree(word))
        for k in range(1, n):
            add_into(result, apply_forest(algebra, _f_action(n, k, extra), {word: 1}), sign * coeff)
    return result


def _is_reduced(word: Word, unit: Optional[int], bound: int) -> bool:
    return unit is None or unit not in word[1:bound]


def build_hochschild(spec: HochschildComplexSpec) -> FreeChainComplex:
    """Assemble the truncated Hochschild complex.

    Words have length 1..n_max (plus the spectator factors); truncation
    is a subcomplex since the boundary shortens words, and reduction is
    a quotient.
    """
    algebra = spec.algebra
    extra = spec.extra_tensor_factors
    unit = algebra.unit_index
    bound = spec.reduction_bound
    basis: Dict[int, List[Word]] = {}
    for n in range(1, spec.n_max + 1):
        for word in words(algebra.dim, n + extra):
            if bound > 1 and not _is_reduced(word, unit, bound):
                continue
            basis.setdefault(chain_degree(algebra, word, extra), []).append(word)
    basis = {d: sorted(keys) for d, keys in basis.items()}
    name = f'hochschild:{algebra.name}'
    complex_ = assemble(basis, lambda w: hochschild_boundary(algebra, {w: 1}, extra),
                        drop_unknown=bound > 1, name=name)
    logger.info("Built Hochschild complex", extra={'algebra': algebra.name, 'n_max': spec.n_max,
                                                    'reduced': bound > 1})
    return complex_


def homology_table(c: FreeChainComplex, degrees: Iterable[int], coefficients: str = 'Z') -> Dict[int, str]:
    """Homology groups rendered as strings, keyed by degree."""
    return {d: str(homology(c, d, coefficients)) for d in degrees}


# ----------------------------------------------------------------------------
# Cochains and the cap product
# ----------------------------------------------------------------------------

def _require_formal(algebra: FrobeniusAlgebraSpec) -> None:
    if algebra.has_differential():
        raise ShapeError("cochain constructions need an algebra with zero differential")


def cochain_degree(algebra: FrobeniusAlgebraSpec, key: CochainKey) -> int:
    """Homological degree |out| - sum |in| - q of a basis cochain."""
    in_word, out = key
    return algebra.degrees[out] - algebra.word_degree(in_word) - len(in_word)


def _map_degree(algebra: FrobeniusAlgebraSpec, key: CochainKey) -> int:
    in_word, out = key
    return algebra.degrees[out] - algebra.word_degree(in_word)


def _evaluate(cochain: Mapping[CochainKey, int], word: Word) -> Dict[int, int]:
    result: Dict[int, int] = {}
    for (in_word, out), c in cochain.items():
        if in_word == word:
            add_term(result, out, c)
    return result


def _vector_words(algebra: FrobeniusAlgebraSpec, vectors: Sequence[Mapping[int, int]]) -> Dict[Word, int]:
    result: Dict[Word, int] = {}
    for choice in cartesian(*(sorted(v.items()) for v in vectors)):
        coeff = 1
        for _, c in choice:
            coeff *= c
        add_term(result, tuple(i for i, _ in choice), coeff)
    return result


def cochain_differential(algebra: FrobeniusAlgebraSpec, key: CochainKey) -> Combination:
    """Hochschild coboundary of one basis cochain D of arity q.

    (dD)(a_1..a_{q+1}) = (-1)^(e+q+1+e|a_1|) a_1 D(a_2..)
                         + sum_i (-1)^(i+q+1+e) D(..a_i a_{i+1}..)
                         + (-1)^e D(a_1..a_q) a_{q+1}
    with e the degree of D as a linear map.
    """
    _require_formal(algebra)
    in_word, _ = key
    q = len(in_word)
    e = _map_degree(algebra, key)
    cochain = {key: 1}
    result: Combination = {}
    for word in words(algebra.dim, q + 1):
        value: Dict[int, int] = {}
        first = word[0]
        sign = parity_sign(e + q + 1 + e * algebra.degrees[first])
        for out, c in _evaluate(cochain, word[1:]).items():
            for k, c2 in algebra.multiply(first, out).items():
                add_term(value, k, sign * c * c2)
        for i in range(1, q + 1):
            merged = algebra.multiply(word[i - 1], word[i])
            for letter, c in merged.items():
                shorter = word[:i - 1] + (letter,) + word[i + 1:]
                for out, c2 in _evaluate(cochain, shorter).items():
                    add_term(value, out, parity_sign(i + q + 1 + e) * c * c2)
        for out, c in _evaluate(cochain, word[:q]).items():
            for k, c2 in algebra.multiply(out, word[q]).items():
                add_term(value, k, parity_sign(e) * c * c2)
        for out, c in value.items():
            add_term(result, (word, out), c)
    return result


def build_cochain(spec: CochainComplexSpec) -> FreeChainComplex:
    """Assemble C^q(A, A) for q <= q_max, homologically graded.

    The coboundary raises q, so dropping arities above q_max leaves a
    quotient complex.
    """
    algebra = spec.algebra
    _require_formal(algebra)
    basis: Dict[int, List[CochainKey]] = {}
    for q in range(spec.q_max + 1):
        for in_word in words(algebra.dim, q):
            for out in range(algebra.dim):
                key = (in_word, out)
                basis.setdefault(cochain_degree(algebra, key), []).append(key)
    basis = {d: sorted(keys) for d, keys in basis.items()}
    return assemble(basis, lambda key: cochain_differential(algebra, key), drop_unknown=True,
                    name=f'cochain:{algebra.name}')


def cap(algebra: FrobeniusAlgebraSpec, chain: Mapping[Word, int],
        cochain: Mapping[CochainKey, int], printed: bool = False) -> Combination:
    """Cap product a ∩ D.

    For a = a_0 (x) ... (x) a_p and D of arity q <= p:
    (-1)^((p + sum_{i>=1} |a_i|) e + pq) a_0 D(a_1..a_q) (x) a_{q+1} (x) ... (x) a_p,
    with e the degree of D as a linear map, and zero when p < q.

    The printed variant uses (-1)^((|a| - |a_0|)|D|) with |D| the cochain
    degree. The two agree on evenly graded algebras.
    """
    _require_formal(algebra)
    result: Combination = {}
    for word, c_word in chain.items():
        p = len(word) - 1
        tail_degree = p + algebra.word_degree(word[1:])
        for key, c_key in cochain.items():
            in_word, out = key
            q = len(in_word)
            if p < q or word[1:q + 1] != in_word:
                continue
            if printed:
                sign = parity_sign(tail_degree * cochain_degree(algebra, key))
            else:
                sign = parity_sign(tail_degree * _map_degree(algebra, key) + p * q)
            for head, c in algebra.multiply(word[0], out).items():
                add_term(result, (head,) + word[q + 1:], sign * c * c_word * c_key)
    return result


def cap_identity_difference(algebra: FrobeniusAlgebraSpec, word: Word, key: CochainKey,
                            printed: bool = False) -> Combination:
    """a ∩ dD - (-1)^|a| (d(a ∩ D) - (da) ∩ D) for basis elements a and D."""
    a = {word: 1}
    lhs = cap(algebra, a, cochain_differential(algebra, key), printed)
    rhs = hochschild_boundary(algebra, cap(algebra, a, {key: 1}, printed))
    add_into(rhs, cap(algebra, hochschild_boundary(algebra, a), {key: 1}, printed), -1)
    return add_into(dict(lhs), rhs, -parity_sign(chain_degree(algebra, word)))


def verify_cap_identity(algebra: FrobeniusAlgebraSpec, p_max: int = 4, q_max: int = 3) -> VerificationReport:
    """Check a ∩ dD = (-1)^|a| (d(a ∩ D) - (da) ∩ D) on basis pairs.

    With the global sign (-1)^(j-1) of the formal-operations differential
    this is dD ∩ a = d(a ∩ D) - D ∩ da. The printed cap sign is checked
    as well; its failures are counted in the details.
    """
    checked = 0
    printed_failures = 0
    printed_witness = None
    for p in range(p_max + 1):
        for word in words(algebra.dim, p + 1):
            for q in range(q_max + 1):
                for in_word in words(algebra.dim, q):
                    for out in range(algebra.dim):
                        key = (in_word, out)
                        checked += 1
                        difference = cap_identity_difference(algebra, word, key)
                        if difference:
                            return VerificationReport(f'cap_identity:{algebra.name}', False, checked,
                                                      (word, key), {'difference': repr(difference)})
                        if cap_identity_difference(algebra, word, key, printed=True):
                            printed_failures += 1
                            if printed_witness is None:
                                printed_witness = repr((word, key))
    details = {'printed_sign_failures': printed_failures, 'printed_sign_witness': printed_witness}
    return VerificationReport(f'cap_identity:{algebra.name}', True, checked, None, details)


# ----------------------------------------------------------------------------
# Unit homotopies
# ----------------------------------------------------------------------------

def _a_r_differential(algebra: FrobeniusAlgebraSpec, r: int, word: Word) -> Combination:
    """d x = d_A x + (-1)^|x| sum_{k=r}^{n-1} sum_{i=r}^{k} (-1)^(n-k) m^i_{n-1,k-1}(x)."""
    n = len(word) + 1
    result = internal_boundary(algebra, word)
    sign = parity_sign(algebra.word_degree(word))
    for k in range(max(r, 2), n):
        for i in range(r, k + 1):
            forest = m_i_nk(n - 1, k - 1, i)
            add_into(result, apply_forest(algebra, forest, {word: 1}), sign * parity_sign(n - k))
    return result


def build_a_r(algebra: FrobeniusAlgebraSpec, r: int, n_max: int) -> FreeChainComplex:
    """Quotient complex A_r on words of length n - 1 for r <= n <= n_max."""
    basis: Dict[int, List[Word]] = {}
    for n in range(max(r, 2), n_max + 1):
        for word in words(algebra.dim, n - 1):
            basis.setdefault(len(word) + algebra.word_degree(word), []).append(word)
    basis = {d: sorted(keys) for d, keys in basis.items()}
    return assemble(basis, lambda w: _a_r_differential(algebra, r, w), drop_unknown=True,
                    name=f'A_{r}:{algebra.name}')


def a_r_homotopy(algebra: FrobeniusAlgebraSpec, r: int, word: Word, printed: bool = False) -> Combination:
    """s(x) = (-1)^(|x| + r) u_r(x); the printed variant drops the r."""
    sign = parity_sign(algebra.word_degree(word) + (0 if printed else r))
    return {w: sign * c for w, c in apply_forest(algebra, unit_insertion(len(word), r), {word: 1}).items()}


def _b_r_differential(algebra: FrobeniusAlgebraSpec, r: int, n_max: int, key: Tuple[int, Word]) -> Combination:
    k, word = key
    result: Combination = {}
    for letter_word, c in internal_boundary(algebra, word).items():
        add_term(result, (k, letter_word), c)
    for n in range(k + 1, n_max + 1):
        outer = parity_sign(n - 1) * parity_sign(n - k)
        for i in range(r, k + 1):
            image = apply_forest_op(algebra, m_i_nk(n - 1, k - 1, i), {word: 1})
            for w, c in image.items():
                add_term(result, (n, w), outer * c)
    return result


def build_b_r(algebra: FrobeniusAlgebraSpec, r: int, n_max: int) -> FreeChainComplex:
    """Truncation of B^r: components n in [r, n_max] holding words of length n - 1."""
    basis: Dict[int, List[Tuple[int, Word]]] = {}
    for n in range(max(r, 2), n_max + 1):
        for word in words(algebra.dim, n - 1):
            basis.setdefault(algebra.word_degree(word) + 1 - n, []).append((n, word))
    basis = {d: sorted(keys) for d, keys in basis.items()}
    return assemble(basis, lambda key: _b_r_differential(algebra, r, n_max, key), drop_unknown=True,
                    name=f'B^{r}:{algebra.name}')


def b_r_homotopy(algebra: FrobeniusAlgebraSpec, r: int, key: Tuple[int, Word]) -> Combination:
    """s(y)_n = (-1)^(n+r) u_r^op(y_{n+1})."""
    component, word = key
    n = component - 1
    if n < max(r, 2):
        return {}
    image = apply_forest_op(algebra, unit_insertion(n - 1, r), {word: 1})
    return {(n, w): parity_sign(n + r) * c for w, c in image.items()}


def _homotopy_failures(c: FreeChainComplex, homotopy, keys: Iterable) -> Iterable:
    degree_of = {key: d for d, ks in c.basis.items() for key in ks}
    for key in keys:
        total: Combination = {}
        s_key = {k: v for k, v in homotopy(key).items() if k in degree_of}
        if s_key:
            add_into(total, c.differential(degree_of[key] + 1, s_key))
        for target, coeff in c.differential(degree_of[key], {key: 1}).items():
            add_into(total, {k: v for k, v in homotopy(target).items() if k in degree_of}, coeff)
        add_term(total, key, -1)
        yield key, total


def verify_unit_homotopies(algebra: FrobeniusAlgebraSpec, r: int, n_max: int) -> VerificationReport:
    """Check sd + ds = id on A_r and on the truncated B^r.

    Only slots whose homotopy image and boundary stay inside the
    truncation are compared. The printed sign convention for A_r is run
    as well and the lengths where it fails are recorded.
    """
    if algebra.unit_index is None:
        raise ShapeError(f"algebra {algebra.name!r} has no unit basis element")
    a_r = build_a_r(algebra, r, n_max)
    window = [w for keys in a_r.basis.values() for w in keys if r <= len(w) + 1 <= n_max - 1]
    failures = [(w, t) for w, t in _homotopy_failures(a_r, lambda w: a_r_homotopy(algebra, r, w), window) if t]
    printed = sorted({len(w) for w, t in _homotopy_failures(
        a_r, lambda w: a_r_homotopy(algebra, r, w, printed=True), window) if t})

    b_r = build_b_r(algebra, r, n_max)
    b_window = [key for keys in b_r.basis.values() for key in keys if key[0] < n_max]
    b_failures = [(k, t) for k, t in _homotopy_failures(b_r, lambda key: b_r_homotopy(algebra, r, key), b_window)
                  if t]

    passed = not failures and not b_failures
    witness = None
    if failures:
        witness = ('A_r', failures[0][0])
    elif b_failures:
        witness = ('B^r', b_failures[0][0])
    details = {'r': r, 'n_max': n_max, 'printed_sign_failing_lengths': printed,
               'a_r_checked': len(window), 'b_r_checked': len(b_window)}
    logger.info("Unit homotopies checked", extra={'algebra': algebra.name, 'r': r, 'passed': passed})
    return VerificationReport(f'unit_homotopies:{algebra.name}:r={r}', passed, len(window) + len(b_window),
                              witness, details)


# ----------------------------------------------------------------------------
# coHochschild complex
# ----------------------------------------------------------------------------

def _cohochschild_differential(algebra: FrobeniusAlgebraSpec, n_max: int, key: Tuple[int, Word]) -> Combination:
    k, word = key
    result: Combination = {}
    sign_k = parity_sign(k - 1)
    for w, c in internal_boundary(algebra, word).items():
        add_term(result, (k, w), sign_k * c)
    for n in range(k + 1, n_max + 1):
        for w, c in apply_forest_op(algebra, f_nk(n, k), {word: 1}).items():
            add_term(result, (n, w), -parity_sign(n - 1) * c)
    return result


def build_cohochschild(algebra: FrobeniusAlgebraSpec, n_max: int) -> FreeChainComplex:
    """Truncated coHochschild complex of the tensor functor of the coalgebra.

    Component n holds words of length n in degree internal + 1 - n;
    dropping components above n_max is a quotient.
    """
    basis: Dict[int, List[Tuple[int, Word]]] = {}
    for n in range(1, n_max + 1):
        for word in words(algebra.dim, n):
            basis.setdefault(algebra.word_degree(word) + 1 - n, []).append((n, word))
    basis = {d: sorted(keys) for d, keys in basis.items()}
    return assemble(basis, lambda key: _cohochschild_differential(algebra, n_max, key), drop_unknown=True,
                    name=f'cohochschild:{algebra.name}')


def quotient_is_chain_map(algebra: FrobeniusAlgebraSpec, n_max: int) -> VerificationReport:
    """Check that projecting onto the reduced complex commutes with the boundaries."""
    full = build_hochschild(HochschildComplexSpec(algebra, n_max))
    reduced = build_hochschild(HochschildComplexSpec(algebra, n_max, reduced=True))
    keep = {key for keys in reduced.basis.values() for key in keys}
    checked = 0
    for degree, keys in full.basis.items():
        for key in keys:
            checked += 1
            down = {k: c for k, c in full.differential(degree, {key: 1}).items() if k in keep}
            projected = {key: 1} if key in keep else {}
            across = reduced.differential(degree, projected) if projected else {}
            if down != across:
                return VerificationReport(f'reduction_chain_map:{algebra.name}', False, checked, key)
    return VerificationReport(f'reduction_chain_map:{algebra.name}', True, checked)
