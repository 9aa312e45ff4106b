"""Truncated cosimplicial sets and their alternating-coface complexes.

The main example is the configuration cosimplicial set K(q+1, X): the
components of configurations of q+1 ordered points p_0..p_q on an
oriented 1-manifold X. A configuration is stored as one tuple of point
labels per component of X, circles first. Circle tuples are rotated so
that their smallest label comes first; interval tuples read left to
right.

ZX^q sits in homological degree -q and the differential is the
alternating sum of the cofaces, so it lowers the degree by one.
"""
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Callable, Dict, Hashable, Iterator, List, Optional, Sequence, Tuple

from chain_complex import (Combination, FreeChainComplex, SparseIntMatrix, VerificationReport, add_term,
                           assemble, homology, identity_map, matrix_of, verify_homotopy)
from errors import AssemblyError, ShapeError
from logger import get_logger

logger = get_logger(__name__)

Configuration = Tuple[Tuple[int, ...], ...]
Injection = Tuple[int, ...]


@dataclass(frozen=True)
class OneManifold:
    """Closed oriented 1-manifold: a number of circles and open intervals."""
    circles: int
    intervals: int

    def __post_init__(self):
        if self.circles < 0 or self.intervals < 0:
            raise ShapeError(f"component counts must be nonnegative, got {self.circles}, {self.intervals}")

    @property
    def components(self) -> int:
        """Number of connected components."""
        return self.circles + self.intervals

    @classmethod
    def parse(cls, text: str) -> 'OneManifold':
        """Read ``c=1,i=0`` style descriptions.

        Raises:
            ValueError: If a field is missing or not an integer
        """
        fields = dict(part.split('=', 1) for part in text.replace(' ', '').split(',') if part)
        try:
            return cls(int(fields.get('c', 0)), int(fields.get('i', 0)))
        except ValueError as exc:
            raise ValueError(f"cannot read manifold description {text!r}") from exc


# ----------------------------------------------------------------------------
# Configurations
# ----------------------------------------------------------------------------

def _normalize(x: OneManifold, parts: Sequence[Sequence[int]]) -> Configuration:
    result = []
    for index, part in enumerate(parts):
        part = tuple(part)
        if index < x.circles and part:
            start = part.index(min(part))
            part = part[start:] + part[:start]
        result.append(part)
    return tuple(result)


def configuration_components(q: int, x: OneManifold) -> List[Configuration]:
    """All configurations of q labelled points p_0..p_{q-1} on X, sorted.

    Points are placed one label at a time; on a circle with m points
    there are m distinct cyclic slots, on an interval m + 1 slots.
    """
    if q < 0:
        raise ShapeError(f"q must be nonnegative, got {q}")
    configs = {tuple(() for _ in range(x.components))}
    for label in range(q):
        grown = set()
        for config in configs:
            for index, part in enumerate(config):
                slots = max(len(part), 1) if index < x.circles else len(part) + 1
                for slot in range(slots):
                    parts = list(config)
                    parts[index] = part[:slot] + (label,) + part[slot:]
                    grown.add(_normalize(x, parts))
        configs = grown
    return sorted(configs)


def _locate(config: Configuration, label: int) -> Tuple[int, int]:
    for index, part in enumerate(config):
        if label in part:
            return index, part.index(label)
    raise ShapeError(f"label {label} not in configuration {config}")


def configuration_coface(x: OneManifold, q: int, i: int, config: Configuration) -> Configuration:
    """d^i on K(q+1, X): double p_i to its right (i <= q) or p_0 to its left (i = q+1)."""
    if not 0 <= i <= q + 1:
        raise ShapeError(f"coface d^{i} undefined in level {q}")
    if i <= q:
        shifted = [tuple(v if v <= i else v + 1 for v in part) for part in config]
        index, pos = _locate(tuple(shifted), i)
        part = shifted[index]
        shifted[index] = part[:pos + 1] + (i + 1,) + part[pos + 1:]
    else:
        shifted = [tuple(part) for part in config]
        index, pos = _locate(config, 0)
        part = shifted[index]
        shifted[index] = part[:pos] + (q + 1,) + part[pos:]
    return _normalize(x, shifted)


def configuration_codegeneracy(x: OneManifold, q: int, j: int, config: Configuration) -> Configuration:
    """s^j on K(q+1, X): forget p_{j+1} and relabel in order."""
    if not 0 <= j <= q - 1:
        raise ShapeError(f"codegeneracy s^{j} undefined in level {q}")
    dropped = j + 1
    parts = [tuple(v if v < dropped else v - 1 for v in part if v != dropped) for part in config]
    return _normalize(x, parts)


def is_complete(x: OneManifold, config: Configuration) -> bool:
    """Every circle carries at least one point."""
    return all(config[index] for index in range(x.circles))


# ----------------------------------------------------------------------------
# Truncated cosimplicial sets
# ----------------------------------------------------------------------------

@dataclass
class TruncatedCosimplicialSet:
    """Levels X^0..X^q_max with their cofaces and codegeneracies.

    Attributes:
        levels: Ordered elements of each level
        cofaces: (q, i) -> map X^q -> X^{q+1}, for 0 <= i <= q+1
        codegeneracies: (q, j) -> map X^q -> X^{q-1}, for 0 <= j <= q-1
        name: Label used in logs and reports
    """
    levels: List[List[Hashable]]
    cofaces: Dict[Tuple[int, int], Dict[Hashable, Hashable]]
    codegeneracies: Dict[Tuple[int, int], Dict[Hashable, Hashable]]
    name: str = 'cosimplicial'
    _preimages: Dict[Tuple[int, int], Dict[Hashable, Hashable]] = field(default_factory=dict, repr=False)

    @property
    def q_max(self) -> int:
        """Top level."""
        return len(self.levels) - 1

    def d(self, i: int, q: int, element: Hashable) -> Hashable:
        """Coface d^i applied to an element of X^q."""
        return self.cofaces[(q, i)][element]

    def s(self, j: int, q: int, element: Hashable) -> Hashable:
        """Codegeneracy s^j applied to an element of X^q."""
        return self.codegeneracies[(q, j)][element]

    def coface_preimage(self, i: int, q: int, element: Hashable) -> Optional[Hashable]:
        """The y in X^{q-1} with d^i y = element, if any."""
        key = (q - 1, i)
        if key not in self._preimages:
            self._preimages[key] = {image: source for source, image in self.cofaces.get(key, {}).items()}
        return self._preimages[key].get(element)


def build_cosimplicial_set(levels: List[List[Hashable]],
                           coface: Callable[[int, int, Hashable], Hashable],
                           codegeneracy: Callable[[int, int, Hashable], Hashable],
                           name: str = 'cosimplicial') -> TruncatedCosimplicialSet:
    """Tabulate the structure maps and check the cosimplicial identities.

    Args:
        levels: Elements of X^0..X^q_max
        coface: (q, i, x) -> d^i x
        codegeneracy: (q, j, x) -> s^j x
        name: Label for errors

    Raises:
        AssemblyError: If a map leaves its target level or an identity fails
    """
    q_max = len(levels) - 1
    members = [set(level) for level in levels]
    cofaces: Dict[Tuple[int, int], Dict[Hashable, Hashable]] = {}
    codegeneracies: Dict[Tuple[int, int], Dict[Hashable, Hashable]] = {}
    for q, level in enumerate(levels):
        if q < q_max:
            for i in range(q + 2):
                cofaces[(q, i)] = {x: coface(q, i, x) for x in level}
                _check_lands(cofaces[(q, i)], members[q + 1], name, f'd^{i} on level {q}')
        for j in range(q):
            codegeneracies[(q, j)] = {x: codegeneracy(q, j, x) for x in level}
            _check_lands(codegeneracies[(q, j)], members[q - 1], name, f's^{j} on level {q}')
    result = TruncatedCosimplicialSet(levels, cofaces, codegeneracies, name)
    failure = next(identity_failures(result), None)
    if failure is not None:
        identity, q, element = failure
        raise AssemblyError(f"{name}: identity {identity} fails on level {q}", witness=(q, element))
    logger.debug("Built cosimplicial set %s", name, extra={'levels': [len(level) for level in levels]})
    return result


def _check_lands(mapping: Dict[Hashable, Hashable], target: set, name: str, what: str) -> None:
    for source, image in mapping.items():
        if image not in target:
            raise AssemblyError(f"{name}: {what} sends {source!r} outside the next level", witness=source)


def identity_failures(t: TruncatedCosimplicialSet) -> Iterator[Tuple[str, int, Hashable]]:
    """Yield (identity, level, element) for every violated cosimplicial identity."""
    d, s, top = t.d, t.s, t.q_max
    for q, level in enumerate(t.levels):
        for x in level:
            if q + 2 <= top:
                for j in range(q + 3):
                    for i in range(j):
                        if d(j, q + 1, d(i, q, x)) != d(i, q + 1, d(j - 1, q, x)):
                            yield 'djdi', q, x
            if q + 1 <= top:
                for j in range(q + 1):
                    if s(j, q + 1, d(j, q, x)) != x or s(j, q + 1, d(j + 1, q, x)) != x:
                        yield 'sjdj', q, x
                    for i in range(j):
                        if s(j, q + 1, d(i, q, x)) != d(i, q - 1, s(j - 1, q, x)):
                            yield 'sjdi_low', q, x
                    if j <= q - 1:
                        for i in range(j + 2, q + 2):
                            if s(j, q + 1, d(i, q, x)) != d(i - 1, q - 1, s(j, q, x)):
                                yield 'sjdi_high', q, x
            for j in range(q - 1):
                for i in range(j + 1):
                    if s(j, q - 1, s(i, q, x)) != s(i, q - 1, s(j + 1, q, x)):
                        yield 'sjsi', q, x


@lru_cache(maxsize=32)
def configuration_cosimplicial_set(x: OneManifold, q_max: int) -> TruncatedCosimplicialSet:
    """K(q+1, X) for q <= q_max, built once per (X, q_max)."""
    levels = [configuration_components(q + 1, x) for q in range(q_max + 1)]
    return build_cosimplicial_set(
        levels,
        lambda q, i, c: configuration_coface(x, q, i, c),
        lambda q, j, c: configuration_codegeneracy(x, q, j, c),
        name=f'K(c={x.circles},i={x.intervals})')


# ----------------------------------------------------------------------------
# Chain complexes
# ----------------------------------------------------------------------------

def coface_sum(t: TruncatedCosimplicialSet, q: int, element: Hashable) -> Combination:
    """d_X = sum_i (-1)^i d^i on one element of X^q, keyed by (q+1, image)."""
    result: Combination = {}
    if q >= t.q_max:
        return result
    for i in range(q + 2):
        add_term(result, (q + 1, t.d(i, q, element)), (-1) ** i)
    return result


def cosimplicial_chain_complex(t: TruncatedCosimplicialSet,
                               keep: Optional[Callable[[Hashable], bool]] = None) -> FreeChainComplex:
    """ZX with ZX^q in degree -q; ``keep`` restricts to a summand.

    The top level has zero differential. A summand that is not closed
    under the cofaces raises ShapeError from assembly.
    """
    basis = {-q: [(q, x) for x in level if keep is None or keep(x)] for q, level in enumerate(t.levels)}
    return assemble(basis, lambda key: coface_sum(t, key[0], key[1]), name=t.name)


def zero_level_fixed_points(t: TruncatedCosimplicialSet,
                            keep: Optional[Callable[[Hashable], bool]] = None) -> List[Hashable]:
    """Elements y of X^0 with d^0 y = d^1 y."""
    if t.q_max < 1:
        return []
    return [y for y in t.levels[0] if (keep is None or keep(y)) and t.d(0, 0, y) == t.d(1, 0, y)]


def verify_concentration(x: OneManifold, q_max: int, complete: bool = False,
                         coefficients: str = 'Z') -> VerificationReport:
    """Homology of K(•+1, X) (or its complete summand) sits in degree 0.

    Degrees -q with q <= q_max - 1 are compared; degree 0 must have rank
    equal to the number of y in X^0 with d^0 y = d^1 y.
    """
    t = configuration_cosimplicial_set(x, q_max)
    keep = (lambda c: is_complete(x, c)) if complete else None
    c = cosimplicial_chain_complex(t, keep)
    expected = len(zero_level_fixed_points(t, keep))
    name = f'concentration:{t.name}' + (':complete' if complete else '')
    table = {}
    for q in range(q_max):
        group = homology(c, -q, coefficients)
        table[-q] = str(group)
        want = expected if q == 0 else 0
        if group.betti != want or group.torsion:
            return VerificationReport(name, False, q + 1, -q,
                                      {'homology': table, 'expected_rank': expected})
    return VerificationReport(name, True, q_max, None,
                              {'homology': table, 'expected_rank': expected, 'complete': complete})


def verify_complete_split(x: OneManifold, q_max: int) -> VerificationReport:
    """d_K(y) lies in ZK_c exactly when y is complete, for y with d_K(y) != 0."""
    t = configuration_cosimplicial_set(x, q_max)
    checked = 0
    for q, level in enumerate(t.levels[:-1]):
        for y in level:
            image = coface_sum(t, q, y)
            if not image:
                continue
            checked += 1
            inside = all(is_complete(x, c) for _, c in image)
            if inside != is_complete(x, y):
                return VerificationReport(f'complete_split:{t.name}', False, checked, (q, y))
    return VerificationReport(f'complete_split:{t.name}', True, checked)


# ----------------------------------------------------------------------------
# Inj(r)
# ----------------------------------------------------------------------------

def _omit(i: int, injection: Injection) -> Injection:
    return tuple(v if v < i else v + 1 for v in injection)


def inj_complex(r: int, q_max: int) -> Tuple[FreeChainComplex, Dict[int, SparseIntMatrix]]:
    """ZInj(r) truncated at q_max, with the contracting homotopy.

    Basis keys are (q, image of [r] in [q]). The homotopy sends x to
    (-1)^q x viewed in [q-1] when q is not hit, and to zero otherwise.

    Raises:
        ShapeError: If r > q_max
    """
    if not 0 <= r <= q_max:
        raise ShapeError(f"need 0 <= r <= q_max, got r={r}, q_max={q_max}")
    basis = {-q: [(q, inj) for inj in combinations(range(q + 1), r + 1)] for q in range(r, q_max + 1)}

    def boundary(key):
        q, inj = key
        result: Combination = {}
        if q < q_max:
            for i in range(q + 2):
                add_term(result, (q + 1, _omit(i, inj)), (-1) ** i)
        return result

    def homotopy(key):
        q, inj = key
        if q == 0 or q in inj:
            return {}
        return {(q - 1, inj): (-1) ** q}

    c = assemble(basis, boundary, name=f'Inj({r})')
    s = {degree: matrix_of(homotopy, keys, basis.get(degree + 1, []))
         for degree, keys in basis.items() if degree + 1 in basis}
    return c, s


def verify_inj_contraction(r: int, q_max: int) -> VerificationReport:
    """sd + ds = id on ZInj(r) in every level below the truncation."""
    c, s = inj_complex(r, q_max)
    degrees = [-q for q in range(r, q_max)]
    report = verify_homotopy(s, identity_map(c), None, c, c, degrees, name=f'inj_contraction:r={r}')
    report.details = {'r': r, 'q_max': q_max}
    return report


# ----------------------------------------------------------------------------
# Simplex classification
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class ClassifiedSimplex:
    """Factorization x = D(y) with y not a coface.

    Attributes:
        level: Cosimplicial degree p of y
        minimal: The element y
        cofaces: Coface indices, outermost first: x = d^{i_1} ... d^{i_k} y
        unique: False when y is in X^0 with d^0 y = d^1 y, so D is not unique
    """
    level: int
    minimal: Hashable
    cofaces: Tuple[int, ...]
    unique: bool


def classify_simplex(t: TruncatedCosimplicialSet, q: int, element: Hashable) -> ClassifiedSimplex:
    """Descend through coface preimages until no coface reaches the element."""
    word: List[int] = []
    current = element
    while q > 0:
        for i in range(q + 1):
            source = t.coface_preimage(i, q, current)
            if source is not None:
                word.append(i)
                current = source
                q -= 1
                break
        else:
            break
    unique = not (q == 0 and t.q_max >= 1 and t.d(0, 0, current) == t.d(1, 0, current))
    return ClassifiedSimplex(q, current, tuple(word), unique)


def apply_injection(t: TruncatedCosimplicialSet, p: int, q: int, image: Injection, element: Hashable) -> Hashable:
    """Apply the injection [p] -> [q] with the given image to an element of X^p.

    The injection is the composite of the cofaces d^m over the missing
    values m, smallest first.
    """
    missing = [m for m in range(q + 1) if m not in image]
    level = p
    for m in missing:
        element = t.d(m, level, element)
        level += 1
    return element


def simplex_splitting(t: TruncatedCosimplicialSet) -> VerificationReport:
    """Group every simplex by its minimal element and check the class sizes.

    A y with d^0 y = d^1 y spans one simplex per level; any other y in
    level p spans binomial(q+1, p+1) distinct simplices in level q.
    """
    classes: Dict[Tuple[int, Hashable], Dict[int, int]] = {}
    for q, level in enumerate(t.levels):
        for x in level:
            found = classify_simplex(t, q, x)
            counts = classes.setdefault((found.level, found.minimal), {})
            counts[q] = counts.get(q, 0) + 1
    checked = 0
    for (p, y), counts in sorted(classes.items(), key=repr):
        constant = p == 0 and t.q_max >= 1 and t.d(0, 0, y) == t.d(1, 0, y)
        for q in range(p, t.q_max + 1):
            checked += 1
            want = 1 if constant else comb(q + 1, p + 1)
            if counts.get(q, 0) != want:
                return VerificationReport(f'splitting:{t.name}', False, checked, (p, y, q),
                                          {'expected': want, 'found': counts.get(q, 0)})
    constants = sum(1 for (p, y) in classes if p == 0 and t.q_max >= 1 and t.d(0, 0, y) == t.d(1, 0, y))
    return VerificationReport(f'splitting:{t.name}', True, checked, None,
                              {'classes': len(classes), 'constant': constants})


def minimal_elements(t: TruncatedCosimplicialSet, p: int) -> List[Hashable]:
    """Elements of X^p that no coface reaches."""
    if p == 0:
        return list(t.levels[0])
    return [y for y in t.levels[p] if all(t.coface_preimage(i, p, y) is None for i in range(p + 1))]


def factorizations(t: TruncatedCosimplicialSet, q: int) -> Dict[Hashable, List[Tuple[int, Hashable, Injection]]]:
    """Every (p, y, image) with apply_injection(y) landing in X^q, grouped by the result.

    Runs over all minimal y in levels p <= q and all injections [p] -> [q].
    """
    found: Dict[Hashable, List[Tuple[int, Hashable, Injection]]] = {}
    for p in range(q + 1):
        for y in minimal_elements(t, p):
            for image in combinations(range(q + 1), p + 1):
                found.setdefault(apply_injection(t, p, q, image, y), []).append((p, y, image))
    return found


def verify_classification(t: TruncatedCosimplicialSet, q_limit: int = 4) -> VerificationReport:
    """Compare classify_simplex with the exhaustive factorizations up to level q_limit.

    Each x must come from exactly one minimal element, the one
    classify_simplex finds, and its coface word must rebuild x. From
    level 1 up the factorization is unique exactly when the result is
    flagged unique; in level 0 the only injection is the identity.
    """
    name = f'classification:{t.name}'
    checked = 0
    for q in range(min(q_limit, t.q_max) + 1):
        found = factorizations(t, q)
        for x in t.levels[q]:
            checked += 1
            classified = classify_simplex(t, q, x)
            ways = found.get(x, [])
            rebuilt, level = classified.minimal, classified.level
            for i in reversed(classified.cofaces):
                rebuilt = t.d(i, level, rebuilt)
                level += 1
            mismatch = ({(p, y) for p, y, _ in ways} != {(classified.level, classified.minimal)}
                        or rebuilt != x
                        or (q > 0 and (len(ways) == 1) != classified.unique))
            if mismatch:
                return VerificationReport(name, False, checked, (q, x),
                                          {'factorizations': len(ways), 'classified_level': classified.level})
    return VerificationReport(name, True, checked, None, {'q_limit': min(q_limit, t.q_max)})
