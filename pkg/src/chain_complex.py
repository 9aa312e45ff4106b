"""Free chain complexes over the integers.

Bases are ordered lists of hashable keys, boundaries are sparse integer
matrices, and homology is read off Smith normal forms. Every verification
in the library reports through :class:`VerificationReport`.
"""
from dataclasses import dataclass, field
from math import gcd
from typing import Any, Callable, Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

from errors import AssemblyError, ShapeError
from logger import get_logger

logger = get_logger(__name__)

Combination = Dict[Hashable, int]


def add_term(combo: Combination, key: Hashable, coeff: int) -> None:
    """Add ``coeff * key`` to a combination in place, dropping zeros."""
    if not coeff:
        return
    value = combo.get(key, 0) + coeff
    if value:
        combo[key] = value
    else:
        del combo[key]


def add_into(target: Combination, source: Mapping[Hashable, int], scale: int = 1) -> Combination:
    """Add ``scale * source`` into ``target`` and return ``target``."""
    for key, coeff in source.items():
        add_term(target, key, scale * coeff)
    return target


def scaled(combo: Mapping[Hashable, int], scale: int) -> Combination:
    """Return ``scale * combo`` as a new combination."""
    if not scale:
        return {}
    return {key: scale * coeff for key, coeff in combo.items() if coeff}


@dataclass(frozen=True)
class SparseIntMatrix:
    """Integer matrix stored as its nonzero entries.

    Attributes:
        rows: Number of rows
        cols: Number of columns
        entries: Tuple of (row, col, value) with unique positions, no zeros
    """
    rows: int
    cols: int
    entries: Tuple[Tuple[int, int, int], ...] = ()

    def __post_init__(self):
        seen = set()
        for row, col, value in self.entries:
            if not 0 <= row < self.rows or not 0 <= col < self.cols:
                raise ShapeError(f"entry ({row}, {col}) outside a {self.rows}x{self.cols} matrix")
            if (row, col) in seen:
                raise ShapeError(f"duplicate entry at ({row}, {col})")
            if value == 0:
                raise ShapeError(f"zero stored at ({row}, {col})")
            seen.add((row, col))

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence[int]], cols: Optional[int] = None) -> 'SparseIntMatrix':
        """Build from a list of rows."""
        rows = len(dense)
        if cols is None:
            cols = len(dense[0]) if rows else 0
        entries = tuple((i, j, value)
                        for i, row in enumerate(dense)
                        for j, value in enumerate(row) if value)
        return cls(rows, cols, entries)

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence[Mapping[int, int]]) -> 'SparseIntMatrix':
        """Build from a sequence of columns, each a mapping row -> value."""
        entries = tuple(sorted((i, j, value)
                               for j, column in enumerate(columns)
                               for i, value in column.items() if value))
        return cls(rows, len(columns), entries)

    @classmethod
    def identity(cls, size: int) -> 'SparseIntMatrix':
        """Return the size x size identity matrix."""
        return cls(size, size, tuple((i, i, 1) for i in range(size)))

    @classmethod
    def zero(cls, rows: int, cols: int) -> 'SparseIntMatrix':
        """Return the rows x cols zero matrix."""
        return cls(rows, cols, ())

    def to_dense(self) -> List[List[int]]:
        """Return the matrix as a list of rows."""
        dense = [[0] * self.cols for _ in range(self.rows)]
        for row, col, value in self.entries:
            dense[row][col] = value
        return dense

    def column(self, col: int) -> Dict[int, int]:
        """Return column ``col`` as a mapping row -> value."""
        return {row: value for row, c, value in self.entries if c == col}

    def columns(self) -> List[Dict[int, int]]:
        """Return all columns as mappings row -> value."""
        cols: List[Dict[int, int]] = [{} for _ in range(self.cols)]
        for row, col, value in self.entries:
            cols[col][row] = value
        return cols

    def is_zero(self) -> bool:
        """Whether every entry vanishes."""
        return not self.entries

    def __matmul__(self, other: 'SparseIntMatrix') -> 'SparseIntMatrix':
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        by_row: Dict[int, List[Tuple[int, int]]] = {}
        for row, col, value in other.entries:
            by_row.setdefault(row, []).append((col, value))
        product: Dict[Tuple[int, int], int] = {}
        for row, mid, value in self.entries:
            for col, other_value in by_row.get(mid, ()):
                key = (row, col)
                product[key] = product.get(key, 0) + value * other_value
        entries = tuple(sorted((r, c, v) for (r, c), v in product.items() if v))
        return SparseIntMatrix(self.rows, other.cols, entries)

    def __add__(self, other: 'SparseIntMatrix') -> 'SparseIntMatrix':
        return self._combine(other, 1)

    def __sub__(self, other: 'SparseIntMatrix') -> 'SparseIntMatrix':
        return self._combine(other, -1)

    def __neg__(self) -> 'SparseIntMatrix':
        return SparseIntMatrix(self.rows, self.cols, tuple((r, c, -v) for r, c, v in self.entries))

    def _combine(self, other: 'SparseIntMatrix', sign: int) -> 'SparseIntMatrix':
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeError(f"cannot add {self.rows}x{self.cols} and {other.rows}x{other.cols}")
        total: Dict[Tuple[int, int], int] = {}
        for row, col, value in self.entries:
            total[(row, col)] = value
        for row, col, value in other.entries:
            total[(row, col)] = total.get((row, col), 0) + sign * value
        entries = tuple(sorted((r, c, v) for (r, c), v in total.items() if v))
        return SparseIntMatrix(self.rows, self.cols, entries)

    def apply(self, vector: Sequence[int]) -> List[int]:
        """Return ``self * vector``."""
        if len(vector) != self.cols:
            raise ShapeError(f"vector of length {len(vector)} for {self.cols} columns")
        result = [0] * self.rows
        for row, col, value in self.entries:
            result[row] += value * vector[col]
        return result


@dataclass(frozen=True)
class SmithForm:
    """Result of a Smith normal form computation: ``S * M * T = diag``.

    Attributes:
        left: Unimodular row transform S (dense)
        diagonal: Nonzero invariant factors d_1 | d_2 | ...
        right: Unimodular column transform T (dense)
    """
    left: List[List[int]]
    diagonal: Tuple[int, ...]
    right: List[List[int]]

    @property
    def rank(self) -> int:
        """Rank of the matrix."""
        return len(self.diagonal)


@dataclass
class VerificationReport:
    """Outcome of a verification.

    Attributes:
        name: Short identifier of the check
        passed: Whether every checked instance passed
        checked: Number of instances examined
        witness: First failing instance, if any
        details: Free-form extra data (JSON-serializable)
    """
    name: str
    passed: bool
    checked: int = 0
    witness: Any = None
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        """Return a JSON-serializable view of the report."""
        return {
            'name': self.name,
            'passed': self.passed,
            'checked': self.checked,
            'witness': None if self.witness is None else repr(self.witness),
            'details': self.details,
        }


def smith_normal_form(matrix: SparseIntMatrix, check: bool = False) -> SmithForm:
    """Compute the Smith normal form of an integer matrix.

    Pivots on the smallest nonzero absolute value and reduces its row and
    column by integer division until both are clear, then enforces the
    divisibility chain.

    Args:
        matrix: The matrix to diagonalize
        check: Recompose ``S * M * T`` and compare with the diagonal

    Returns:
        SmithForm with unimodular transforms and invariant factors
    """
    rows, cols = matrix.rows, matrix.cols
    a = matrix.to_dense()
    left = [[int(i == j) for j in range(rows)] for i in range(rows)]
    right = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def swap_rows(i: int, j: int) -> None:
        a[i], a[j] = a[j], a[i]
        left[i], left[j] = left[j], left[i]

    def swap_cols(i: int, j: int) -> None:
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in right:
            row[i], row[j] = row[j], row[i]

    def add_row(target: int, source: int, factor: int) -> None:
        a[target] = [x + factor * y for x, y in zip(a[target], a[source])]
        left[target] = [x + factor * y for x, y in zip(left[target], left[source])]

    def add_col(target: int, source: int, factor: int) -> None:
        for row in a:
            row[target] += factor * row[source]
        for row in right:
            row[target] += factor * row[source]

    t = 0
    while t < min(rows, cols):
        pivot = None
        for i in range(t, rows):
            for j in range(t, cols):
                if a[i][j] and (pivot is None or abs(a[i][j]) < abs(a[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        while True:
            clean = True
            for i in range(t + 1, rows):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // a[t][t]))
                    clean = clean and not a[i][t]
            for j in range(t + 1, cols):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // a[t][t]))
                    clean = clean and not a[t][j]
            if not clean:
                best = (t, t)
                for i in range(t + 1, rows):
                    if a[i][t] and abs(a[i][t]) < abs(a[best[0]][best[1]]):
                        best = (i, t)
                for j in range(t + 1, cols):
                    if a[t][j] and abs(a[t][j]) < abs(a[best[0]][best[1]]):
                        best = (t, j)
                swap_rows(t, best[0])
                swap_cols(t, best[1])
                continue
            offender = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                             if a[i][j] % a[t][t]), None)
            if offender is None:
                break
            add_row(t, offender[0], 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            left[t] = [-x for x in left[t]]
        t += 1

    form = SmithForm(left=left, diagonal=tuple(a[i][i] for i in range(t)), right=right)
    if check:
        _check_smith(matrix, form)
    return form


def _check_smith(matrix: SparseIntMatrix, form: SmithForm) -> None:
    left = SparseIntMatrix.from_dense(form.left, matrix.rows)
    right = SparseIntMatrix.from_dense(form.right, matrix.cols)
    recomposed = (left @ matrix @ right).to_dense()
    for i, row in enumerate(recomposed):
        for j, value in enumerate(row):
            expected = form.diagonal[i] if i == j and i < form.rank else 0
            if value != expected:
                raise AssemblyError(f"Smith recomposition differs at ({i}, {j})", witness=(i, j))
    for first, second in zip(form.diagonal, form.diagonal[1:]):
        if second % first:
            raise AssemblyError(f"invariant factors {first} does not divide {second}")


def _unit_pivot(column: Mapping[int, int], rows: Mapping[int, set]) -> Optional[int]:
    best = None
    for i, value in column.items():
        if value in (1, -1) and (best is None or len(rows[i]) < len(rows[best])):
            best = i
    return best


def elimination_invariants(matrix: SparseIntMatrix) -> Tuple[int, Tuple[int, ...]]:
    """Rank and the invariant factors above one, without the transforms.

    Unit entries are eliminated in place on the sparse columns: clearing
    the pivot row and column leaves a block with the same remaining
    invariant factors. Whatever has no unit left goes through
    :func:`smith_normal_form`.

    Returns:
        (rank, factors > 1 in divisibility order)
    """
    cols = {j: dict(col) for j, col in enumerate(matrix.columns()) if col}
    rows: Dict[int, set] = {}
    for j, col in cols.items():
        for i in col:
            rows.setdefault(i, set()).add(j)
    rank = 0
    progress = True
    while progress:
        progress = False
        for j in list(cols):
            col = cols.get(j)
            if col is None:
                continue
            i = _unit_pivot(col, rows)
            if i is None:
                continue
            unit = col[i]
            for k in rows[i] - {j}:
                other = cols[k]
                factor = other[i] * unit
                for r, value in col.items():
                    updated = other.get(r, 0) - factor * value
                    if updated:
                        if r not in other:
                            rows[r].add(k)
                        other[r] = updated
                    elif r in other:
                        del other[r]
                        rows[r].discard(k)
                if not other:
                    del cols[k]
            for r in col:
                rows[r].discard(j)
            del cols[j]
            rank += 1
            progress = True
    if not cols:
        return rank, ()
    row_index = {r: n for n, r in enumerate(sorted({r for col in cols.values() for r in col}))}
    residue = SparseIntMatrix.from_columns(
        len(row_index), [{row_index[r]: v for r, v in col.items()} for col in cols.values()])
    form = smith_normal_form(residue)
    logger.debug("Unit elimination left a residue", extra={'shape': (residue.rows, residue.cols)})
    return rank + form.rank, tuple(t for t in form.diagonal if t > 1)


@dataclass(frozen=True)
class HomologyGroup:
    """Finitely generated abelian group Z^betti + sum of Z/t."""
    betti: int
    torsion: Tuple[int, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        """Return a JSON-serializable view."""
        return {'betti': self.betti, 'torsion': list(self.torsion)}

    def __str__(self) -> str:
        parts = ['Z' if self.betti == 1 else f'Z^{self.betti}'] if self.betti else []
        parts += [f'Z/{t}' for t in self.torsion]
        return ' + '.join(parts) if parts else '0'


class FreeChainComplex:
    """Graded free Z-module with boundary matrices of degree -1.

    ``boundary[d]`` maps the degree-d basis (columns) to the degree d-1
    basis (rows). Missing degrees are zero.
    """

    def __init__(self, basis: Mapping[int, Sequence[Hashable]],
                 boundary: Mapping[int, SparseIntMatrix]):
        self.basis: Dict[int, List[Hashable]] = {d: list(keys) for d, keys in basis.items()}
        self.boundary: Dict[int, SparseIntMatrix] = dict(boundary)
        self._index = {d: {key: i for i, key in enumerate(keys)} for d, keys in self.basis.items()}
        self._smith: Dict[int, SmithForm] = {}
        self._invariants: Dict[int, Tuple[int, Tuple[int, ...]]] = {}

    def degrees(self) -> List[int]:
        """Degrees with a nonempty basis, ascending."""
        return sorted(d for d, keys in self.basis.items() if keys)

    def dimension(self, degree: int) -> int:
        """Rank of the chain group in ``degree``."""
        return len(self.basis.get(degree, ()))

    def index(self, degree: int, key: Hashable) -> int:
        """Position of ``key`` in the degree basis."""
        return self._index[degree][key]

    def boundary_matrix(self, degree: int) -> SparseIntMatrix:
        """Boundary out of ``degree`` (zero matrix when not stored)."""
        if degree in self.boundary:
            return self.boundary[degree]
        return SparseIntMatrix.zero(self.dimension(degree - 1), self.dimension(degree))

    def vector(self, degree: int, combo: Mapping[Hashable, int]) -> List[int]:
        """Coordinates of a combination of degree-``degree`` keys."""
        vec = [0] * self.dimension(degree)
        for key, coeff in combo.items():
            if key not in self._index.get(degree, {}):
                raise ShapeError(f"{key!r} is not a basis element in degree {degree}")
            vec[self._index[degree][key]] += coeff
        return vec

    def combination(self, degree: int, vector: Sequence[int]) -> Combination:
        """Inverse of :meth:`vector`."""
        return {self.basis[degree][i]: v for i, v in enumerate(vector) if v}

    def differential(self, degree: int, combo: Mapping[Hashable, int]) -> Combination:
        """Apply the boundary to a combination of degree-``degree`` keys."""
        image = self.boundary_matrix(degree).apply(self.vector(degree, combo))
        return self.combination(degree - 1, image) if image else {}

    def smith(self, degree: int) -> SmithForm:
        """Cached Smith form of the boundary out of ``degree``."""
        if degree not in self._smith:
            self._smith[degree] = smith_normal_form(self.boundary_matrix(degree))
        return self._smith[degree]

    def invariants(self, degree: int) -> Tuple[int, Tuple[int, ...]]:
        """Cached rank and torsion factors of the boundary out of ``degree``."""
        if degree not in self._invariants:
            if degree in self._smith:
                form = self._smith[degree]
                self._invariants[degree] = (form.rank, tuple(t for t in form.diagonal if t > 1))
            else:
                self._invariants[degree] = elimination_invariants(self.boundary_matrix(degree))
        return self._invariants[degree]


def matrix_of(fn: Callable[[Hashable], Mapping[Hashable, int]],
              source_keys: Sequence[Hashable], target_keys: Sequence[Hashable],
              drop_unknown: bool = False) -> SparseIntMatrix:
    """Matrix of a linear map given on basis keys.

    Args:
        fn: Image of each source key as a combination of target keys
        source_keys: Ordered source basis (columns)
        target_keys: Ordered target basis (rows)
        drop_unknown: Silently drop target keys outside ``target_keys``
            (quotient truncations); otherwise they raise ShapeError

    Returns:
        SparseIntMatrix of shape len(target_keys) x len(source_keys)
    """
    index = {key: i for i, key in enumerate(target_keys)}
    columns = []
    for key in source_keys:
        column: Dict[int, int] = {}
        for target, coeff in fn(key).items():
            if target not in index:
                if drop_unknown:
                    continue
                raise ShapeError(f"image of {key!r} contains {target!r} outside the target basis")
            column[index[target]] = column.get(index[target], 0) + coeff
        columns.append(column)
    return SparseIntMatrix.from_columns(len(target_keys), columns)


def assemble(basis: Mapping[int, Sequence[Hashable]],
             boundary_fn: Callable[[Hashable], Mapping[Hashable, int]],
             drop_unknown: bool = False, name: str = 'complex') -> FreeChainComplex:
    """Build a free chain complex and verify d^2 = 0.

    Args:
        basis: Degree -> ordered basis keys
        boundary_fn: Boundary of a basis key as a combination one degree lower
        drop_unknown: Drop image keys outside the basis (quotient truncation)
        name: Label used in logs and errors

    Returns:
        The assembled FreeChainComplex

    Raises:
        AssemblyError: If some basis element has nonzero d^2
    """
    degree_of = {key: d for d, keys in basis.items() for key in keys}
    images: Dict[Hashable, Combination] = {}
    for key, degree in degree_of.items():
        image: Combination = {}
        for target, coeff in boundary_fn(key).items():
            if degree_of.get(target) != degree - 1:
                if drop_unknown:
                    continue
                raise ShapeError(f"{name}: d({key!r}) contains {target!r} outside degree {degree - 1}")
            add_term(image, target, coeff)
        images[key] = image

    for key, image in images.items():
        composite: Combination = {}
        for target, coeff in image.items():
            add_into(composite, images[target], coeff)
        if composite:
            raise AssemblyError(f"{name}: d^2 is nonzero on {key!r}", witness=key, column=composite)

    boundary = {}
    for degree, keys in basis.items():
        if degree - 1 in basis:
            boundary[degree] = matrix_of(images.__getitem__, keys, basis[degree - 1])
    logger.debug("Assembled %s", name,
                 extra={'complex': name, 'ranks': {d: len(k) for d, k in basis.items()}})
    return FreeChainComplex(basis, boundary)


def homology(c: FreeChainComplex, degree: int, coefficients: str = 'Z') -> HomologyGroup:
    """Homology in one degree.

    Args:
        c: Assembled complex
        degree: Degree to compute
        coefficients: 'Z' for integral homology, 'Q' for rational ranks

    Returns:
        HomologyGroup(betti, torsion); torsion is empty over Q
    """
    outgoing, _ = c.invariants(degree)
    incoming, factors = c.invariants(degree + 1)
    betti = c.dimension(degree) - outgoing - incoming
    torsion = () if coefficients == 'Q' else factors
    return HomologyGroup(betti, torsion)


def class_order(c: FreeChainComplex, degree: int, combo: Mapping[Hashable, int]) -> int:
    """Order of the homology class of a cycle.

    Returns:
        0 for infinite order, 1 when the cycle is a boundary, otherwise the
        finite order of its class

    Raises:
        ShapeError: If ``combo`` is not a cycle
    """
    vec = c.vector(degree, combo)
    if any(c.boundary_matrix(degree).apply(vec)):
        raise ShapeError(f"not a cycle in degree {degree}")
    form = c.smith(degree + 1)
    transformed = [sum(s * v for s, v in zip(row, vec)) for row in form.left]
    if any(transformed[form.rank:]):
        return 0
    order = 1
    for factor, value in zip(form.diagonal, transformed):
        part = factor // gcd(factor, value)
        order = order * part // gcd(order, part)
    return order


def is_boundary(c: FreeChainComplex, degree: int, combo: Mapping[Hashable, int],
                coefficients: str = 'Z') -> bool:
    """Whether a cycle bounds, over Z or over Q."""
    order = class_order(c, degree, combo)
    if coefficients == 'Q':
        return order != 0
    return order == 1


def identity_map(c: FreeChainComplex) -> Dict[int, SparseIntMatrix]:
    """Degreewise identity matrices."""
    return {d: SparseIntMatrix.identity(c.dimension(d)) for d in c.basis}


def _zero_like(rows: int, cols: int, maps: Optional[Mapping[int, SparseIntMatrix]], degree: int) -> SparseIntMatrix:
    if maps is not None and degree in maps:
        return maps[degree]
    return SparseIntMatrix.zero(rows, cols)


def verify_chain_map(f: Mapping[int, SparseIntMatrix], source: FreeChainComplex,
                     target: FreeChainComplex, shift: int = 0,
                     degrees: Optional[Iterable[int]] = None) -> VerificationReport:
    """Check ``d f = (-1)^shift f d`` for a map of degree ``shift``.

    Args:
        f: Degree -> matrix from source degree d to target degree d+shift
        source: Source complex
        target: Target complex
        shift: Degree of the map
        degrees: Source degrees to check (default: all)

    Returns:
        VerificationReport naming the first failing (degree, basis key)

    Raises:
        ShapeError: If a component has the wrong shape
    """
    sign = -1 if shift % 2 else 1
    checked = 0
    for degree in sorted(degrees if degrees is not None else source.basis):
        rows, cols = target.dimension(degree + shift), source.dimension(degree)
        f_d = _zero_like(rows, cols, f, degree)
        if (f_d.rows, f_d.cols) != (rows, cols):
            raise ShapeError(f"map in degree {degree} is {f_d.rows}x{f_d.cols}, expected {rows}x{cols}")
        f_below = _zero_like(target.dimension(degree + shift - 1), source.dimension(degree - 1), f, degree - 1)
        lhs = target.boundary_matrix(degree + shift) @ f_d
        rhs = f_below @ source.boundary_matrix(degree)
        difference = lhs - (rhs if sign == 1 else -rhs)
        checked += cols
        if not difference.is_zero():
            col = difference.entries[0][1]
            return VerificationReport('chain_map', False, checked,
                                      witness=(degree, source.basis[degree][col]))
    return VerificationReport('chain_map', True, checked)


def verify_homotopy(s: Mapping[int, SparseIntMatrix], f: Optional[Mapping[int, SparseIntMatrix]],
                    g: Optional[Mapping[int, SparseIntMatrix]], source: FreeChainComplex,
                    target: FreeChainComplex, degrees: Optional[Iterable[int]] = None,
                    name: str = 'homotopy') -> VerificationReport:
    """Check ``d s + s d = f - g`` degreewise.

    Args:
        s: Degree -> matrix from source degree d to target degree d+1
        f: Degree-0 map (None means zero)
        g: Degree-0 map (None means zero)
        source: Source complex
        target: Target complex
        degrees: Source degrees to check (default: all)
        name: Report name

    Returns:
        VerificationReport with the first failing (degree, basis key)
    """
    checked = 0
    for degree in sorted(degrees if degrees is not None else source.basis):
        cols = source.dimension(degree)
        s_d = _zero_like(target.dimension(degree + 1), cols, s, degree)
        s_below = _zero_like(target.dimension(degree), source.dimension(degree - 1), s, degree - 1)
        if (s_d.rows, s_d.cols) != (target.dimension(degree + 1), cols):
            raise ShapeError(f"homotopy in degree {degree} has shape {s_d.rows}x{s_d.cols}")
        lhs = target.boundary_matrix(degree + 1) @ s_d + s_below @ source.boundary_matrix(degree)
        rhs = (_zero_like(target.dimension(degree), cols, f, degree)
               - _zero_like(target.dimension(degree), cols, g, degree))
        difference = lhs - rhs
        checked += cols
        if not difference.is_zero():
            col = difference.entries[0][1]
            return VerificationReport(name, False, checked, witness=(degree, source.basis[degree][col]))
    return VerificationReport(name, True, checked)
