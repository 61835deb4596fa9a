"""Block supermatrices over the coefficient algebra with formal 1nu entries."""

from __future__ import annotations

from typing import Callable, Iterable, List, Mapping, Optional, Sequence, Tuple

import sympy

try:
    from core.algebra import AssumptionSet, GeneratorContext, PartitionRelation, SuperElement, invert as invert_element, substitute
    from core.nu import (
        NU_UNIT,
        FormalEntry,
        NuInvolution,
        NuUnit,
        Ring,
        entries_equal,
        entry_add,
        entry_is_zero,
        entry_mul,
        entry_parity,
        entry_sub,
        format_entry,
    )
    from utils.exceptions import DimensionMismatch, ParityViolation, Singular
except ImportError:
    from src.core.algebra import AssumptionSet, GeneratorContext, PartitionRelation, SuperElement, invert as invert_element, substitute
    from src.core.nu import (
        NU_UNIT,
        FormalEntry,
        NuInvolution,
        NuUnit,
        Ring,
        entries_equal,
        entry_add,
        entry_is_zero,
        entry_mul,
        entry_parity,
        entry_sub,
        format_entry,
    )
    from src.utils.exceptions import DimensionMismatch, ParityViolation, Singular


Split = Tuple[int, int]


class MultiIndex:
    """Strictly increasing 1-based column indices into an m|n column layout."""

    __slots__ = ("indices", "m", "n")

    def __init__(self, indices: Iterable[int], m: int, n: int) -> None:
        self.indices = tuple(indices)
        self.m = m
        self.n = n
        if list(self.indices) != sorted(set(self.indices)):
            raise DimensionMismatch(f"Multi-index {self.indices} must be strictly increasing")
        if self.indices and (self.indices[0] < 1 or self.indices[-1] > m + n):
            raise DimensionMismatch(f"Multi-index {self.indices} out of range 1..{m + n}")

    @property
    def even_count(self) -> int:
        return sum(1 for i in self.indices if i <= self.m)

    @property
    def odd_count(self) -> int:
        return len(self.indices) - self.even_count

    def is_balanced(self, k: int, l: int) -> bool:
        return self.even_count == k and self.odd_count == l

    def column_parity(self, column: int) -> int:
        return 0 if column <= self.m else 1

    def complement(self) -> Tuple[int, ...]:
        chosen = set(self.indices)
        return tuple(c for c in range(1, self.m + self.n + 1) if c not in chosen)

    @property
    def label(self) -> str:
        return "{" + ",".join(str(i) for i in self.indices) + "}"

    def __iter__(self):
        return iter(self.indices)

    def __len__(self) -> int:
        return len(self.indices)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultiIndex):
            return NotImplemented
        return (self.indices, self.m, self.n) == (other.indices, other.m, other.n)

    def __hash__(self) -> int:
        return hash((self.indices, self.m, self.n))

    def __lt__(self, other: "MultiIndex") -> bool:
        return self.indices < other.indices

    def __repr__(self) -> str:
        return f"MultiIndex({self.label})"

    def __getstate__(self):
        return (self.indices, self.m, self.n)

    def __setstate__(self, state) -> None:
        self.indices, self.m, self.n = state


class SuperMatrix:
    """A (k|l) x (m|n) matrix; even rows and columns come first."""

    __slots__ = ("row_split", "col_split", "entries", "context")

    def __init__(self, row_split: Split, col_split: Split, entries: Sequence[Sequence[FormalEntry]], context: GeneratorContext) -> None:
        self.row_split = tuple(row_split)
        self.col_split = tuple(col_split)
        self.entries = tuple(tuple(row) for row in entries)
        self.context = context
        if len(self.entries) != sum(self.row_split):
            raise DimensionMismatch(f"Expected {sum(self.row_split)} rows, got {len(self.entries)}")
        for row in self.entries:
            if len(row) != sum(self.col_split):
                raise DimensionMismatch(f"Expected {sum(self.col_split)} columns, got {len(row)}")

    @property
    def rows(self) -> int:
        return sum(self.row_split)

    @property
    def cols(self) -> int:
        return sum(self.col_split)

    def row_parity(self, i: int) -> int:
        return 0 if i < self.row_split[0] else 1

    def col_parity(self, j: int) -> int:
        return 0 if j < self.col_split[0] else 1

    def entry(self, i: int, j: int) -> FormalEntry:
        return self.entries[i][j]

    def map_entries(self, fn: Callable[[FormalEntry], FormalEntry], context: Optional[GeneratorContext] = None) -> "SuperMatrix":
        return SuperMatrix(self.row_split, self.col_split, [[fn(x) for x in row] for row in self.entries], context or self.context)

    def parity_violations(self) -> List[Tuple[int, int]]:
        bad = []
        for i, row in enumerate(self.entries):
            for j, x in enumerate(row):
                found = entry_parity(x)
                if found is not None and found != (self.row_parity(i) + self.col_parity(j)) % 2:
                    bad.append((i, j))
        return bad

    def validate(self) -> "SuperMatrix":
        bad = self.parity_violations()
        if bad:
            i, j = bad[0]
            raise ParityViolation(f"Entry ({i + 1},{j + 1}) = {format_entry(self.entries[i][j])} breaks block parity")
        return self

    def to_text(self) -> List[List[str]]:
        return [[format_entry(x) for x in row] for row in self.entries]

    def __repr__(self) -> str:
        return f"SuperMatrix({self.row_split}x{self.col_split}, {self.to_text()})"


# ----------------------------------------------------------------------
# Construction
# ----------------------------------------------------------------------


def scalar_entry(context: GeneratorContext, value) -> Ring:
    return Ring(SuperElement.scalar(context, value))


def zeros(context: GeneratorContext, row_split: Split, col_split: Split) -> SuperMatrix:
    zero = scalar_entry(context, 0)
    return SuperMatrix(row_split, col_split, [[zero] * sum(col_split) for _ in range(sum(row_split))], context)


def identity(context: GeneratorContext, k: int, l: int) -> SuperMatrix:
    size = k + l
    zero, one = scalar_entry(context, 0), scalar_entry(context, 1)
    return SuperMatrix((k, l), (k, l), [[one if i == j else zero for j in range(size)] for i in range(size)], context)


def pseudo_unit(index: MultiIndex, context: GeneratorContext, k: int, l: int) -> SuperMatrix:
    """Diagonal matrix with 1 where the parity of column i_a matches slot a and 1nu elsewhere.

    Rows follow the columns of the multi-index, columns the k|l layout, so
    the matrix right-multiplies a minor.
    """
    if len(index) != k + l:
        raise DimensionMismatch(f"{index} has {len(index)} entries, expected {k + l}")
    zero, one = scalar_entry(context, 0), scalar_entry(context, 1)
    rows = []
    for a, column in enumerate(index):
        slot_parity = 0 if a < k else 1
        diagonal = one if slot_parity == index.column_parity(column) else NU_UNIT
        rows.append([diagonal if b == a else zero for b in range(k + l)])
    return SuperMatrix((index.even_count, index.odd_count), (k, l), rows, context)


def minor(a: SuperMatrix, index: MultiIndex) -> SuperMatrix:
    if index.m != a.col_split[0] or index.n != a.col_split[1]:
        raise DimensionMismatch(f"{index} does not index the {a.col_split} columns")
    columns = [c - 1 for c in index]
    return SuperMatrix(a.row_split, (index.even_count, index.odd_count), [[row[c] for c in columns] for row in a.entries], a.context)


def select_rows(a: SuperMatrix, index: MultiIndex) -> SuperMatrix:
    if index.m != a.row_split[0] or index.n != a.row_split[1]:
        raise DimensionMismatch(f"{index} does not index the {a.row_split} rows")
    return SuperMatrix((index.even_count, index.odd_count), a.col_split, [a.entries[r - 1] for r in index], a.context)


def delete_columns(a: SuperMatrix, index: MultiIndex) -> SuperMatrix:
    kept = [c - 1 for c in index.complement()]
    even = sum(1 for c in kept if c < a.col_split[0])
    return SuperMatrix(a.row_split, (even, len(kept) - even), [[row[c] for c in kept] for row in a.entries], a.context)


# ----------------------------------------------------------------------
# Arithmetic
# ----------------------------------------------------------------------


def smul(a: SuperMatrix, b: SuperMatrix, involution: NuInvolution) -> SuperMatrix:
    if a.col_split != b.row_split:
        raise DimensionMismatch(f"Cannot multiply {a.row_split}x{a.col_split} by {b.row_split}x{b.col_split}")
    zero = scalar_entry(a.context, 0)
    rows = []
    for i in range(a.rows):
        row = []
        for j in range(b.cols):
            total: FormalEntry = zero
            for t in range(a.cols):
                total = entry_add(total, entry_mul(a.entries[i][t], b.entries[t][j], involution), involution)
            row.append(total)
        rows.append(row)
    return SuperMatrix(a.row_split, b.col_split, rows, a.context)


def add_matrices(a: SuperMatrix, b: SuperMatrix, involution: Optional[NuInvolution] = None) -> SuperMatrix:
    if (a.row_split, a.col_split) != (b.row_split, b.col_split):
        raise DimensionMismatch("Cannot add matrices of different shapes")
    rows = [[entry_add(x, y, involution) for x, y in zip(ra, rb)] for ra, rb in zip(a.entries, b.entries)]
    return SuperMatrix(a.row_split, a.col_split, rows, a.context)


def reduced_matrix(b: SuperMatrix) -> sympy.Matrix:
    """Bodies of the entries; odd generators go to zero and 1nu counts as a unit"""
    return sympy.Matrix([[sympy.Integer(1) if isinstance(x, NuUnit) else x.value.body() for x in row] for row in b.entries])


def reduced_determinant(b: SuperMatrix) -> sympy.Expr:
    """red(det B00) * red(det B11) for square blocks, else the determinant of the whole reduced matrix"""
    if b.rows != b.cols:
        raise DimensionMismatch(f"No determinant for a {b.row_split}x{b.col_split} matrix")
    body = reduced_matrix(b)
    if b.row_split != b.col_split:
        return sympy.factor(body.det())
    k = b.row_split[0]
    even = body[:k, :k].det() if k else sympy.Integer(1)
    odd = body[k:, k:].det() if b.rows > k else sympy.Integer(1)
    return sympy.factor(sympy.cancel(even * odd))


def _pivot_class(x: FormalEntry) -> Optional[int]:
    if isinstance(x, NuUnit):
        return 2
    if entry_is_zero(x):
        return None
    body = x.value.body()
    if body == 0:
        return None
    return 0 if body.is_number else 1


def invert(b: SuperMatrix, involution: NuInvolution, assumptions: Optional[AssumptionSet] = None) -> SuperMatrix:
    """Graded Gauss-Jordan elimination with left row operations.

    The matrix is singular exactly when its reduced determinant vanishes;
    otherwise that determinant is recorded as an assumption. Pivots with a
    constant body are preferred, then bodies that are nonconstant functions,
    then 1nu entries, whose row is scaled by 1nu first.
    """
    if b.rows != b.cols:
        raise DimensionMismatch(f"Cannot invert a {b.row_split}x{b.col_split} matrix")
    determinant = reduced_determinant(b)
    if determinant == 0:
        raise Singular("Reduced determinant vanishes identically")
    if assumptions is not None:
        assumptions.add(determinant)
    size = b.rows
    ident = identity(b.context, *b.row_split)
    rows: List[List[FormalEntry]] = [list(left) + list(right) for left, right in zip(b.entries, ident.entries)]

    for c in range(size):
        best: Optional[Tuple[int, int]] = None
        for r in range(c, size):
            kind = _pivot_class(rows[r][c])
            if kind is not None and (best is None or kind < best[0]):
                best = (kind, r)
        if best is None:
            raise Singular(f"Elimination stalls in column {c + 1}", column=c + 1)
        kind, r = best
        rows[c], rows[r] = rows[r], rows[c]
        if kind == 2:
            rows[c] = [entry_mul(NU_UNIT, x, involution) for x in rows[c]]
        pivot = rows[c][c]
        if isinstance(pivot, NuUnit) or pivot.value.body() == 0:
            raise Singular(f"Pivot in column {c + 1} is not invertible", column=c + 1)
        inverse = Ring(invert_element(pivot.value, assumptions))
        rows[c] = [entry_mul(inverse, x, involution) for x in rows[c]]
        for i in range(size):
            factor = rows[i][c]
            if i == c or entry_is_zero(factor):
                continue
            rows[i] = [entry_sub(x, entry_mul(factor, y, involution), involution) for x, y in zip(rows[i], rows[c])]

    return SuperMatrix(b.col_split, b.row_split, [row[size:] for row in rows], b.context)


def substitute_matrix(
    a: SuperMatrix,
    images: Mapping[str, SuperElement],
    target: GeneratorContext,
    assumptions: Optional[AssumptionSet] = None,
) -> SuperMatrix:
    """Apply a generator substitution entrywise; 1nu entries are kept formal"""

    def apply(x: FormalEntry) -> FormalEntry:
        if isinstance(x, NuUnit):
            return x
        return Ring(substitute(x.value, images, target, assumptions))

    return a.map_entries(apply, target)


def embed_matrix(a: SuperMatrix, target: GeneratorContext) -> SuperMatrix:
    return a.map_entries(lambda x: x if isinstance(x, NuUnit) else Ring(x.value.embed(target)), target)


def first_difference(
    a: SuperMatrix,
    b: SuperMatrix,
    involution: Optional[NuInvolution] = None,
    relation: Optional[PartitionRelation] = None,
) -> Optional[Tuple[int, int]]:
    """Position of the first differing entry, or None when the matrices agree.

    Only entries are compared; block splits may differ (a minor and the
    pseudo-unit it equals have transposed splits).
    """
    if (a.rows, a.cols) != (b.rows, b.cols):
        raise DimensionMismatch(f"{a.rows}x{a.cols} vs {b.rows}x{b.cols}")
    for i in range(a.rows):
        for j in range(a.cols):
            if not entries_equal(a.entries[i][j], b.entries[i][j], involution, relation):
                return (i, j)
    return None


def matrices_equal(
    a: SuperMatrix,
    b: SuperMatrix,
    involution: Optional[NuInvolution] = None,
    relation: Optional[PartitionRelation] = None,
) -> bool:
    return first_difference(a, b, involution, relation) is None
