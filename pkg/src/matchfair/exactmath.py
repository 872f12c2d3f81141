"""Exact rational scalars, vectors, matrices and linear-system solving.

Everything in matchfair is computed with ``fractions.Fraction``: numerators
and denominators are arbitrary-precision integers kept in lowest terms with
a positive denominator, so arithmetic never rounds.  Rationals are written
as ``"p/q"`` (or ``"p"`` for integers) wherever they are serialized.
"""

from __future__ import annotations

import operator
import re
import typing as t
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import StrEnum, auto
from fractions import Fraction

from matchfair.errors import DimensionError, ParseError

Rat = Fraction
"""Exact rational scalar."""

type Vector = tuple[Rat, ...]

ZERO: t.Final = Rat(0)
ONE: t.Final = Rat(1)

_RATIONAL = re.compile(r"^(?P<num>-?\d+)(?:/(?P<den>\d+))?$")


def parse_rat(text: str | int) -> Rat:
    """Parse a rational written as ``"p/q"`` or ``"p"``.

    Integers are accepted as-is.  Anything else (floats, decimals, spaces,
    exponents, a zero denominator) is rejected.

    Examples
    --------
    >>> parse_rat("2/6")
    Fraction(1, 3)
    >>> parse_rat("-4")
    Fraction(-4, 1)
    >>> parse_rat(7)
    Fraction(7, 1)
    >>> parse_rat("1/0")
    Traceback (most recent call last):
    ...
    matchfair.errors.ParseError: zero denominator in rational '1/0'
    >>> parse_rat("0.5")
    Traceback (most recent call last):
    ...
    matchfair.errors.ParseError: malformed rational '0.5' (expected "p/q" or "p")
    """
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        msg = f"malformed rational {text!r} (expected a string)"
        raise ParseError(msg)

    if isinstance(text, int):
        return Rat(text)

    if (match := _RATIONAL.match(text)) is None:
        msg = f'malformed rational {text!r} (expected "p/q" or "p")'
        raise ParseError(msg)

    den = int(match["den"] or 1)

    if den == 0:
        msg = f"zero denominator in rational {text!r}"
        raise ParseError(msg)

    return Rat(int(match["num"]), den)


def format_rat(value: Rat) -> str:
    """Format a rational as ``"p/q"``, or ``"p"`` when it is an integer.

    Examples
    --------
    >>> format_rat(Rat(2, 6)), format_rat(Rat(3)), format_rat(Rat(-1, 2))
    ('1/3', '3', '-1/2')
    """
    return str(value.numerator) if value.denominator == 1 else str(value)


def format_vector(values: Iterable[Rat]) -> list[str]:
    return [format_rat(value) for value in values]


class Op(StrEnum):
    """Binary operations on rationals."""

    ADD = auto()
    SUB = auto()
    MUL = auto()
    DIV = auto()
    CMP = auto()


_OPERATORS: t.Final = {
    Op.ADD: operator.add,
    Op.SUB: operator.sub,
    Op.MUL: operator.mul,
    Op.DIV: operator.truediv,
}


def rat_arith(a: Rat, b: Rat, op: Op | str) -> Rat | int:
    """Apply a binary operation to two rationals.

    ``cmp`` returns -1, 0 or 1 following real-number order.

    Examples
    --------
    >>> rat_arith(Rat(1, 3), Rat(1, 6), "add")
    Fraction(1, 2)
    >>> rat_arith(Rat(2, 3), Rat(3, 4), Op.MUL)
    Fraction(1, 2)
    >>> rat_arith(Rat(1, 3), Rat(1, 2), "cmp")
    -1
    >>> rat_arith(Rat(1, 3), ZERO, "div")
    Traceback (most recent call last):
    ...
    ZeroDivisionError: ...
    """
    op = Op(op)

    if op is Op.CMP:
        return (a > b) - (a < b)

    return t.cast(Rat, _OPERATORS[op](a, b))


def dot(u: Sequence[Rat], v: Sequence[Rat]) -> Rat:
    """Exact inner product.

    Examples
    --------
    >>> dot((Rat(1, 2), Rat(1, 3)), (Rat(2), Rat(3)))
    Fraction(2, 1)
    """
    if len(u) != len(v):
        msg = f"cannot take inner product of vectors of length {len(u)} and {len(v)}"
        raise DimensionError(msg)

    return sum((a * b for a, b in zip(u, v) if a and b), ZERO)


def axpy(alpha: Rat, x: Sequence[Rat], y: Sequence[Rat]) -> Vector:
    """Return ``alpha * x + y``."""
    return tuple(alpha * a + b for a, b in zip(x, y, strict=True))


def scale(alpha: Rat, x: Sequence[Rat]) -> Vector:
    return tuple(alpha * a for a in x)


def is_zero(x: Iterable[Rat]) -> bool:
    return not any(x)


@dataclass(frozen=True)
class RatMatrix:
    """Dense exact matrix stored row-major.

    Examples
    --------
    >>> m = RatMatrix.from_rows([[1, 2], [3, 4]])
    >>> m.rows, m.cols, m[1, 0]
    (2, 2, Fraction(3, 1))
    >>> m.matvec([Rat(1), Rat(1)])
    (Fraction(3, 1), Fraction(7, 1))
    >>> m.transpose().to_rows()[0]
    (Fraction(1, 1), Fraction(3, 1))
    """

    rows: int
    cols: int
    entries: Vector

    def __post_init__(self) -> None:
        if len(self.entries) != self.rows * self.cols:
            msg = (
                f"matrix of shape {self.rows}x{self.cols} needs "
                f"{self.rows * self.cols} entries, got {len(self.entries)}"
            )
            raise DimensionError(msg)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Rat | int]], cols: int | None = None) -> t.Self:
        width = len(rows[0]) if rows else (cols or 0)

        if any(len(row) != width for row in rows):
            msg = "matrix rows have differing lengths"
            raise DimensionError(msg)

        return cls(len(rows), width, tuple(Rat(v) for row in rows for v in row))

    @classmethod
    def identity(cls, n: int) -> t.Self:
        return cls(n, n, tuple(ONE if i == j else ZERO for i in range(n) for j in range(n)))

    def __getitem__(self, index: tuple[int, int]) -> Rat:
        i, j = index
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Vector:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def column(self, j: int) -> Vector:
        return self.entries[j :: self.cols]

    def to_rows(self) -> tuple[Vector, ...]:
        return tuple(self.row(i) for i in range(self.rows))

    def transpose(self) -> RatMatrix:
        return RatMatrix(
            self.cols, self.rows, tuple(v for j in range(self.cols) for v in self.column(j))
        )

    def matvec(self, x: Sequence[Rat]) -> Vector:
        if len(x) != self.cols:
            msg = f"matrix has {self.cols} columns but vector has length {len(x)}"
            raise DimensionError(msg)

        return tuple(dot(self.row(i), x) for i in range(self.rows))

    def rank(self) -> int:
        """Exact rank.

        Examples
        --------
        >>> RatMatrix.from_rows([[1, 1], [2, 2]]).rank()
        1
        """
        return len(_reduce(self.to_rows(), self.cols)[1])


@dataclass(frozen=True)
class Unique:
    """The system has exactly one solution."""

    solution: Vector


@dataclass(frozen=True)
class Parametric:
    """Solutions are ``particular + span(basis)``; ``basis`` spans the null space."""

    particular: Vector
    basis: tuple[Vector, ...]


@dataclass(frozen=True)
class Inconsistent:
    """No solution exists.

    ``witness`` holds row multipliers ``y`` with ``y·A = 0`` and ``y·b != 0``.
    """

    witness: Vector


type LinearSolution = Unique | Parametric | Inconsistent


def _reduce(
    rows: Sequence[Sequence[Rat]], width: int
) -> tuple[list[list[Rat]], list[int]]:
    """Reduced row echelon form over the first ``width`` columns.

    Columns beyond ``width`` are carried along (right-hand sides, row
    bookkeeping) but never pivoted on.  The pivot for each column is the
    first remaining row with a nonzero entry.
    """
    work = [list(row) for row in rows]
    pivots: list[int] = []
    r = 0

    for c in range(width):
        if (p := next((i for i in range(r, len(work)) if work[i][c]), None)) is None:
            continue

        work[r], work[p] = work[p], work[r]
        lead = work[r][c]
        work[r] = [v / lead for v in work[r]]

        for i, row in enumerate(work):
            if i != r and (f := row[c]):
                work[i] = [a - f * b for a, b in zip(row, work[r])]

        pivots.append(c)
        r += 1

    return work, pivots


def solve_linear(a: RatMatrix, b: Sequence[Rat]) -> LinearSolution:
    """Solve ``A x = b`` exactly by Gauss-Jordan elimination.

    Examples
    --------
    >>> solve_linear(RatMatrix.identity(2), (Rat(1, 2), Rat(3)))
    Unique(solution=(Fraction(1, 2), Fraction(3, 1)))
    >>> solve_linear(RatMatrix.from_rows([[1, 1], [1, 1]]), (Rat(1), Rat(2)))
    Inconsistent(witness=(Fraction(-1, 1), Fraction(1, 1)))
    >>> result = solve_linear(RatMatrix.from_rows([[1, 1], [0, 0]]), (ONE, ZERO))
    >>> result.particular, len(result.basis)
    ((Fraction(1, 1), Fraction(0, 1)), 1)
    >>> result.basis[0]
    (Fraction(-1, 1), Fraction(1, 1))
    """
    if len(b) != a.rows:
        msg = f"matrix has {a.rows} rows but right-hand side has length {len(b)}"
        raise DimensionError(msg)

    n = a.cols
    augmented = [
        [*a.row(i), Rat(b[i]), *(ONE if k == i else ZERO for k in range(a.rows))]
        for i in range(a.rows)
    ]
    work, pivots = _reduce(augmented, n)
    rank = len(pivots)

    for row in work[rank:]:
        if row[n]:
            return Inconsistent(tuple(row[n + 1 :]))

    particular = [ZERO] * n

    for k, c in enumerate(pivots):
        particular[c] = work[k][n]

    if rank == n:
        return Unique(tuple(particular))

    free = [c for c in range(n) if c not in pivots]
    basis = []

    for f in free:
        v = [ZERO] * n
        v[f] = ONE

        for k, c in enumerate(pivots):
            v[c] = -work[k][f]

        basis.append(tuple(v))

    return Parametric(tuple(particular), tuple(basis))


class EchelonBasis:
    """Incrementally maintained set of linearly independent rows.

    Used to skip rank-deficient selections while enumerating tight sets.

    Examples
    --------
    >>> basis = EchelonBasis(2)
    >>> basis.extend((ONE, ONE)) is not None
    True
    >>> basis.extend((Rat(2), Rat(2))) is None
    True
    """

    def __init__(self, width: int, rows: tuple[tuple[int, Vector], ...] = ()) -> None:
        self.width = width
        self._rows = rows

    def __len__(self) -> int:
        return len(self._rows)

    def extend(self, row: Sequence[Rat]) -> EchelonBasis | None:
        """Return a new basis including ``row``, or None if it is dependent."""
        reduced = list(row)

        for pivot, basis_row in self._rows:
            if f := reduced[pivot]:
                reduced = [a - f * b for a, b in zip(reduced, basis_row)]

        if (pivot := next((j for j, v in enumerate(reduced) if v), None)) is None:
            return None

        lead = reduced[pivot]
        normalized = tuple(v / lead for v in reduced)

        return EchelonBasis(self.width, (*self._rows, (pivot, normalized)))
