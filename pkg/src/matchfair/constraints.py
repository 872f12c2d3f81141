"""Rational constraint systems.

A ``ConstraintSystem`` is a named list of equality rows ``a·x = b`` and
inequality rows ``a·x <= b`` over ``num_vars`` free variables.  Sign
constraints are ordinary rows (``-x_j <= 0``); the simplex solver recognizes
them and treats the variable as nonnegative instead of splitting it.
"""

from __future__ import annotations

import typing as t
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from enum import StrEnum, auto

from matchfair.errors import DimensionError, ParseError
from matchfair.exactmath import ZERO, Rat, Vector, dot, format_rat, format_vector, parse_rat


class RowKind(StrEnum):
    EQ = auto()
    LE = auto()


@dataclass(frozen=True)
class Row:
    """A named constraint row."""

    name: str
    coefficients: Vector
    rhs: Rat

    @classmethod
    def of(cls, name: str, coefficients: Iterable[Rat | int], rhs: Rat | int) -> t.Self:
        return cls(name, tuple(Rat(c) for c in coefficients), Rat(rhs))

    @classmethod
    def sparse(
        cls, name: str, num_vars: int, coefficients: Mapping[int, Rat | int], rhs: Rat | int
    ) -> t.Self:
        """Build a row from ``{variable index: coefficient}``.

        Examples
        --------
        >>> Row.sparse("cap", 3, {0: 1, 2: 2}, 1).coefficients
        (Fraction(1, 1), Fraction(0, 1), Fraction(2, 1))
        """
        dense = [ZERO] * num_vars

        for j, c in coefficients.items():
            dense[j] += c

        return cls(name, tuple(dense), Rat(rhs))

    def slack(self, point: Sequence[Rat]) -> Rat:
        """Return ``rhs - a·point``."""
        return self.rhs - dot(self.coefficients, point)

    def is_vacuous(self) -> bool:
        """True when every coefficient is zero."""
        return not any(self.coefficients)

    def padded(self, width: int) -> Row:
        """Return this row with zero coefficients appended up to ``width``."""
        return Row(self.name, self.coefficients + (ZERO,) * (width - len(self.coefficients)), self.rhs)


@dataclass(frozen=True)
class Membership:
    """Result of an exact membership test."""

    satisfied: bool
    violated: tuple[str, ...] = ()


@dataclass(frozen=True)
class ConstraintSystem:
    """A rational polyhedron given by named rows.

    Examples
    --------
    >>> square = unit_box(2)
    >>> square.num_vars, len(square.equalities), len(square.inequalities)
    (2, 0, 4)
    >>> [row.name for row in square.inequalities]
    ['lower(x1)', 'upper(x1)', 'lower(x2)', 'upper(x2)']
    >>> ConstraintSystem(2, inequalities=(Row.of("a", [1], 0),))
    Traceback (most recent call last):
    ...
    matchfair.errors.DimensionError: row 'a' has 1 coefficients, expected 2
    """

    num_vars: int
    equalities: tuple[Row, ...] = ()
    inequalities: tuple[Row, ...] = ()
    variables: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        names: set[str] = set()

        for row in self.rows():
            if len(row.coefficients) != self.num_vars:
                msg = (
                    f"row {row.name!r} has {len(row.coefficients)} coefficients, "
                    f"expected {self.num_vars}"
                )
                raise DimensionError(msg)

            if row.name in names:
                msg = f"duplicate row name {row.name!r}"
                raise ValueError(msg)

            names.add(row.name)

        if not self.variables:
            object.__setattr__(
                self, "variables", tuple(f"x{j + 1}" for j in range(self.num_vars))
            )
        elif len(self.variables) != self.num_vars:
            msg = f"{len(self.variables)} variable names given for {self.num_vars} variables"
            raise DimensionError(msg)

    def rows(self) -> Iterator[Row]:
        yield from self.equalities
        yield from self.inequalities

    def row_count(self) -> int:
        return len(self.equalities) + len(self.inequalities)

    def extend(
        self,
        *,
        equalities: Iterable[Row] = (),
        inequalities: Iterable[Row] = (),
    ) -> ConstraintSystem:
        """Return a system with additional rows (same variables)."""
        return ConstraintSystem(
            self.num_vars,
            (*self.equalities, *equalities),
            (*self.inequalities, *inequalities),
            self.variables,
        )

    def widen(self, names: Sequence[str]) -> ConstraintSystem:
        """Return the same rows over ``num_vars + len(names)`` variables.

        The new variables get zero coefficients in every existing row.
        """
        width = self.num_vars + len(names)

        return ConstraintSystem(
            width,
            tuple(row.padded(width) for row in self.equalities),
            tuple(row.padded(width) for row in self.inequalities),
            (*self.variables, *names),
        )

    def to_json(self) -> dict[str, t.Any]:
        """Serialize with rationals as strings and rows by name."""

        def row_json(row: Row) -> dict[str, t.Any]:
            return {
                "name": row.name,
                "coefficients": format_vector(row.coefficients),
                "rhs": format_rat(row.rhs),
            }

        return {
            "num_vars": self.num_vars,
            "variables": list(self.variables),
            "equalities": [row_json(row) for row in self.equalities],
            "inequalities": [row_json(row) for row in self.inequalities],
        }

    @classmethod
    def from_json(cls, data: Mapping[str, t.Any]) -> ConstraintSystem:
        """Inverse of ``to_json``.

        Examples
        --------
        >>> square = unit_box(2)
        >>> ConstraintSystem.from_json(square.to_json()) == square
        True
        """
        try:

            def row(item: Mapping[str, t.Any]) -> Row:
                return Row(
                    str(item["name"]),
                    tuple(parse_rat(c) for c in item["coefficients"]),
                    parse_rat(item["rhs"]),
                )

            return cls(
                int(data["num_vars"]),
                tuple(map(row, data.get("equalities", ()))),
                tuple(map(row, data.get("inequalities", ()))),
                tuple(data.get("variables", ())),
            )
        except (KeyError, TypeError) as e:
            msg = f"malformed constraint system ({e!r})"
            raise ParseError(msg, "constraint_system") from e


def contains(cs: ConstraintSystem, point: Sequence[Rat]) -> Membership:
    """Exact membership test, naming every violated row.

    Examples
    --------
    >>> from fractions import Fraction as F
    >>> contains(unit_box(2), (F(1, 2), F(1, 2)))
    Membership(satisfied=True, violated=())
    >>> contains(unit_box(2), (F(2), F(0)))
    Membership(satisfied=False, violated=('upper(x1)',))
    """
    if len(point) != cs.num_vars:
        msg = f"point has length {len(point)}, system has {cs.num_vars} variables"
        raise DimensionError(msg)

    violated = tuple(
        [row.name for row in cs.equalities if row.slack(point) != 0]
        + [row.name for row in cs.inequalities if row.slack(point) < 0]
    )

    return Membership(not violated, violated)


def tight_rows(cs: ConstraintSystem, point: Sequence[Rat]) -> tuple[str, ...]:
    """Names of rows holding with equality at ``point`` (equalities included)."""
    return tuple(row.name for row in cs.rows() if row.slack(point) == 0)


def unit_box(n: int) -> ConstraintSystem:
    """The cube ``[0, 1]^n`` as ``2n`` named bound rows."""
    rows = []

    for j in range(n):
        rows.append(Row.sparse(f"lower(x{j + 1})", n, {j: -1}, 0))
        rows.append(Row.sparse(f"upper(x{j + 1})", n, {j: 1}, 1))

    return ConstraintSystem(n, inequalities=tuple(rows))
