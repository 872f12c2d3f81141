"""Exact two-phase simplex with Bland's rule.

The solver works on a dense tableau of ``Fraction`` entries.  Columns are
the system's variables (split into positive and negative parts unless a
``-x_j <= 0`` row makes them nonnegative), one slack per remaining
inequality and, for phase one, one artificial per row.  Bland's rule picks
the lowest-index entering column and breaks ratio ties by lowest basic
index, so the solver terminates on degenerate systems and is deterministic
for a fixed row and column order.
"""

from __future__ import annotations

import logging
import typing as t
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from enum import StrEnum, auto

from matchfair.constraints import ConstraintSystem, Row, tight_rows
from matchfair.errors import DimensionError
from matchfair.exactmath import ONE, ZERO, Rat, Vector, dot

logger = logging.getLogger(__name__)


class Sense(StrEnum):
    MAX = auto()
    MIN = auto()


class LpStatus(StrEnum):
    OPTIMAL = auto()
    INFEASIBLE = auto()
    UNBOUNDED = auto()


@dataclass(frozen=True)
class LpOutcome:
    """Result of ``lp_optimize``.

    When optimal, ``point`` satisfies every row exactly, ``value`` is the
    objective at ``point`` and ``tight_rows`` names every row holding with
    equality.  When infeasible, ``infeasibility_witness`` maps row names to
    multipliers (nonnegative on inequality rows, any sign on equality rows)
    whose combination reads ``0 <= negative``.
    """

    status: LpStatus
    value: Rat | None = None
    point: Vector | None = None
    tight_rows: tuple[str, ...] = ()
    infeasibility_witness: tuple[tuple[str, Rat], ...] = ()
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


class _Column(t.NamedTuple):
    var: int | None
    sign: int
    """+1 or -1 for a variable part, 0 for a slack."""


@dataclass
class _Tableau:
    rows: list[list[Rat]]
    basis: list[int]
    objective: list[Rat]
    pivots: int = 0

    def pivot(self, p: int, q: int) -> None:
        lead = self.rows[p][q]
        prow = [v / lead for v in self.rows[p]]
        self.rows[p] = prow

        for i, row in enumerate(self.rows):
            if i != p and (f := row[q]):
                self.rows[i] = [a - f * b if b else a for a, b in zip(row, prow)]

        if f := self.objective[q]:
            self.objective = [a - f * b if b else a for a, b in zip(self.objective, prow)]

        self.basis[p] = q
        self.pivots += 1

    def iterate(self, allowed: range) -> LpStatus:
        """Minimize the current objective row with Bland's rule."""
        while True:
            q = next((j for j in allowed if self.objective[j] < 0), None)

            if q is None:
                return LpStatus.OPTIMAL

            best: tuple[tuple[Rat, int], int] | None = None

            for i, row in enumerate(self.rows):
                if row[q] > 0:
                    key = (row[-1] / row[q], self.basis[i])

                    if best is None or key < best[0]:
                        best = (key, i)

            if best is None:
                return LpStatus.UNBOUNDED

            self.pivot(best[1], q)

    def price(self, costs: Sequence[Rat]) -> None:
        """Install reduced costs for ``costs`` relative to the current basis."""
        objective = [*costs, ZERO]

        for i, row in enumerate(self.rows):
            if f := costs[self.basis[i]]:
                objective = [a - f * b if b else a for a, b in zip(objective, row)]

        self.objective = objective


def _sign_constrained(cs: ConstraintSystem) -> dict[int, int]:
    """Map variable index to the first ``-x_j <= 0`` row (index among inequalities)."""
    bounds: dict[int, int] = {}

    for r, row in enumerate(cs.inequalities):
        support = [j for j, c in enumerate(row.coefficients) if c]

        if row.rhs == 0 and len(support) == 1 and row.coefficients[support[0]] < 0:
            bounds.setdefault(support[0], r)

    return bounds


def lp_optimize(
    cs: ConstraintSystem,
    objective: Sequence[Rat],
    sense: Sense | str = Sense.MAX,
) -> LpOutcome:
    """Optimize a linear objective over ``cs`` exactly.

    Examples
    --------
    >>> from matchfair.constraints import unit_box
    >>> outcome = lp_optimize(unit_box(2), (ONE, ONE))
    >>> outcome.status, outcome.value, outcome.point
    (<LpStatus.OPTIMAL: 'optimal'>, Fraction(2, 1), (Fraction(1, 1), Fraction(1, 1)))

    ``x1 >= 1`` together with ``x1 <= 0`` is infeasible, and the witness
    adds the two rows to read ``0 <= -1``:

    >>> cs = ConstraintSystem(1, inequalities=(
    ...     Row.of("at_least_one", [-1], -1), Row.of("at_most_zero", [1], 0)))
    >>> outcome = lp_optimize(cs, (ONE,))
    >>> outcome.status, outcome.infeasibility_witness
    (<LpStatus.INFEASIBLE: 'infeasible'>, (('at_least_one', Fraction(1, 1)), ('at_most_zero', Fraction(1, 1))))
    >>> verify_infeasibility(cs, dict(outcome.infeasibility_witness))
    True
    """
    if len(objective) != cs.num_vars:
        msg = f"objective has length {len(objective)}, system has {cs.num_vars} variables"
        raise DimensionError(msg)

    sense = Sense(sense)
    bounds = _sign_constrained(cs)
    bound_rows = set(bounds.values())

    columns: list[_Column] = []
    var_columns: dict[int, tuple[int, int | None]] = {}

    for j in range(cs.num_vars):
        pos = len(columns)
        columns.append(_Column(j, 1))

        if j in bounds:
            var_columns[j] = (pos, None)
        else:
            columns.append(_Column(j, -1))
            var_columns[j] = (pos, pos + 1)

    constraint_rows: list[tuple[Row, bool]] = [(row, False) for row in cs.equalities]
    constraint_rows += [
        (row, True) for r, row in enumerate(cs.inequalities) if r not in bound_rows
    ]
    slack_of: dict[int, int] = {}

    for i, (_, has_slack) in enumerate(constraint_rows):
        if has_slack:
            slack_of[i] = len(columns)
            columns.append(_Column(None, 0))

    n_real = len(columns)
    m = len(constraint_rows)
    signs: list[int] = []
    rows: list[list[Rat]] = []

    for i, (row, _) in enumerate(constraint_rows):
        dense = [ZERO] * (n_real + m + 1)

        for j, c in enumerate(row.coefficients):
            if c:
                pos, neg = var_columns[j]
                dense[pos] = c

                if neg is not None:
                    dense[neg] = -c

        if i in slack_of:
            dense[slack_of[i]] = ONE

        dense[-1] = row.rhs
        sign = -1 if row.rhs < 0 else 1
        dense = [v * sign for v in dense] if sign < 0 else dense
        dense[n_real + i] = ONE
        signs.append(sign)
        rows.append(dense)

    tableau = _Tableau(rows, [n_real + i for i in range(m)], [])
    tableau.price([ZERO] * n_real + [ONE] * m)
    tableau.iterate(range(n_real + m))

    if (infeasibility := -tableau.objective[-1]) > 0:
        logger.debug("phase one ended with infeasibility %s", infeasibility)
        witness = _farkas_witness(cs, constraint_rows, signs, tableau, n_real, bounds)

        return LpOutcome(
            LpStatus.INFEASIBLE, infeasibility_witness=witness, pivots=tableau.pivots
        )

    _drive_out_artificials(tableau, n_real)

    direction = -1 if sense is Sense.MAX else 1
    costs = [
        direction * col.sign * objective[col.var] if col.var is not None else ZERO
        for col in columns
    ]
    tableau.price(costs + [ZERO] * m)

    if tableau.iterate(range(n_real)) is LpStatus.UNBOUNDED:
        return LpOutcome(LpStatus.UNBOUNDED, pivots=tableau.pivots)

    values = [ZERO] * (n_real + m)

    for i, col in enumerate(tableau.basis):
        values[col] = tableau.rows[i][-1]

    point = tuple(
        values[pos] - (values[neg] if neg is not None else ZERO)
        for pos, neg in (var_columns[j] for j in range(cs.num_vars))
    )
    logger.debug("lp optimal after %d pivots", tableau.pivots)

    return LpOutcome(
        LpStatus.OPTIMAL,
        value=dot(objective, point),
        point=point,
        tight_rows=tight_rows(cs, point),
        pivots=tableau.pivots,
    )


def _drive_out_artificials(tableau: _Tableau, n_real: int) -> None:
    """Pivot zero-level artificials out of the basis, dropping redundant rows."""
    i = 0

    while i < len(tableau.rows):
        if tableau.basis[i] >= n_real:
            row = tableau.rows[i]

            if (q := next((j for j in range(n_real) if row[j]), None)) is None:
                del tableau.rows[i]
                del tableau.basis[i]
                continue

            tableau.pivot(i, q)

        i += 1


def _farkas_witness(
    cs: ConstraintSystem,
    constraint_rows: Sequence[tuple[Row, bool]],
    signs: Sequence[int],
    tableau: _Tableau,
    n_real: int,
    bounds: Mapping[int, int],
) -> tuple[tuple[str, Rat], ...]:
    # Phase-one simplex multipliers are 1 - (reduced cost of each artificial).
    multipliers = {
        row.name: (tableau.objective[n_real + i] - ONE) * signs[i]
        for i, (row, _) in enumerate(constraint_rows)
    }

    for j, r in bounds.items():
        multipliers[cs.inequalities[r].name] = sum(
            (multipliers[row.name] * row.coefficients[j] for row, _ in constraint_rows),
            ZERO,
        )

    return tuple(
        (row.name, multipliers[row.name])
        for row in cs.rows()
        if multipliers.get(row.name)
    )


def verify_infeasibility(cs: ConstraintSystem, witness: Mapping[str, Rat]) -> bool:
    """Re-derive the contradiction ``0 <= negative`` from row multipliers.

    Multipliers on inequality rows must be nonnegative; rows missing from
    ``witness`` get multiplier zero.
    """
    known = {row.name for row in cs.rows()}

    if not set(witness) <= known:
        return False

    if any(witness.get(row.name, ZERO) < 0 for row in cs.inequalities):
        return False

    combined = [ZERO] * cs.num_vars
    rhs = ZERO

    for row in cs.rows():
        if f := witness.get(row.name, ZERO):
            combined = [a + f * c for a, c in zip(combined, row.coefficients)]
            rhs += f * row.rhs

    return not any(combined) and rhs < 0
