"""Envy-freeness, Pareto dominance and the improvement LP.

An entity's bundle is its share of every incident edge.  Entity ``i`` envies
``k`` when ``u_i(bundle of k) > u_i(bundle of i)``; in two-sided markets only
same-side pairs are compared.  Envy is strict, so ties are not envy.

The improvement LP for an allocation ``x`` is::

    max  sum_i t_i
    s.t. y in the allocation polytope
         u_i(y) - t_i >= u_i(x),  t_i >= 0   for every entity i

Its value is zero exactly when ``x`` is Pareto optimal; otherwise the
optimal ``y`` weakly dominates ``x`` with at least one strict gain.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from enum import StrEnum, auto
from functools import lru_cache

from matchfair.config import CACHE_SIZE, parallel_map
from matchfair.constraints import ConstraintSystem, Row
from matchfair.errors import LpFailure, ParseError
from matchfair.exactmath import ONE, ZERO, Rat, Vector, dot
from matchfair.market import (
    Allocation,
    MarketInstance,
    allocation_polytope,
    check_allocation,
    utility_profile,
)
from matchfair.simplex import LpOutcome, Sense, lp_optimize

logger = logging.getLogger(__name__)


class Sides(StrEnum):
    """Which sides of a two-sided market must be envy-free."""

    BOTH = auto()
    AGENTS = auto()
    JOBS = auto()


def _observers(inst: MarketInstance, sides: Sides) -> range:
    if not inst.mode.bipartite or sides is Sides.BOTH:
        return range(inst.entity_count)

    n = inst.size

    return range(n) if sides is Sides.AGENTS else range(n, 2 * n)


@dataclass(frozen=True)
class EnvyWitness:
    observer: int
    envied: int
    own_value: Rat
    envied_value: Rat


def envy_pairs(
    inst: MarketInstance,
    x: Allocation,
    sides: Sides | str = Sides.BOTH,
) -> list[EnvyWitness]:
    """Every ordered pair ``(i, k)`` where ``i`` envies ``k`` under ``x``.

    Examples
    --------
    >>> from matchfair.catalog import catalog
    >>> inst, y = catalog("thm1")
    >>> [(w.observer, w.envied, str(w.own_value), str(w.envied_value)) for w in envy_pairs(inst, y)]
    [(1, 2, '2/3', '1')]
    """
    check_allocation(inst, x)
    witnesses = []

    for i in _observers(inst, Sides(sides)):
        own = dot(inst.utility_coefficients(i), x.values)

        for k in inst.peers(i):
            if (envied := dot(inst.bundle_coefficients(i, k), x.values)) > own:
                witnesses.append(EnvyWitness(i, k, own, envied))

    return witnesses


def is_envy_free(inst: MarketInstance, x: Allocation, sides: Sides | str = Sides.BOTH) -> bool:
    return not envy_pairs(inst, x, sides)


@lru_cache(maxsize=CACHE_SIZE)
def ef_constraints(inst: MarketInstance, sides: Sides | str = Sides.BOTH) -> ConstraintSystem:
    """The allocation polytope with one ``EF(i,k)`` row per ordered envy pair.

    Row ``EF(i,k)`` reads ``u_i(bundle of k) - u_i(bundle of i) <= 0``.
    Rows of entities with all-zero utilities are kept even though they are
    vacuous, so the row set depends only on the market's shape.

    Examples
    --------
    >>> from matchfair.catalog import catalog
    >>> inst, _ = catalog("thm1")
    >>> ef = [row for row in ef_constraints(inst).inequalities if row.name.startswith("EF")]
    >>> len(ef), sum(not row.is_vacuous() for row in ef)
    (12, 6)
    >>> len([row for row in ef_constraints(inst, "agents").inequalities if row.name.startswith("EF")])
    6
    """
    rows = []

    for i in _observers(inst, Sides(sides)):
        own = inst.utility_coefficients(i)

        for k in inst.peers(i):
            coefficients = [a - b for a, b in zip(inst.bundle_coefficients(i, k), own)]
            rows.append(Row(f"EF({inst.label(i)},{inst.label(k)})", tuple(coefficients), ZERO))

    return allocation_polytope(inst).extend(inequalities=rows)


@dataclass(frozen=True)
class WeakDominance:
    """``y`` is at least as good as ``x`` for everyone and better for ``strict``."""

    strict: tuple[int, ...]


def pareto_dominates(inst: MarketInstance, y: Allocation, x: Allocation) -> WeakDominance | None:
    """Return the strict entities if ``y`` weakly Pareto-dominates ``x``.

    Examples
    --------
    >>> from matchfair.catalog import catalog
    >>> from matchfair.market import uniform_allocation
    >>> inst, y = catalog("thm1")
    >>> x = uniform_allocation(inst)
    >>> pareto_dominates(inst, y, x)
    WeakDominance(strict=(0,))
    >>> pareto_dominates(inst, x, x) is None
    True
    """
    ours = utility_profile(inst, y)
    theirs = utility_profile(inst, x)

    if any(a < b for a, b in zip(ours.values, theirs.values)):
        return None

    if not (strict := tuple(e for e, (a, b) in enumerate(zip(ours.values, theirs.values)) if a > b)):
        return None

    return WeakDominance(strict)


@dataclass(frozen=True)
class ImprovementResult:
    """Optimum of the improvement LP.

    ``value`` is the total gain, ``witness`` the improving allocation and
    ``gains`` the per-entity gains, which sum to ``value``.
    """

    value: Rat
    witness: Allocation
    gains: Vector

    @property
    def pareto_optimal(self) -> bool:
        return self.value == 0


@lru_cache(maxsize=CACHE_SIZE)
def _improvement_system(inst: MarketInstance) -> tuple[ConstraintSystem, tuple[Row, ...]]:
    """Allocation rows over ``y`` and ``t`` plus the per-entity rows without rhs."""
    k = len(inst.edges)
    count = inst.entity_count
    width = k + count
    base = allocation_polytope(inst).widen([f"t_{inst.label(e)}" for e in range(count)])
    rows = []

    for e in range(count):
        rows.append(Row.sparse(f"gain_nonneg({inst.label(e)})", width, {k + e: -1}, 0))

    for e in range(count):
        coefficients = [-c for c in inst.utility_coefficients(e)] + [ZERO] * count
        coefficients[k + e] = ONE
        rows.append(Row(f"improve({inst.label(e)})", tuple(coefficients), ZERO))

    return base, tuple(rows)


def improvement_value(inst: MarketInstance, x: Allocation) -> ImprovementResult:
    """Solve the improvement LP at ``x`` exactly.

    Examples
    --------
    >>> from matchfair.catalog import catalog
    >>> from matchfair.market import uniform_allocation
    >>> inst, y = catalog("thm1")
    >>> improvement_value(inst, y).value
    Fraction(0, 1)
    >>> improvement_value(inst, uniform_allocation(inst)).value > 0
    True
    """
    profile = utility_profile(inst, x)
    base, rows = _improvement_system(inst)
    count = inst.entity_count

    improve = [
        Row(row.name, row.coefficients, -profile[e]) for e, row in enumerate(rows[count:])
    ]
    cs = base.extend(inequalities=[*rows[:count], *improve])
    k = len(inst.edges)
    outcome = lp_optimize(cs, (ZERO,) * k + (ONE,) * count)

    if not outcome.optimal or outcome.point is None or outcome.value is None:
        msg = f"improvement LP ended {outcome.status}"
        raise LpFailure(msg)

    witness = Allocation.for_instance(inst, outcome.point[:k])
    logger.debug("improvement value %s after %d pivots", outcome.value, outcome.pivots)

    return ImprovementResult(outcome.value, witness, outcome.point[k:])


def is_pareto_optimal(inst: MarketInstance, x: Allocation) -> tuple[bool, ImprovementResult]:
    """Pareto optimality of ``x`` together with the improvement LP certificate."""
    result = improvement_value(inst, x)

    return result.pareto_optimal, result


@dataclass(frozen=True)
class Functional:
    """A linear functional over allocation variables, named for reports."""

    name: str
    coefficients: Vector


_COORDINATE = re.compile(r"^x_(?P<a>\d+)_(?P<b>\d+)$")
_UTILITY = re.compile(r"^u_(?P<e>\d+)$")


def parse_functional(inst: MarketInstance, text: str) -> Functional:
    """Parse ``x_i_j`` (a coordinate) or ``u_i`` (a utility), external labels.

    Examples
    --------
    >>> from matchfair.catalog import catalog
    >>> inst, _ = catalog("thm1")
    >>> parse_functional(inst, "x_2_4").coefficients.index(1)
    3
    >>> parse_functional(inst, "u_1").coefficients[:3]
    (Fraction(1, 1), Fraction(0, 1), Fraction(0, 1))
    >>> parse_functional(inst, "x_1_2")
    Traceback (most recent call last):
    ...
    matchfair.errors.ParseError: functional: 'x_1_2' is not an allocation variable of this instance
    """
    k = len(inst.edges)

    if match := _COORDINATE.match(text):
        a, b = int(match["a"]) - 1, int(match["b"]) - 1
        edge = (min(a, b), max(a, b))

        if edge in inst.edges:
            v = inst.edges.index(edge)
            return Functional(inst.variables[v], tuple(ONE if j == v else ZERO for j in range(k)))

        msg = f"{text!r} is not an allocation variable of this instance"
        raise ParseError(msg, "functional")

    if match := _UTILITY.match(text):
        if 1 <= (e := int(match["e"])) <= inst.entity_count:
            return Functional(text, inst.utility_coefficients(e - 1))

        msg = f"{text!r} names no entity (labels run 1..{inst.entity_count})"
        raise ParseError(msg, "functional")

    msg = f"expected 'x_i_j' or 'u_i', got {text!r}"
    raise ParseError(msg, "functional")


def coordinate_functionals(inst: MarketInstance) -> list[Functional]:
    """One functional per allocation variable."""
    k = len(inst.edges)

    return [
        Functional(name, tuple(ONE if j == v else ZERO for j in range(k)))
        for v, name in enumerate(inst.variables)
    ]


@dataclass(frozen=True)
class ForcedValue:
    name: str
    min: Rat
    max: Rat

    @property
    def forced(self) -> bool:
        return self.min == self.max


def _optimum(cs: ConstraintSystem, f: Functional, sense: Sense) -> Rat:
    outcome: LpOutcome = lp_optimize(cs, f.coefficients, sense)

    if not outcome.optimal or outcome.value is None:
        msg = f"{sense} of {f.name} over the envy-free system ended {outcome.status}"
        raise LpFailure(msg)

    return outcome.value


def forced_value(
    inst: MarketInstance,
    f: Functional | str,
    sides: Sides | str = Sides.BOTH,
    workers: int | None = None,
) -> ForcedValue:
    """Range of ``f`` over the envy-free polytope.

    Examples
    --------
    >>> from matchfair.catalog import catalog
    >>> inst, _ = catalog("thm1")
    >>> r = forced_value(inst, "x_2_4")
    >>> str(r.min), str(r.max), r.forced
    ('1/3', '1/3', True)
    """
    if isinstance(f, str):
        f = parse_functional(inst, f)

    cs = ef_constraints(inst, Sides(sides))
    functional = f
    low, high = parallel_map(
        lambda sense: _optimum(cs, functional, sense), [Sense.MIN, Sense.MAX], workers
    )

    return ForcedValue(f.name, low, high)
