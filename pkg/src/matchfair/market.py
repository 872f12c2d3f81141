"""Market instances, allocations and the allocation polytope.

Entities are indexed from zero internally.  In two-sided markets agents are
``0..n-1`` and jobs ``n..2n-1``; externally (labels, serialized files,
variable names) they are ``1..n`` and ``n+1..2n``, matching the catalog
labels.  Non-bipartite vertices ``0..m-1`` are labeled ``1..m``.

An allocation assigns a share to every usable edge of its instance, in the
instance's variable order: row-major ``(agent, job)`` pairs for two-sided
markets and sorted edges for non-bipartite ones.
"""

from __future__ import annotations

import logging
import typing as t
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from enum import StrEnum, auto
from functools import cached_property, lru_cache
from itertools import combinations

import numpy as np

from matchfair.config import CACHE_SIZE, MAX_ODD_SET_VERTICES
from matchfair.constraints import ConstraintSystem, Row, contains
from matchfair.errors import (
    AllocationError,
    CapExceededError,
    DimensionError,
    InfeasibleError,
)
from matchfair.exactmath import ONE, ZERO, Rat, Vector, dot, format_rat, parse_rat

logger = logging.getLogger(__name__)

type Matrix = tuple[Vector, ...]
type Edge = tuple[int, int]
"""Pair of internal entity indices ``(a, b)`` with ``a < b``."""


class Mode(StrEnum):
    """Market models."""

    TWO_SIDED_ASYMMETRIC = auto()
    TWO_SIDED_SYMMETRIC = auto()
    NON_BIPARTITE = auto()

    @property
    def bipartite(self) -> bool:
        return self is not Mode.NON_BIPARTITE


def _matrix(rows: Sequence[Sequence[Rat | int]], n: int, name: str) -> Matrix:
    if len(rows) != n or any(len(row) != n for row in rows):
        msg = f"{name} must be a {n}x{n} table"
        raise DimensionError(msg)

    matrix = tuple(tuple(Rat(v) for v in row) for row in rows)

    for i, row in enumerate(matrix):
        for j, v in enumerate(row):
            if v < 0:
                msg = f"{name}[{i}][{j}] is negative ({v})"
                raise ValueError(msg)

    return matrix


@dataclass(frozen=True)
class MarketInstance:
    """Utilities of a two-sided or non-bipartite matching market.

    Use the ``asymmetric``, ``symmetric`` and ``non_bipartite`` constructors
    rather than building instances field by field.

    ``size`` is the side size ``n`` for two-sided markets and the vertex
    count ``m`` for non-bipartite ones.  Symmetric markets store a single
    weight table; non-bipartite markets store their edges (sorted) with
    weights, and an absent edge cannot be used.
    """

    mode: Mode
    size: int
    agent_utilities: Matrix = ()
    job_utilities: Matrix = ()
    weights: Matrix = ()
    graph: tuple[tuple[Edge, Rat], ...] = ()
    provenance: tuple[tuple[str, str], ...] = ()

    @classmethod
    def asymmetric(
        cls,
        agent_utilities: Sequence[Sequence[Rat | int]],
        job_utilities: Sequence[Sequence[Rat | int]],
        provenance: Iterable[tuple[str, str]] = (),
    ) -> t.Self:
        """Two-sided market with ``agent_utilities[i][j] = u_i(job j)`` and
        ``job_utilities[j][i] = u_j(agent i)``.

        Examples
        --------
        >>> inst = MarketInstance.asymmetric([[1, 0], [0, 1]], [[0, 0], [2, 0]])
        >>> inst.utility(0, 2), inst.utility(3, 0), inst.utility(0, 1)
        (Fraction(1, 1), Fraction(2, 1), Fraction(0, 1))
        >>> inst.variables
        ('x_1_3', 'x_1_4', 'x_2_3', 'x_2_4')
        """
        n = len(agent_utilities)

        return cls(
            Mode.TWO_SIDED_ASYMMETRIC,
            n,
            agent_utilities=_matrix(agent_utilities, n, "agent_utilities"),
            job_utilities=_matrix(job_utilities, n, "job_utilities"),
            provenance=tuple(provenance),
        )

    @classmethod
    def symmetric(
        cls,
        weights: Sequence[Sequence[Rat | int]],
        provenance: Iterable[tuple[str, str]] = (),
    ) -> t.Self:
        """Two-sided market where agent ``i`` and job ``j`` share ``weights[i][j]``."""
        n = len(weights)

        return cls(
            Mode.TWO_SIDED_SYMMETRIC,
            n,
            weights=_matrix(weights, n, "weights"),
            provenance=tuple(provenance),
        )

    @classmethod
    def non_bipartite(
        cls,
        m: int,
        edges: Mapping[Edge, Rat | int],
        provenance: Iterable[tuple[str, str]] = (),
    ) -> t.Self:
        """Market on ``m`` vertices; ``edges`` maps vertex pairs to weights.

        Examples
        --------
        >>> inst = MarketInstance.non_bipartite(4, {(1, 0): 1, (2, 3): 2})
        >>> inst.edges, inst.utility(0, 1), inst.utility(0, 2)
        (((0, 1), (2, 3)), Fraction(1, 1), Fraction(0, 1))
        >>> MarketInstance.non_bipartite(3, {(0, 1): 1})
        Traceback (most recent call last):
        ...
        ValueError: non-bipartite markets need an even number of vertices, got 3
        """
        if m < 2 or m % 2:
            msg = f"non-bipartite markets need an even number of vertices, got {m}"
            raise ValueError(msg)

        graph: dict[Edge, Rat] = {}

        for (a, b), w in edges.items():
            if a == b:
                msg = f"self-loop at vertex {a + 1}"
                raise ValueError(msg)

            if not (0 <= a < m and 0 <= b < m):
                msg = f"edge ({a + 1}, {b + 1}) has an endpoint outside 1..{m}"
                raise ValueError(msg)

            edge = (min(a, b), max(a, b))

            if edge in graph:
                msg = f"edge ({edge[0] + 1}, {edge[1] + 1}) appears more than once"
                raise ValueError(msg)

            if (weight := Rat(w)) < 0:
                msg = f"edge ({edge[0] + 1}, {edge[1] + 1}) has negative weight {weight}"
                raise ValueError(msg)

            graph[edge] = weight

        return cls(
            Mode.NON_BIPARTITE,
            m,
            graph=tuple(sorted(graph.items())),
            provenance=tuple(provenance),
        )

    @property
    def entity_count(self) -> int:
        return 2 * self.size if self.mode.bipartite else self.size

    @cached_property
    def edges(self) -> tuple[Edge, ...]:
        """Usable edges, in variable order."""
        if self.mode.bipartite:
            n = self.size
            return tuple((i, n + j) for i in range(n) for j in range(n))

        return tuple(edge for edge, _ in self.graph)

    @cached_property
    def variables(self) -> tuple[str, ...]:
        return tuple(f"x_{a + 1}_{b + 1}" for a, b in self.edges)

    @cached_property
    def _weight_of(self) -> dict[Edge, Rat]:
        return dict(self.graph)

    @cached_property
    def incident(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """For each entity, its ``(variable index, partner)`` pairs."""
        table: list[list[tuple[int, int]]] = [[] for _ in range(self.entity_count)]

        for v, (a, b) in enumerate(self.edges):
            table[a].append((v, b))
            table[b].append((v, a))

        return tuple(map(tuple, table))

    def utility(self, entity: int, partner: int) -> Rat:
        """Utility of ``entity`` for being matched with ``partner``.

        Same-side pairs (two-sided) and absent edges or the entity itself
        (non-bipartite) have utility zero.
        """
        if self.mode is Mode.NON_BIPARTITE:
            edge = (min(entity, partner), max(entity, partner))
            return self._weight_of.get(edge, ZERO)

        n = self.size

        if (entity < n) == (partner < n):
            return ZERO

        if self.mode is Mode.TWO_SIDED_SYMMETRIC:
            agent, job = (entity, partner - n) if entity < n else (partner, entity - n)
            return self.weights[agent][job]

        if entity < n:
            return self.agent_utilities[entity][partner - n]

        return self.job_utilities[entity - n][partner]

    def bundle_coefficients(self, observer: int, owner: int) -> Vector:
        """Coefficients of ``observer``'s value for ``owner``'s bundle.

        The bundle of ``owner`` is its share of every incident edge; the
        observer values the share of partner ``p`` at ``u_observer(p)``
        (zero when ``p`` is the observer itself).
        """
        coefficients = [ZERO] * len(self.edges)

        for v, partner in self.incident[owner]:
            coefficients[v] = self.utility(observer, partner)

        return tuple(coefficients)

    def utility_coefficients(self, entity: int) -> Vector:
        return self.bundle_coefficients(entity, entity)

    def peers(self, entity: int) -> range | list[int]:
        """Entities whose bundles ``entity`` compares its own against."""
        if self.mode is Mode.NON_BIPARTITE:
            return [k for k in range(self.size) if k != entity]

        n = self.size
        side = range(n) if entity < n else range(n, 2 * n)

        return [k for k in side if k != entity]

    def side(self, entity: int) -> str:
        if self.mode is Mode.NON_BIPARTITE:
            return "vertex"

        return "agent" if entity < self.size else "job"

    def label(self, entity: int) -> str:
        return str(entity + 1)

    def describe(self, entity: int) -> str:
        """Human-readable entity name, e.g. ``agent 1`` or ``job 4``."""
        return f"{self.side(entity)} {self.label(entity)}"

    def agent_matrix(self) -> Matrix:
        """``u_i(j)`` for agents i and jobs j (two-sided only)."""
        n = self.size
        return tuple(tuple(self.utility(i, n + j) for j in range(n)) for i in range(n))

    def job_matrix(self) -> Matrix:
        """``u_j(i)`` for jobs j and agents i (two-sided only)."""
        n = self.size
        return tuple(tuple(self.utility(n + j, i) for i in range(n)) for j in range(n))


@dataclass(frozen=True)
class Allocation:
    """A fractional perfect matching, one share per usable edge.

    Examples
    --------
    >>> x = Allocation.from_matrix([[1, 0], [0, 1]])
    >>> x.edges, x.values
    (((0, 2), (0, 3), (1, 2), (1, 3)), (Fraction(1, 1), Fraction(0, 1), Fraction(0, 1), Fraction(1, 1)))
    >>> x.matrix
    ((Fraction(1, 1), Fraction(0, 1)), (Fraction(0, 1), Fraction(1, 1)))
    """

    size: int
    edges: tuple[Edge, ...]
    values: Vector
    bipartite: bool = True

    def __post_init__(self) -> None:
        if len(self.edges) != len(self.values):
            msg = f"{len(self.values)} values for {len(self.edges)} edges"
            raise DimensionError(msg)

    @classmethod
    def from_matrix(cls, rows: Sequence[Sequence[Rat | int]]) -> t.Self:
        n = len(rows)

        if any(len(row) != n for row in rows):
            msg = "allocation matrix must be square"
            raise DimensionError(msg)

        return cls(
            n,
            tuple((i, n + j) for i in range(n) for j in range(n)),
            tuple(Rat(v) for row in rows for v in row),
        )

    @classmethod
    def for_instance(cls, inst: MarketInstance, values: Iterable[Rat | int]) -> t.Self:
        return cls(inst.size, inst.edges, tuple(Rat(v) for v in values), inst.mode.bipartite)

    @property
    def matrix(self) -> Matrix:
        if not self.bipartite:
            msg = "only bipartite allocations have a matrix form"
            raise ValueError(msg)

        n = self.size
        return tuple(self.values[i * n : (i + 1) * n] for i in range(n))

    def share(self, a: int, b: int) -> Rat:
        """Share of edge ``(a, b)`` (order-insensitive; zero if absent)."""
        edge = (min(a, b), max(a, b))
        return next((v for e, v in zip(self.edges, self.values) if e == edge), ZERO)

    def mix(self, weight: Rat, other: Allocation) -> Allocation:
        """Return ``weight * self + (1 - weight) * other``."""
        if self.edges != other.edges:
            msg = "cannot mix allocations over different edges"
            raise DimensionError(msg)

        values = tuple(weight * a + (ONE - weight) * b for a, b in zip(self.values, other.values))

        return Allocation(self.size, self.edges, values, self.bipartite)


@dataclass(frozen=True)
class UtilityProfile:
    """One utility per entity: agents then jobs, or vertices."""

    values: Vector

    def __getitem__(self, entity: int) -> Rat:
        return self.values[entity]

    def __len__(self) -> int:
        return len(self.values)


def _check_edges(inst: MarketInstance, x: Allocation) -> None:
    if x.edges != inst.edges or x.bipartite != inst.mode.bipartite:
        msg = f"allocation does not match the {inst.mode} instance's edges"
        raise DimensionError(msg)


def check_allocation(inst: MarketInstance, x: Allocation) -> None:
    """Raise ``AllocationError`` unless ``x`` is a valid allocation of ``inst``.

    Examples
    --------
    >>> from fractions import Fraction as F
    >>> inst = MarketInstance.asymmetric([[0, 0], [0, 0]], [[0, 0], [0, 0]])
    >>> check_allocation(inst, Allocation.from_matrix([[F(1, 3), F(1, 3)], [F(2, 3), F(2, 3)]]))
    Traceback (most recent call last):
    ...
    matchfair.errors.AllocationError: allocation violates row(1), row(2)
    """
    _check_edges(inst, x)

    if not (membership := contains(allocation_polytope(inst), x.values)).satisfied:
        msg = f"allocation violates {', '.join(membership.violated)}"
        raise AllocationError(msg)


def utility_profile(inst: MarketInstance, x: Allocation) -> UtilityProfile:
    """Utility of every entity under ``x``.

    Examples
    --------
    >>> inst = MarketInstance.symmetric([[1, 0], [0, 2]])
    >>> utility_profile(inst, Allocation.from_matrix([[1, 0], [0, 1]])).values
    (Fraction(1, 1), Fraction(2, 1), Fraction(1, 1), Fraction(2, 1))
    """
    check_allocation(inst, x)

    return UtilityProfile(
        tuple(dot(inst.utility_coefficients(e), x.values) for e in range(inst.entity_count))
    )


def uniform_allocation(inst: MarketInstance) -> Allocation:
    """Equal shares on every edge of a regular graph.

    Two-sided markets use the complete bipartite graph, so every share is
    ``1/n``.  Non-bipartite markets must be regular.
    """
    degrees = {len(edges) for edges in inst.incident}

    if len(degrees) != 1 or 0 in degrees:
        msg = "uniform allocation needs a regular graph with at least one edge per vertex"
        raise AllocationError(msg)

    share = Rat(1, degrees.pop())

    return Allocation.for_instance(inst, [share] * len(inst.edges))


def _odd_sets(m: int) -> Iterable[tuple[int, ...]]:
    for k in range(3, m, 2):
        yield from combinations(range(m), k)


@lru_cache(maxsize=CACHE_SIZE)
def allocation_polytope(inst: MarketInstance) -> ConstraintSystem:
    """Fractional perfect matchings of ``inst`` as a constraint system.

    Two-sided markets get one equality per agent (``row``) and job (``col``)
    plus nonnegativity.  Non-bipartite markets get one degree equality per
    vertex, nonnegativity and one odd-set row ``x(E(S)) <= (|S|-1)/2`` for
    every odd vertex set ``S`` with ``3 <= |S| <= m-1``.

    Examples
    --------
    >>> inst = MarketInstance.symmetric([[0] * 3] * 3)
    >>> cs = allocation_polytope(inst)
    >>> len(cs.equalities), len(cs.inequalities)
    (6, 9)
    >>> complete = MarketInstance.non_bipartite(6, {e: 1 for e in combinations(range(6), 2)})
    >>> cs = allocation_polytope(complete)
    >>> len(cs.equalities), len(cs.inequalities), sum(r.name.startswith("odd") for r in cs.inequalities)
    (6, 41, 26)
    """
    k = len(inst.edges)
    labels = [inst.label(e) for e in range(inst.entity_count)]

    def degree_row(name: str, entity: int) -> Row:
        return Row.sparse(name, k, {v: 1 for v, _ in inst.incident[entity]}, 1)

    if inst.mode.bipartite:
        n = inst.size
        equalities = [degree_row(f"row({labels[i]})", i) for i in range(n)]
        equalities += [degree_row(f"col({labels[j]})", j) for j in range(n, 2 * n)]
    else:
        equalities = [degree_row(f"degree({labels[v]})", v) for v in range(inst.size)]

    inequalities = [
        Row.sparse(f"nonneg({name})", k, {v: -1}, 0) for v, name in enumerate(inst.variables)
    ]

    if not inst.mode.bipartite:
        if inst.size > MAX_ODD_SET_VERTICES:
            msg = (
                f"odd-set enumeration is capped at {MAX_ODD_SET_VERTICES} vertices, "
                f"instance has {inst.size}"
            )
            raise CapExceededError(msg)

        for subset in _odd_sets(inst.size):
            members = set(subset)
            inside = {v: 1 for v, (a, b) in enumerate(inst.edges) if a in members and b in members}
            name = f"odd({','.join(labels[s] for s in subset)})"
            inequalities.append(Row.sparse(name, k, inside, Rat(len(subset) - 1, 2)))

    return ConstraintSystem(k, tuple(equalities), tuple(inequalities), inst.variables)


def complete_allocation(
    inst: MarketInstance,
    labeled: Mapping[Edge, Rat | int],
    *,
    strict: bool = False,
) -> Allocation:
    """Complete a partial labeling to an allocation by greedy filling.

    Unlabeled edges are visited in variable order (row-major for two-sided
    markets) and each receives as much as both endpoints' remaining
    capacity allows.  With ``strict``, only edges that are worth zero to
    both endpoints are filled, so the completion cannot change any utility.

    Examples
    --------
    >>> from fractions import Fraction as F
    >>> inst = MarketInstance.symmetric([[0] * 3] * 3)
    >>> labels = {(0, 3): F(2, 3), (1, 3): F(1, 3), (1, 4): F(1, 3), (1, 5): F(1, 3)}
    >>> [[str(v) for v in row] for row in complete_allocation(inst, labels).matrix]
    [['2/3', '1/3', '0'], ['1/3', '1/3', '1/3'], ['0', '1/3', '2/3']]
    >>> complete_allocation(inst, {(0, 3): F(2, 3), (1, 3): F(2, 3)})
    Traceback (most recent call last):
    ...
    matchfair.errors.InfeasibleError: labeled mass 4/3 at job 4 exceeds 1
    """
    index = {edge: v for v, edge in enumerate(inst.edges)}
    values = [ZERO] * len(inst.edges)
    labeled_vars = set()

    for (a, b), share in labeled.items():
        edge = (min(a, b), max(a, b))

        if edge not in index:
            msg = f"edge ({a + 1}, {b + 1}) is not usable in this instance"
            raise InfeasibleError(msg)

        if (share := Rat(share)) < 0:
            msg = f"edge ({a + 1}, {b + 1}) has negative share {share}"
            raise InfeasibleError(msg)

        values[index[edge]] = share
        labeled_vars.add(index[edge])

    remaining = [ONE - dot([ONE] * len(inc), [values[v] for v, _ in inc]) for inc in inst.incident]

    for e, rest in enumerate(remaining):
        if rest < 0:
            msg = f"labeled mass {ONE - rest} at {inst.describe(e)} exceeds 1"
            raise InfeasibleError(msg)

    for v, (a, b) in enumerate(inst.edges):
        if v in labeled_vars:
            continue

        if strict and (inst.utility(a, b) or inst.utility(b, a)):
            continue

        if (fill := min(remaining[a], remaining[b])) > 0:
            values[v] = fill
            remaining[a] -= fill
            remaining[b] -= fill

    if unfilled := [inst.describe(e) for e, rest in enumerate(remaining) if rest]:
        msg = f"greedy fill cannot complete the allocation (capacity left at {', '.join(unfilled)})"
        raise InfeasibleError(msg)

    x = Allocation.for_instance(inst, values)

    try:
        check_allocation(inst, x)
    except AllocationError as e:
        raise InfeasibleError(str(e)) from e

    logger.debug("completed %d labeled edges to a full allocation", len(labeled_vars))

    return x


class BirkhoffTerm(t.NamedTuple):
    coefficient: Rat
    permutation: tuple[int, ...]
    """``permutation[i]`` is the job (0-based, within the job side) of agent ``i``."""


def _smallest_matching(support: Sequence[Sequence[bool]]) -> tuple[int, ...] | None:
    n = len(support)

    def extend(i: int, used: frozenset[int], partial: tuple[int, ...]) -> tuple[int, ...] | None:
        if i == n:
            return partial

        for j in range(n):
            if support[i][j] and j not in used:
                if (found := extend(i + 1, used | {j}, (*partial, j))) is not None:
                    return found

        return None

    return extend(0, frozenset(), ())


def birkhoff_decompose(x: Allocation) -> list[BirkhoffTerm]:
    """Write a doubly stochastic allocation as a lottery over perfect matchings.

    Repeatedly takes the lexicographically smallest perfect matching in the
    support of the remainder and subtracts its minimum entry.

    Examples
    --------
    >>> from fractions import Fraction as F
    >>> third = F(1, 3)
    >>> for term in birkhoff_decompose(Allocation.from_matrix([[third] * 3] * 3)):
    ...     print(term.coefficient, term.permutation)
    1/3 (0, 1, 2)
    1/3 (1, 2, 0)
    1/3 (2, 0, 1)
    """
    if not x.bipartite:
        msg = "Birkhoff decomposition needs a bipartite allocation"
        raise AllocationError(msg)

    n = x.size
    remainder = [list(row) for row in x.matrix]

    for i in range(n):
        row_sum = sum(remainder[i], ZERO)
        col_sum = sum((remainder[k][i] for k in range(n)), ZERO)

        if row_sum != 1 or col_sum != 1 or any(v < 0 for v in remainder[i]):
            msg = f"allocation is not doubly stochastic at row/column {i + 1}"
            raise AllocationError(msg)

    terms: list[BirkhoffTerm] = []

    while any(any(row) for row in remainder):
        support = [[v > 0 for v in row] for row in remainder]

        if (perm := _smallest_matching(support)) is None:
            msg = "remainder has no perfect matching in its support"
            raise AllocationError(msg)

        coefficient = min(remainder[i][perm[i]] for i in range(n))

        for i in range(n):
            remainder[i][perm[i]] -= coefficient

        terms.append(BirkhoffTerm(coefficient, perm))

    return terms


def compose_birkhoff(n: int, terms: Iterable[BirkhoffTerm]) -> Allocation:
    """Rebuild the allocation ``sum(coefficient * permutation matrix)``."""
    rows = [[ZERO] * n for _ in range(n)]

    for coefficient, perm in terms:
        for i, j in enumerate(perm):
            rows[i][j] += coefficient

    return Allocation.from_matrix(rows)


PRNG_ALGORITHM: t.Final = "numpy.random.PCG64"


def gen_random(
    mode: Mode | str,
    n: int,
    value_set: Sequence[Rat | int | str],
    seed: int,
) -> MarketInstance:
    """Draw a random instance with utilities uniform over ``value_set``.

    Draws come from numpy's PCG64 generator seeded with ``seed``, so the
    same arguments always give the same instance.  For non-bipartite mode
    ``n`` is the vertex count and every pair of vertices gets an edge.

    Examples
    --------
    >>> inst = gen_random("two_sided_asymmetric", 3, [0, 1], seed=7)
    >>> {v for row in inst.agent_utilities + inst.job_utilities for v in row} <= {0, 1}
    True
    >>> inst == gen_random("two_sided_asymmetric", 3, [0, 1], seed=7)
    True
    >>> dict(inst.provenance)["generator"]
    'numpy.random.PCG64'
    """
    mode = Mode(mode)
    values = [v if isinstance(v, Rat) else parse_rat(v) for v in value_set]

    if not values or any(v < 0 for v in values):
        msg = "value set must be nonempty and nonnegative"
        raise ValueError(msg)

    if n < 1 or seed < 0:
        msg = f"invalid generator parameters n={n}, seed={seed}"
        raise ValueError(msg)

    rng = np.random.default_rng(seed)
    provenance = (
        ("generator", PRNG_ALGORITHM),
        ("seed", str(seed)),
        ("values", " ".join(format_rat(v) for v in values)),
    )

    def draw(count: int) -> list[Rat]:
        return [values[k] for k in rng.integers(len(values), size=count).tolist()]

    def table() -> list[list[Rat]]:
        flat = draw(n * n)
        return [flat[i * n : (i + 1) * n] for i in range(n)]

    match mode:
        case Mode.TWO_SIDED_ASYMMETRIC:
            return MarketInstance.asymmetric(table(), table(), provenance)
        case Mode.TWO_SIDED_SYMMETRIC:
            return MarketInstance.symmetric(table(), provenance)
        case Mode.NON_BIPARTITE:
            pairs = list(combinations(range(n), 2))
            return MarketInstance.non_bipartite(n, dict(zip(pairs, draw(len(pairs)))), provenance)


def permute(
    inst: MarketInstance,
    perm: Sequence[int],
    job_perm: Sequence[int] | None = None,
) -> MarketInstance:
    """Rename entities: agent ``i`` becomes ``perm[i]`` and job ``j`` becomes
    ``job_perm[j]`` (two-sided), or vertex ``v`` becomes ``perm[v]``.

    Examples
    --------
    >>> inst = MarketInstance.asymmetric([[1, 0], [0, 0]], [[0, 0], [0, 0]])
    >>> permute(inst, [1, 0], [0, 1]).agent_utilities
    ((Fraction(0, 1), Fraction(0, 1)), (Fraction(1, 1), Fraction(0, 1)))
    """
    if inst.mode is Mode.NON_BIPARTITE:
        return MarketInstance.non_bipartite(
            inst.size,
            {(perm[a], perm[b]): w for (a, b), w in inst.graph},
            inst.provenance,
        )

    n = inst.size
    jobs = list(range(n)) if job_perm is None else list(job_perm)
    agents_inv = {p: i for i, p in enumerate(perm)}
    jobs_inv = {p: j for j, p in enumerate(jobs)}

    def permuted(matrix: Matrix, rows_inv: Mapping[int, int], cols_inv: Mapping[int, int]) -> Matrix:
        return tuple(
            tuple(matrix[rows_inv[r]][cols_inv[c]] for c in range(n)) for r in range(n)
        )

    if inst.mode is Mode.TWO_SIDED_SYMMETRIC:
        return MarketInstance.symmetric(permuted(inst.weights, agents_inv, jobs_inv), inst.provenance)

    return MarketInstance.asymmetric(
        permuted(inst.agent_utilities, agents_inv, jobs_inv),
        permuted(inst.job_utilities, jobs_inv, agents_inv),
        inst.provenance,
    )
