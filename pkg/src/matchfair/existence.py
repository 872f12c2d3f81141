"""Deciding whether a Pareto-optimal envy-free allocation exists.

The improvement value ``v(x)`` is the optimum of an LP whose right-hand side
depends linearly on ``x``, so ``v`` is concave over the envy-free polytope
and attains its minimum at a vertex.  Scanning every vertex therefore
decides existence: a vertex with ``v = 0`` is a Pareto-optimal envy-free
allocation, and if every vertex has ``v > 0`` no envy-free allocation is
Pareto optimal.

Domination certificates are the short form of a negative answer: one
allocation ``y`` that weakly dominates every envy-free allocation, with a
strict gain for some entity that no envy-free allocation can close.  They do
not always exist, so the vertex scan stays the deciding method.
"""

from __future__ import annotations

import logging
import typing as t
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np
import polars as pl

import matchfair.polars as pl_
from matchfair.config import (
    MAX_EXISTENCE_SIDE,
    MAX_EXISTENCE_VERTICES,
    MAX_GRID_DENOMINATOR,
    MAX_GRID_SIDE,
    Settings,
    parallel_map,
)
from matchfair.constraints import ConstraintSystem
from matchfair.errors import (
    CapExceededError,
    InfeasibleError,
    LpFailure,
    MatchfairError,
    ParseError,
)
from matchfair.exactmath import ZERO, Rat, Vector, format_rat, format_vector, parse_rat
from matchfair.fairness import (
    EnvyWitness,
    Functional,
    ImprovementResult,
    Sides,
    ef_constraints,
    envy_pairs,
    improvement_value,
)
from matchfair.io import allocation_from_json, allocation_to_json, instance_hash
from matchfair.market import Allocation, MarketInstance, check_allocation, utility_profile
from matchfair.polytope import vertex_enumerate
from matchfair.simplex import Sense, lp_optimize

logger = logging.getLogger(__name__)


class VerdictKind(StrEnum):
    EXISTS = "exists"
    NOT_EXISTS = "not_exists"
    NOT_EXISTS_DOMINATED = "not_exists_dominated"


VERTEX_SCAN: t.Final = "vertex-scan"
UNIFORM_DOMINATION: t.Final = "uniform-domination"


@dataclass(frozen=True)
class Exists:
    """An envy-free allocation with improvement value zero."""

    allocation: Allocation
    improvement: ImprovementResult
    envy: tuple[EnvyWitness, ...] = ()
    sides: Sides = Sides.BOTH
    method: str = VERTEX_SCAN
    kind: t.ClassVar = VerdictKind.EXISTS


@dataclass(frozen=True)
class ScannedVertex:
    point: Allocation
    improvement: ImprovementResult


@dataclass(frozen=True)
class NotExists:
    """Every vertex of the envy-free polytope, each with ``v > 0``."""

    vertices: tuple[ScannedVertex, ...]
    sides: Sides = Sides.BOTH
    method: str = VERTEX_SCAN
    kind: t.ClassVar = VerdictKind.NOT_EXISTS


@dataclass(frozen=True)
class NotExistsDominated:
    """``y`` beats every envy-free allocation by at least ``minima[i]`` for each ``i``."""

    y: Allocation
    minima: Vector
    strict_entity: int
    sides: Sides = Sides.BOTH
    method: str = UNIFORM_DOMINATION
    kind: t.ClassVar = VerdictKind.NOT_EXISTS_DOMINATED

    @property
    def gap(self) -> Rat:
        return self.minima[self.strict_entity]


type Verdict = Exists | NotExists | NotExistsDominated


def check_existence_caps(inst: MarketInstance) -> None:
    if inst.mode.bipartite and inst.size > MAX_EXISTENCE_SIDE:
        msg = f"existence decisions are capped at n = {MAX_EXISTENCE_SIDE}, instance has n = {inst.size}"
        raise CapExceededError(msg)

    if not inst.mode.bipartite and inst.size > MAX_EXISTENCE_VERTICES:
        msg = (
            f"existence decisions are capped at m = {MAX_EXISTENCE_VERTICES}, "
            f"instance has m = {inst.size}"
        )
        raise CapExceededError(msg)


def ef_vertices(
    inst: MarketInstance,
    sides: Sides | str = Sides.BOTH,
    workers: int | None = None,
) -> list[Allocation]:
    """Vertices of the envy-free polytope, in lexicographic order."""
    # Row counts exceed the generic enumeration cap for non-bipartite
    # instances; the existence caps bound the work instead.
    points = vertex_enumerate(ef_constraints(inst, Sides(sides)), override=True, workers=workers)

    return [Allocation.for_instance(inst, point) for point in points]


def _scan(
    inst: MarketInstance,
    vertices: Sequence[Allocation],
    workers: int,
) -> Iterator[ScannedVertex]:
    if workers <= 1:
        for x in vertices:
            yield ScannedVertex(x, improvement_value(inst, x))
        return

    values = parallel_map(lambda x: improvement_value(inst, x), vertices, workers)
    yield from (ScannedVertex(x, v) for x, v in zip(vertices, values))


def decide_poef(
    inst: MarketInstance,
    *,
    sides: Sides | str = Sides.BOTH,
    workers: int | None = None,
) -> Exists | NotExists:
    """Decide whether ``inst`` has a Pareto-optimal envy-free allocation.

    Examples
    --------
    >>> from matchfair.catalog import catalog
    >>> verdict = decide_poef(catalog("thm1")[0])
    >>> verdict.kind, len(verdict.vertices) > 0
    (<VerdictKind.NOT_EXISTS: 'not_exists'>, True)
    >>> decide_poef(catalog("one_sided")[0]).kind
    <VerdictKind.EXISTS: 'exists'>
    """
    check_existence_caps(inst)
    sides = Sides(sides)
    workers = Settings.from_env().workers if workers is None else workers

    if not (vertices := ef_vertices(inst, sides, workers)):
        msg = "instance admits no envy-free allocation"
        raise InfeasibleError(msg)

    logger.debug("scanning %d envy-free vertices", len(vertices))
    scanned = []

    for vertex in _scan(inst, vertices, workers):
        if vertex.improvement.pareto_optimal:
            logger.info("Pareto-optimal envy-free vertex found")
            return Exists(vertex.point, vertex.improvement, sides=sides)

        scanned.append(vertex)

    logger.info("no Pareto-optimal envy-free allocation (%d vertices)", len(scanned))

    return NotExists(tuple(scanned), sides=sides)


def _extreme(cs: ConstraintSystem, coefficients: Vector, sense: Sense) -> Rat:
    outcome = lp_optimize(cs, coefficients, sense)

    if not outcome.optimal or outcome.value is None:
        msg = f"{sense} over the envy-free system ended {outcome.status}"
        raise LpFailure(msg)

    return outcome.value


def domination_minima(
    inst: MarketInstance,
    y: Allocation,
    sides: Sides | str = Sides.BOTH,
    workers: int | None = None,
) -> Vector:
    """``min over envy-free x of u_i(y) - u_i(x)`` for every entity ``i``."""
    cs = ef_constraints(inst, Sides(sides))
    profile = utility_profile(inst, y)
    maxima = parallel_map(
        lambda e: _extreme(cs, inst.utility_coefficients(e), Sense.MAX),
        range(inst.entity_count),
        workers,
    )

    return tuple(profile[e] - best for e, best in enumerate(maxima))


def find_domination_certificate(
    inst: MarketInstance,
    y: Allocation,
    *,
    sides: Sides | str = Sides.BOTH,
    workers: int | None = None,
) -> NotExistsDominated | None:
    """Check whether ``y`` dominates every envy-free allocation.

    Examples
    --------
    >>> from matchfair.catalog import catalog
    >>> from matchfair.market import uniform_allocation
    >>> inst, y = catalog("thm1")
    >>> certificate = find_domination_certificate(inst, y)
    >>> certificate.strict_entity, str(certificate.gap)
    (0, '1/3')
    >>> find_domination_certificate(inst, uniform_allocation(inst)) is None
    True
    """
    check_allocation(inst, y)
    minima = domination_minima(inst, y, sides, workers)

    if any(m < 0 for m in minima):
        return None

    if (strict := next((e for e, m in enumerate(minima) if m > 0), None)) is None:
        return None

    return NotExistsDominated(y, minima, strict, sides=Sides(sides))


@dataclass(frozen=True)
class GridPoint:
    allocation: Allocation
    envy_free: bool
    improvement: Rat

    @property
    def pareto_optimal(self) -> bool:
        return self.improvement == 0


@dataclass(frozen=True)
class GridReport:
    """Classification of every allocation with entries in ``{0, 1/D, ..., 1}``."""

    denominator: int
    variables: tuple[str, ...]
    points: tuple[GridPoint, ...] = field(repr=False)

    @property
    def total(self) -> int:
        return len(self.points)

    @property
    def ef_count(self) -> int:
        return sum(p.envy_free for p in self.points)

    @property
    def po_count(self) -> int:
        return sum(p.pareto_optimal for p in self.points)

    @property
    def poef_points(self) -> tuple[GridPoint, ...]:
        return tuple(p for p in self.points if p.envy_free and p.pareto_optimal)

    @property
    def poef_count(self) -> int:
        return len(self.poef_points)

    def to_frame(self) -> pl.DataFrame:
        """One row per grid allocation: its entries, EF and PO flags and ``v``."""
        return pl_.allocation_frame(
            self.variables,
            [p.allocation for p in self.points],
            envy_free=[p.envy_free for p in self.points],
            pareto_optimal=[p.pareto_optimal for p in self.points],
            improvement=[format_rat(p.improvement) for p in self.points],
        )


def _compositions(total: int, caps: Sequence[int]) -> Iterator[tuple[int, ...]]:
    if len(caps) == 1:
        if total <= caps[0]:
            yield (total,)
        return

    for first in range(min(total, caps[0]) + 1):
        for rest in _compositions(total - first, caps[1:]):
            yield (first, *rest)


def _margin_matrices(
    n: int, total: int, rows: tuple[tuple[int, ...], ...], caps: tuple[int, ...]
) -> Iterator[tuple[tuple[int, ...], ...]]:
    if len(rows) == n - 1:
        yield (*rows, caps)
        return

    for row in _compositions(total, caps):
        yield from _margin_matrices(
            n, total, (*rows, row), tuple(c - v for c, v in zip(caps, row))
        )


def grid_oracle(
    inst: MarketInstance,
    denominator: int,
    *,
    sides: Sides | str = Sides.BOTH,
    workers: int | None = None,
) -> GridReport:
    """Classify every grid allocation by brute force.

    Examples
    --------
    >>> from matchfair.market import MarketInstance
    >>> zero = MarketInstance.asymmetric([[0] * 3] * 3, [[0] * 3] * 3)
    >>> report = grid_oracle(zero, 1)
    >>> report.total, report.ef_count, report.po_count, report.poef_count
    (6, 6, 6, 6)
    """
    if not inst.mode.bipartite or inst.size > MAX_GRID_SIDE:
        msg = f"the grid oracle handles two-sided markets with n <= {MAX_GRID_SIDE}"
        raise CapExceededError(msg)

    if not 1 <= denominator <= MAX_GRID_DENOMINATOR:
        msg = f"grid denominator must be in 1..{MAX_GRID_DENOMINATOR}, got {denominator}"
        raise CapExceededError(msg)

    n, d = inst.size, denominator

    def classify(first_row: tuple[int, ...]) -> list[GridPoint]:
        caps = tuple(d - v for v in first_row)
        points = []

        for matrix in _margin_matrices(n, d, (first_row,), caps) if n > 1 else [(first_row,)]:
            x = Allocation.from_matrix([[Rat(v, d) for v in row] for row in matrix])
            envy_free = not envy_pairs(inst, x, sides)
            points.append(GridPoint(x, envy_free, improvement_value(inst, x).value))

        return points

    batches = parallel_map(classify, list(_compositions(d, (d,) * n)), workers)
    report = GridReport(d, inst.variables, tuple(p for batch in batches for p in batch))
    logger.info(
        "grid D=%d: %d allocations, %d EF, %d PO, %d PO and EF",
        d,
        report.total,
        report.ef_count,
        report.po_count,
        report.poef_count,
    )

    return report


@dataclass(frozen=True)
class Verification:
    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _verify(inst: MarketInstance, verdict: Verdict) -> Verification:
    match verdict:
        case Exists(allocation=x, improvement=improvement, sides=sides):
            check_allocation(inst, x)

            if envy := envy_pairs(inst, x, sides):
                w = envy[0]
                return Verification(
                    False,
                    f"allocation has envy ({inst.describe(w.observer)} envies {inst.describe(w.envied)})",
                )

            if (fresh := improvement_value(inst, x).value) != improvement.value or fresh != 0:
                return Verification(False, "improvement value mismatch")

        case NotExists(vertices=vertices, sides=sides):
            fresh_points = ef_vertices(inst, sides)

            if [v.point.values for v in vertices] != [p.values for p in fresh_points]:
                return Verification(False, "vertex list differs from a fresh enumeration")

            for k, vertex in enumerate(vertices):
                value = improvement_value(inst, vertex.point).value

                if value != vertex.improvement.value:
                    return Verification(False, f"improvement value mismatch at vertex {k + 1}")

                if value == 0:
                    return Verification(False, f"vertex {k + 1} is Pareto optimal")

        case NotExistsDominated(y=y, minima=minima, strict_entity=strict, sides=sides):
            check_allocation(inst, y)

            if (fresh_minima := domination_minima(inst, y, sides)) != minima:
                e = next(e for e, (a, b) in enumerate(zip(fresh_minima, minima)) if a != b)
                return Verification(False, f"domination minimum mismatch for {inst.describe(e)}")

            if any(m < 0 for m in minima):
                return Verification(False, "some entity can do better than y while envy-free")

            if not 0 <= strict < len(minima) or minima[strict] <= 0:
                return Verification(False, "strict entity has no positive gap")

    return Verification(True)


def verify_certificate(inst: MarketInstance, verdict: Verdict) -> Verification:
    """Re-derive every claim of a verdict from the instance alone.

    Only the points stored in the verdict are trusted; values, vertex lists
    and minima are recomputed.  Failures are reported, never raised.

    Examples
    --------
    >>> from dataclasses import replace
    >>> from matchfair.catalog import catalog
    >>> inst = catalog("thm1")[0]
    >>> verdict = decide_poef(inst)
    >>> verify_certificate(inst, verdict)
    Verification(ok=True, reason='')
    >>> first = verdict.vertices[0]
    >>> tampered = replace(first, improvement=replace(first.improvement, value=ZERO))
    >>> verify_certificate(inst, replace(verdict, vertices=(tampered, *verdict.vertices[1:])))
    Verification(ok=False, reason='improvement value mismatch at vertex 1')
    """
    try:
        return _verify(inst, verdict)
    except (MatchfairError, ValueError) as e:
        return Verification(False, str(e))


def _improvement_json(result: ImprovementResult) -> dict[str, t.Any]:
    return {
        "value": format_rat(result.value),
        "witness": allocation_to_json(result.witness),
        "gains": format_vector(result.gains),
    }


def verdict_to_json(inst: MarketInstance, verdict: Verdict) -> dict[str, t.Any]:
    """Certificate document for ``verdict``, stable for a fixed instance."""
    payload: dict[str, t.Any]

    match verdict:
        case Exists():
            payload = {
                "allocation": allocation_to_json(verdict.allocation),
                "improvement": _improvement_json(verdict.improvement),
                "envy": [],
            }
        case NotExists():
            payload = {
                "vertices": [
                    {"point": allocation_to_json(v.point), **_improvement_json(v.improvement)}
                    for v in verdict.vertices
                ]
            }
        case NotExistsDominated():
            payload = {
                "y": allocation_to_json(verdict.y),
                "minima": format_vector(verdict.minima),
                "strict_entity": verdict.strict_entity + 1,
                "gap": format_rat(verdict.gap),
            }

    return {
        "verdict": str(verdict.kind),
        "method": verdict.method,
        "instance_hash": instance_hash(inst),
        "sides": str(verdict.sides),
        "constraint_system": ef_constraints(inst, verdict.sides).to_json(),
        "payload": payload,
    }


def _improvement_from_json(
    inst: MarketInstance, data: t.Any, location: str
) -> ImprovementResult:
    try:
        return ImprovementResult(
            parse_rat(data["value"]),
            allocation_from_json(data["witness"], inst, f"{location}.witness"),
            tuple(parse_rat(v) for v in data["gains"]),
        )
    except (KeyError, TypeError) as e:
        msg = f"malformed improvement certificate ({e!r})"
        raise ParseError(msg, location) from e


def verdict_from_json(inst: MarketInstance, data: t.Any) -> Verdict:
    """Rebuild a verdict from its certificate document.

    The instance hash and the embedded constraint system must match
    ``inst``.

    Examples
    --------
    >>> from matchfair.catalog import catalog
    >>> inst, y = catalog("thm2")
    >>> certificate = find_domination_certificate(inst, y)
    >>> verdict_from_json(inst, verdict_to_json(inst, certificate)) == certificate
    True
    """
    location = "certificate"

    try:
        kind = VerdictKind(data["verdict"])
        sides = Sides(data.get("sides", Sides.BOTH))
        payload = data["payload"]

        if data["instance_hash"] != instance_hash(inst):
            msg = "certificate was issued for a different instance"
            raise ParseError(msg, f"{location}.instance_hash")

        if ConstraintSystem.from_json(data["constraint_system"]) != ef_constraints(inst, sides):
            msg = "embedded constraint system differs from the instance's envy-free system"
            raise ParseError(msg, f"{location}.constraint_system")

        match kind:
            case VerdictKind.EXISTS:
                return Exists(
                    allocation_from_json(payload["allocation"], inst, f"{location}.allocation"),
                    _improvement_from_json(inst, payload["improvement"], f"{location}.improvement"),
                    sides=sides,
                    method=data["method"],
                )
            case VerdictKind.NOT_EXISTS:
                return NotExists(
                    tuple(
                        ScannedVertex(
                            allocation_from_json(v["point"], inst, f"{location}.vertices[{k}]"),
                            _improvement_from_json(inst, v, f"{location}.vertices[{k}]"),
                        )
                        for k, v in enumerate(payload["vertices"])
                    ),
                    sides=sides,
                    method=data["method"],
                )
            case VerdictKind.NOT_EXISTS_DOMINATED:
                return NotExistsDominated(
                    allocation_from_json(payload["y"], inst, f"{location}.y"),
                    tuple(parse_rat(v) for v in payload["minima"]),
                    int(payload["strict_entity"]) - 1,
                    sides=sides,
                    method=data["method"],
                )
    except (AttributeError, KeyError, TypeError, ValueError) as e:
        if isinstance(e, ParseError):
            raise

        msg = f"malformed certificate ({e!r})"
        raise ParseError(msg, location) from e


@dataclass(frozen=True)
class HeuristicResult:
    """Outcome of a random vertex search; a miss proves nothing."""

    allocation: Allocation | None
    improvement: ImprovementResult | None
    trials: int


def search_poef(
    inst: MarketInstance,
    trials: int = 200,
    seed: int = 0,
    *,
    sides: Sides | str = Sides.BOTH,
) -> HeuristicResult:
    """Look for a Pareto-optimal envy-free vertex by random LP objectives.

    Each trial maximizes a random integer objective in ``[-5, 5]`` over the
    envy-free polytope (numpy PCG64 seeded with ``seed``) and tests the
    resulting vertex.  No size caps apply beyond those of the allocation
    polytope.

    Examples
    --------
    >>> from matchfair.catalog import catalog
    >>> search_poef(catalog("one_sided")[0], trials=5).allocation is not None
    True
    >>> search_poef(catalog("thm1")[0], trials=5).allocation is None
    True
    """
    cs = ef_constraints(inst, Sides(sides))
    rng = np.random.default_rng(seed)
    k = len(inst.edges)
    seen: set[Vector] = set()

    for trial in range(trials):
        objective = tuple(Rat(c) for c in rng.integers(-5, 6, size=k).tolist())
        outcome = lp_optimize(cs, objective)

        if not outcome.optimal or outcome.point is None:
            msg = f"envy-free system LP ended {outcome.status}"
            raise LpFailure(msg)

        if outcome.point in seen:
            continue

        seen.add(outcome.point)
        x = Allocation.for_instance(inst, outcome.point)

        if (result := improvement_value(inst, x)).pareto_optimal:
            logger.info("heuristic hit after %d trials", trial + 1)
            return HeuristicResult(x, result, trial + 1)

    return HeuristicResult(None, None, trials)


def functional_is_forced_on_grid(report: GridReport, f: Functional, value: Rat) -> bool:
    """Whether every envy-free grid point gives ``f`` exactly ``value``."""
    return all(
        sum((c * v for c, v in zip(f.coefficients, p.allocation.values)), ZERO) == value
        for p in report.points
        if p.envy_free
    )
