"""Vertex enumeration and polytope equality.

Vertices are found by enumerating tight sets.  The equality rows are solved
once, giving the affine hull ``x = p + N z``; inequality rows are projected
into ``z`` coordinates, normalized and deduplicated (a row parallel to a
tighter one can never be tight at a feasible point).  Every selection of
``dim(z)`` linearly independent projected rows is then solved and kept when
its solution satisfies all rows.  Selections are built in increasing row
order, rank-deficient extensions are skipped and, when the number of
candidate selections is large, partial selections whose face is empty are
pruned with a feasibility LP.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterator, Sequence

from matchfair.config import MAX_ROWS, MAX_VARIABLES, PRUNE_THRESHOLD, parallel_map
from matchfair.constraints import ConstraintSystem, Row, contains
from matchfair.errors import CapExceededError, DimensionError, UnboundedError
from matchfair.exactmath import (
    ZERO,
    EchelonBasis,
    Inconsistent,
    Rat,
    RatMatrix,
    Unique,
    Vector,
    dot,
    solve_linear,
)
from matchfair.simplex import LpStatus, lp_optimize

logger = logging.getLogger(__name__)


def check_caps(cs: ConstraintSystem, *, override: bool = False) -> None:
    """Refuse systems above the enumeration caps unless ``override`` is set."""
    if override:
        return

    if cs.num_vars > MAX_VARIABLES or cs.row_count() > MAX_ROWS:
        msg = (
            f"system with {cs.num_vars} variables and {cs.row_count()} rows exceeds "
            f"the vertex enumeration cap ({MAX_VARIABLES} variables, {MAX_ROWS} rows)"
        )
        raise CapExceededError(msg)


def vertex_enumerate(
    cs: ConstraintSystem,
    *,
    override: bool = False,
    workers: int | None = None,
) -> list[Vector]:
    """Enumerate the vertices of a bounded polyhedron.

    Returns distinct vertices in lexicographic order.  Raises
    ``UnboundedError`` when the feasible region is nonempty and unbounded,
    whether or not it has vertices.  An empty region has no vertices.

    Examples
    --------
    >>> from matchfair.constraints import unit_box
    >>> vertex_enumerate(unit_box(2))  # doctest: +NORMALIZE_WHITESPACE
    [(Fraction(0, 1), Fraction(0, 1)), (Fraction(0, 1), Fraction(1, 1)),
     (Fraction(1, 1), Fraction(0, 1)), (Fraction(1, 1), Fraction(1, 1))]

    The standard simplex in three variables:

    >>> simplex = ConstraintSystem(
    ...     3,
    ...     equalities=(Row.of("total", [1, 1, 1], 1),),
    ...     inequalities=tuple(
    ...         Row.sparse(f"nonneg(x{j + 1})", 3, {j: -1}, 0) for j in range(3)
    ...     ),
    ... )
    >>> [tuple(map(int, v)) for v in vertex_enumerate(simplex)]
    [(0, 0, 1), (0, 1, 0), (1, 0, 0)]
    """
    check_caps(cs, override=override)

    eq = RatMatrix.from_rows([row.coefficients for row in cs.equalities], cols=cs.num_vars)

    hull = solve_linear(eq, [row.rhs for row in cs.equalities])

    if isinstance(hull, Inconsistent):
        return []

    if isinstance(hull, Unique):
        return [hull.solution] if contains(cs, hull.solution).satisfied else []

    p, basis = hull.particular, hull.basis

    rows = _project(cs.inequalities, p, basis)

    if rows is None:
        return []

    d = len(basis)
    points = _enumerate_tight_sets(rows, d, workers)

    if not points and _rank(rows, d) < d and _face_nonempty(rows, d, ()):
        msg = "feasible region contains a line, so it has no vertices"
        raise UnboundedError(msg)

    if points and not _recession_free(rows, d):
        msg = "feasible region is unbounded, so its vertices do not describe it"
        raise UnboundedError(msg)

    vertices = {
        tuple(p[j] + sum((z[k] * basis[k][j] for k in range(d)), ZERO) for j in range(cs.num_vars))
        for z in points
    }
    logger.debug("%d vertices from %d projected rows in dimension %d", len(vertices), len(rows), d)

    return sorted(vertices)


def _project(
    inequalities: Sequence[Row],
    particular: Vector,
    basis: Sequence[Vector],
) -> list[tuple[Vector, Rat]] | None:
    """Project rows onto the affine hull; None when some row is violated outright.

    Each projected row is ``(coefficients, rhs)`` scaled so that its first
    nonzero coefficient is +1 or -1.  Parallel rows keep the smallest rhs.
    """
    tightest: dict[Vector, Rat] = {}

    for row in inequalities:
        coefficients = tuple(dot(row.coefficients, direction) for direction in basis)
        rhs = row.rhs - dot(row.coefficients, particular)

        if not any(coefficients):
            if rhs < 0:
                return None
            continue

        lead = abs(next(c for c in coefficients if c))
        key = tuple(c / lead for c in coefficients)
        scaled = rhs / lead

        if key not in tightest or scaled < tightest[key]:
            tightest[key] = scaled

    return list(tightest.items())


def _rank(rows: Sequence[tuple[Vector, Rat]], d: int) -> int:
    if not rows:
        return 0

    return RatMatrix.from_rows([coefficients for coefficients, _ in rows], cols=d).rank()


def _face_nonempty(
    rows: Sequence[tuple[Vector, Rat]], d: int, chosen: Sequence[int]
) -> bool:
    chosen_set = set(chosen)
    cs = ConstraintSystem(
        d,
        equalities=tuple(Row(f"t{i}", rows[i][0], rows[i][1]) for i in chosen),
        inequalities=tuple(
            Row(f"r{i}", c, b) for i, (c, b) in enumerate(rows) if i not in chosen_set
        ),
    )

    return lp_optimize(cs, (ZERO,) * d).status is not LpStatus.INFEASIBLE


def _recession_free(rows: Sequence[tuple[Vector, Rat]], d: int) -> bool:
    """True when no nonzero z has every projected row nonpositive along it."""
    cone = ConstraintSystem(
        d, inequalities=tuple(Row(f"r{i}", c, ZERO) for i, (c, _) in enumerate(rows))
    )

    for k in range(d):
        for sign in (1, -1):
            direction = tuple(Rat(sign) if j == k else ZERO for j in range(d))

            if lp_optimize(cone, direction).status is LpStatus.UNBOUNDED:
                return False

    return True


def _enumerate_tight_sets(
    rows: Sequence[tuple[Vector, Rat]],
    d: int,
    workers: int | None,
) -> list[Vector]:
    k = len(rows)

    if d == 0:
        return [()] if all(b >= 0 for _, b in rows) else []

    prune = math.comb(k, d) > PRUNE_THRESHOLD

    if prune:
        logger.debug("pruning empty faces: C(%d, %d) candidate tight sets", k, d)

    def feasible(z: Vector) -> bool:
        return all(dot(c, z) <= b for c, b in rows)

    def descend(start: int, chosen: tuple[int, ...], echelon: EchelonBasis) -> Iterator[Vector]:
        if len(chosen) == d:
            a = RatMatrix.from_rows([rows[i][0] for i in chosen])
            solution = solve_linear(a, [rows[i][1] for i in chosen])

            if isinstance(solution, Unique) and feasible(solution.solution):
                yield solution.solution
            return

        for i in range(start, k - (d - len(chosen)) + 1):
            if (extended := echelon.extend(rows[i][0])) is None:
                continue

            if prune and not _face_nonempty(rows, d, (*chosen, i)):
                continue

            yield from descend(i + 1, (*chosen, i), extended)

    def branch(first: int) -> list[Vector]:
        echelon = EchelonBasis(d).extend(rows[first][0])

        if echelon is None or (prune and not _face_nonempty(rows, d, (first,))):
            return []

        return list(descend(first + 1, (first,), echelon))

    branches = parallel_map(branch, range(k - d + 1), workers)

    return [z for points in branches for z in points]


def polytopes_equal(
    a: ConstraintSystem,
    b: ConstraintSystem,
    *,
    override: bool = False,
) -> bool:
    """Decide whether two bounded systems describe the same point set.

    Vertices of each are enumerated and checked for mutual containment.

    Examples
    --------
    >>> from matchfair.constraints import unit_box
    >>> square = unit_box(2)
    >>> polytopes_equal(square, square.extend(inequalities=[Row.of("loose", [1, 0], 2)]))
    True
    >>> triangle = square.extend(inequalities=[Row.of("diagonal", [1, 1], 1)])
    >>> polytopes_equal(square, triangle)
    False
    """
    if a.num_vars != b.num_vars:
        msg = f"cannot compare systems in {a.num_vars} and {b.num_vars} variables"
        raise DimensionError(msg)

    vertices_a = vertex_enumerate(a, override=override)
    vertices_b = vertex_enumerate(b, override=override)

    return all(contains(b, v).satisfied for v in vertices_a) and all(
        contains(a, v).satisfied for v in vertices_b
    )
