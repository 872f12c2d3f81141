"""The ``matchfair`` command line.

Exit codes: 0 check passed, allocation exists or command succeeded;
1 heuristic search inconclusive; 2 usage or parse error; 3 check failed or
non-existence certified; 4 size cap or time budget exceeded; 5 internal
error or failed reproduction.
"""

from __future__ import annotations

import json
import logging
import signal
import sys
import typing as t
from collections.abc import Iterator, Sequence
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

import polars as pl
from cyclopts import App, Parameter
from cyclopts.exceptions import CycloptsError

import matchfair.polars as pl_
from matchfair.errors import (
    CapExceededError,
    DeadlineExceeded,
    MatchfairError,
    ParseError,
)
from matchfair.exactmath import format_rat, format_vector, parse_rat
from matchfair.existence import (
    Exists,
    NotExists,
    decide_poef,
    grid_oracle,
    search_poef,
    verdict_from_json,
    verdict_to_json,
    verify_certificate,
)
from matchfair.fairness import (
    Sides,
    coordinate_functionals,
    envy_pairs,
    forced_value,
    improvement_value,
    parse_functional,
)
from matchfair.io import (
    allocation_to_json,
    instance_to_json,
    load_allocation,
    load_instance,
    read_json,
)
from matchfair.market import Mode, birkhoff_decompose, gen_random, utility_profile
from matchfair.reproduce import reproduce as run_reproduction

logger = logging.getLogger(__name__)

EXIT_OK: t.Final = 0
EXIT_INCONCLUSIVE: t.Final = 1
EXIT_USAGE: t.Final = 2
EXIT_NEGATIVE: t.Final = 3
EXIT_LIMIT: t.Final = 4
EXIT_INTERNAL: t.Final = 5

type CatalogName = t.Literal["thm1", "thm2", "cor1", "one_sided"]

app = App(
    name="matchfair",
    help="Exact envy-freeness and Pareto-optimality checks for fractional matching markets.",
    help_formatter="default",
)


@Parameter(name="*")
@dataclass
class Common:
    json: bool = False
    """Print machine-readable JSON instead of tables."""

    max_seconds: float | None = None
    """Abort with exit code 4 after this many seconds of wall time."""

    verbose: bool = False
    """Log debugging detail to stderr."""


def _configure(common: Common | None) -> Common:
    common = common or Common()
    logging.basicConfig(
        level=logging.DEBUG if common.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )

    return common


@contextmanager
def deadline(seconds: float | None) -> Iterator[None]:
    """Raise ``DeadlineExceeded`` in the main thread once ``seconds`` elapse."""
    if seconds is None or not hasattr(signal, "setitimer"):
        yield
        return

    def expire(signum: int, frame: object) -> None:
        msg = f"time budget of {seconds} s exceeded"
        raise DeadlineExceeded(msg)

    previous = signal.signal(signal.SIGALRM, expire)
    signal.setitimer(signal.ITIMER_REAL, seconds)

    try:
        yield
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, previous)


def _emit(common: Common, document: t.Any, text: str) -> None:
    print(json.dumps(document, indent=2) if common.json else text)


@app.command(name="check-ef")
def check_ef(
    *,
    instance: Path,
    allocation: Path,
    sides: Sides = Sides.BOTH,
    common: Common | None = None,
) -> int:
    """Check an allocation for envy.

    Parameters
    ----------
    instance
        Instance JSON file.
    allocation
        Allocation JSON file.
    sides
        Sides of a two-sided market that must be envy-free.
    """
    common = _configure(common)

    with deadline(common.max_seconds):
        inst = load_instance(instance)
        x = load_allocation(allocation, inst)
        witnesses = envy_pairs(inst, x, sides)

    document = {
        "envy_free": not witnesses,
        "envy": [
            {
                "observer": w.observer + 1,
                "envied": w.envied + 1,
                "own_value": format_rat(w.own_value),
                "envied_value": format_rat(w.envied_value),
            }
            for w in witnesses
        ],
    }
    text = (
        "envy-free"
        if not witnesses
        else f"{len(witnesses)} envy pair(s)\n{pl_.render(pl_.envy_frame(inst, witnesses))}"
    )
    _emit(common, document, text)

    return EXIT_OK if not witnesses else EXIT_NEGATIVE


@app.command(name="check-po")
def check_po(*, instance: Path, allocation: Path, common: Common | None = None) -> int:
    """Check an allocation for Pareto optimality with the improvement LP.

    Parameters
    ----------
    instance
        Instance JSON file.
    allocation
        Allocation JSON file.
    """
    common = _configure(common)

    with deadline(common.max_seconds):
        inst = load_instance(instance)
        x = load_allocation(allocation, inst)
        result = improvement_value(inst, x)

    document = {
        "pareto_optimal": result.pareto_optimal,
        "improvement": format_rat(result.value),
        "witness": allocation_to_json(result.witness),
        "gains": format_vector(result.gains),
    }
    profiles = {"x": utility_profile(inst, x), "witness": utility_profile(inst, result.witness)}
    text = (
        f"improvement value {format_rat(result.value)}: "
        f"{'Pareto optimal' if result.pareto_optimal else 'dominated'}\n"
        f"{pl_.render(pl_.profile_frame(inst, profiles))}"
    )
    _emit(common, document, text)

    return EXIT_OK if result.pareto_optimal else EXIT_NEGATIVE


@app.command
def decide(
    *,
    instance: Path,
    sides: Sides = Sides.BOTH,
    heuristic: bool = False,
    trials: int = 200,
    seed: int = 0,
    output: Path | None = None,
    common: Common | None = None,
) -> int:
    """Decide whether a Pareto-optimal envy-free allocation exists.

    Parameters
    ----------
    instance
        Instance JSON file.
    sides
        Sides of a two-sided market that must be envy-free.
    heuristic
        Search random envy-free vertices instead of deciding; not a certificate.
    trials
        Number of random objectives tried by the heuristic search.
    seed
        Seed of the heuristic search.
    output
        Write the certificate JSON to this file.
    """
    common = _configure(common)

    with deadline(common.max_seconds):
        inst = load_instance(instance)

        if heuristic:
            found = search_poef(inst, trials, seed, sides=sides)

            if found.allocation is None:
                _emit(
                    common,
                    {"verdict": "inconclusive", "method": "heuristic", "trials": found.trials},
                    f"inconclusive after {found.trials} trials (not a certificate)",
                )
                return EXIT_INCONCLUSIVE

            document = {
                "verdict": "exists",
                "method": "heuristic",
                "trials": found.trials,
                "allocation": allocation_to_json(found.allocation),
            }
            text = "found a Pareto-optimal envy-free allocation\n" + pl_.render(
                pl_.allocation_frame(inst.variables, [found.allocation])
            )
            _emit(common, document, text)
            return EXIT_OK

        verdict = decide_poef(inst, sides=sides)
        certificate = verdict_to_json(inst, verdict)

    if output is not None:
        output.write_text(json.dumps(certificate, indent=2))

    match verdict:
        case Exists():
            text = "exists\n" + pl_.render(pl_.allocation_frame(inst.variables, [verdict.allocation]))
        case NotExists():
            text = (
                f"not_exists: all {len(verdict.vertices)} envy-free vertices are Pareto-dominated\n"
                + pl_.render(
                    pl_.allocation_frame(
                        inst.variables,
                        [v.point for v in verdict.vertices],
                        v=[format_rat(v.improvement.value) for v in verdict.vertices],
                    )
                )
            )

    _emit(common, certificate, text)

    return EXIT_OK if isinstance(verdict, Exists) else EXIT_NEGATIVE


@app.command
def forced(
    *,
    instance: Path,
    functional: t.Annotated[list[str] | None, Parameter(consume_multiple=True)] = None,
    all_coordinates: bool = False,
    sides: Sides = Sides.BOTH,
    common: Common | None = None,
) -> int:
    """Range of linear functionals over the envy-free polytope.

    Parameters
    ----------
    instance
        Instance JSON file.
    functional
        ``x_i_j`` (an allocation variable) or ``u_i`` (a utility), external labels.
    all_coordinates
        Report every allocation variable.
    sides
        Sides of a two-sided market that must be envy-free.
    """
    common = _configure(common)

    with deadline(common.max_seconds):
        inst = load_instance(instance)
        functionals = [parse_functional(inst, f) for f in functional or ()]

        if all_coordinates:
            functionals += coordinate_functionals(inst)

        if not functionals:
            msg = "give --functional or --all-coordinates"
            raise ParseError(msg, "forced")

        ranges = [forced_value(inst, f, sides) for f in functionals]

    document = [
        {"functional": r.name, "min": format_rat(r.min), "max": format_rat(r.max), "forced": r.forced}
        for r in ranges
    ]
    _emit(common, document, pl_.render(pl.DataFrame(document)))

    return EXIT_OK


@app.command
def reproduce(
    name: CatalogName,
    /,
    *,
    complete_graph: bool = False,
    common: Common | None = None,
) -> int:
    """Re-derive a catalog counterexample end to end.

    Parameters
    ----------
    name
        Catalog instance.
    complete_graph
        With cor1, use the complete graph (within-side edges worth zero);
        no verdict is expected for this variant.
    """
    common = _configure(common)
    entry = "cor1_complete" if complete_graph and name == "cor1" else name

    with deadline(common.max_seconds):
        run = run_reproduction(entry)

    lines = [
        f"{entry}: {run.verdict.kind} (expected {run.expected or 'nothing'}), "
        f"certificate {'verified' if run.verification else 'REJECTED: ' + run.verification.reason}"
    ]

    if run.domination is not None:
        lines.append(
            f"domination: {run.instance.describe(run.domination.strict_entity)} "
            f"gains at least {format_rat(run.domination.gap)} over every envy-free allocation"
        )

    for check in run.forced:
        lines.append(
            f"forced {check.value.name} = [{format_rat(check.value.min)}, "
            f"{format_rat(check.value.max)}], expected {format_rat(check.expected)}: "
            f"{'ok' if check.ok else 'MISMATCH'}"
        )

    if run.odd_sets_redundant is not None:
        lines.append(f"odd-set rows redundant: {run.odd_sets_redundant}")

    _emit(common, run.to_json(), "\n".join(lines))

    if not run.ok:
        return EXIT_INTERNAL

    return EXIT_NEGATIVE if run.verdict.kind != "exists" else EXIT_OK


@app.command
def oracle(
    *,
    instance: Path,
    denominator: int,
    output: Path | None = None,
    common: Common | None = None,
) -> int:
    """Classify every allocation with entries in {0, 1/D, ..., 1}.

    Parameters
    ----------
    instance
        Instance JSON file (two-sided, n <= 3).
    denominator
        Grid denominator D (at most 6).
    output
        Write the per-allocation table to this parquet file.
    """
    common = _configure(common)

    with deadline(common.max_seconds):
        inst = load_instance(instance)
        report = grid_oracle(inst, denominator)

    if output is not None:
        report.to_frame().write_parquet(output)

    document = {
        "denominator": report.denominator,
        "total": report.total,
        "envy_free": report.ef_count,
        "pareto_optimal": report.po_count,
        "pareto_optimal_envy_free": report.poef_count,
        "points": [allocation_to_json(p.allocation) for p in report.poef_points],
    }
    text = (
        f"D={report.denominator}: {report.total} allocations, {report.ef_count} envy-free, "
        f"{report.po_count} Pareto optimal, {report.poef_count} both"
    )
    _emit(common, document, text)

    return EXIT_OK


@app.command
def gen(
    *,
    mode: Mode,
    n: int,
    values: t.Annotated[list[str], Parameter(consume_multiple=True)],
    seed: int,
    output: Path | None = None,
    common: Common | None = None,
) -> int:
    """Generate a random instance (always printed as JSON).

    Parameters
    ----------
    mode
        Market model.
    n
        Side size, or vertex count for non-bipartite markets.
    values
        Utility values to draw from, as rationals.
    seed
        Generator seed.
    output
        Write the instance to this file instead of printing it.
    """
    common = _configure(common)
    value_set = [parse_rat(v) for v in values]

    try:
        inst = gen_random(mode, n, value_set, seed)
    except ValueError as e:
        raise ParseError(str(e), "gen") from e

    text = json.dumps(instance_to_json(inst), indent=2)

    if output is not None:
        output.write_text(text)
    else:
        print(text)

    return EXIT_OK


@app.command
def decompose(*, allocation: Path, common: Common | None = None) -> int:
    """Write a bipartite allocation as a lottery over perfect matchings.

    Parameters
    ----------
    allocation
        Allocation JSON file (matrix form).
    """
    common = _configure(common)
    x = load_allocation(allocation)
    n = x.size
    terms = birkhoff_decompose(x)
    document = [
        {"coefficient": format_rat(c), "matching": [[i + 1, n + j + 1] for i, j in enumerate(perm)]}
        for c, perm in terms
    ]
    text = "\n".join(
        f"{format_rat(c)} x " + ", ".join(f"{i + 1}-{n + j + 1}" for i, j in enumerate(perm))
        for c, perm in terms
    )
    _emit(common, document, text)

    return EXIT_OK


@app.command
def verify(*, instance: Path, certificate: Path, common: Common | None = None) -> int:
    """Re-check a stored certificate against its instance.

    Parameters
    ----------
    instance
        Instance JSON file.
    certificate
        Certificate JSON written by ``decide --output``.
    """
    common = _configure(common)

    with deadline(common.max_seconds):
        inst = load_instance(instance)
        verdict = verdict_from_json(inst, read_json(certificate))
        verification = verify_certificate(inst, verdict)

    _emit(
        common,
        {"verdict": str(verdict.kind), "ok": verification.ok, "reason": verification.reason},
        f"{verdict.kind}: {'verified' if verification else 'rejected: ' + verification.reason}",
    )

    return EXIT_OK if verification else EXIT_NEGATIVE


def run(tokens: Sequence[str] | None = None) -> int:
    """Parse ``tokens`` (default ``sys.argv[1:]``), run the command, return its exit code."""
    try:
        command, bound, _ = app.parse_args(tokens, exit_on_error=False)
    except CycloptsError:
        return EXIT_USAGE

    try:
        result = command(*bound.args, **bound.kwargs)
    except (ParseError, FileNotFoundError, IsADirectoryError) as e:
        logger.error("%s", e)
        return EXIT_USAGE
    except (CapExceededError, DeadlineExceeded) as e:
        logger.error("%s", e)
        return EXIT_LIMIT
    except MatchfairError as e:
        logger.error("%s", e)
        return EXIT_INTERNAL

    return result if isinstance(result, int) else EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
