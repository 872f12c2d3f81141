"""End-to-end runs over catalog instances.

A run decides existence, looks for a domination certificate with the
entry's reference allocation, checks the entry's pinned functionals and
re-verifies every certificate.  For non-bipartite entries whose graph is
bipartite it also confirms that the odd-set rows do not cut the allocation
polytope.
"""

from __future__ import annotations

import logging
import typing as t
from dataclasses import dataclass

from matchfair.catalog import catalog_entry
from matchfair.constraints import ConstraintSystem
from matchfair.exactmath import Rat, format_rat, format_vector
from matchfair.existence import (
    NotExistsDominated,
    Verdict,
    Verification,
    decide_poef,
    find_domination_certificate,
    verdict_to_json,
    verify_certificate,
)
from matchfair.fairness import ForcedValue, forced_value
from matchfair.market import MarketInstance, Mode, allocation_polytope, utility_profile
from matchfair.polytope import polytopes_equal

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ForcedCheck:
    value: ForcedValue
    expected: Rat

    @property
    def ok(self) -> bool:
        return self.value.forced and self.value.min == self.expected


@dataclass(frozen=True)
class Reproduction:
    name: str
    instance: MarketInstance
    expected: str | None
    verdict: Verdict
    verification: Verification
    domination: NotExistsDominated | None
    domination_verification: Verification | None
    forced: tuple[ForcedCheck, ...]
    odd_sets_redundant: bool | None

    @property
    def ok(self) -> bool:
        """Every check passed and the verdict is the expected one, if any."""
        return (
            self.verification.ok
            and (self.expected is None or self.verdict.kind == self.expected)
            and (self.domination_verification is None or self.domination_verification.ok)
            and all(check.ok for check in self.forced)
            and self.odd_sets_redundant is not False
        )

    def to_json(self) -> dict[str, t.Any]:
        return {
            "instance": self.name,
            "expected": self.expected,
            "ok": self.ok,
            "certificate": verdict_to_json(self.instance, self.verdict),
            "verified": self.verification.ok,
            "domination": (
                None
                if self.domination is None
                else {
                    "strict_entity": self.domination.strict_entity + 1,
                    "gap": format_rat(self.domination.gap),
                    "minima": format_vector(self.domination.minima),
                    "verified": bool(self.domination_verification),
                }
            ),
            "forced": [
                {
                    "functional": check.value.name,
                    "min": format_rat(check.value.min),
                    "max": format_rat(check.value.max),
                    "forced": check.value.forced,
                    "expected": format_rat(check.expected),
                }
                for check in self.forced
            ],
            "odd_sets_redundant": self.odd_sets_redundant,
        }


def _odd_sets_redundant(inst: MarketInstance) -> bool | None:
    """Compare the polytope with and without odd-set rows, for bipartite graphs."""
    if inst.mode is not Mode.NON_BIPARTITE:
        return None

    cs = allocation_polytope(inst)
    half = inst.size // 2

    if any((a < half) == (b < half) for a, b in inst.edges):
        return None

    without = ConstraintSystem(
        cs.num_vars,
        cs.equalities,
        tuple(row for row in cs.inequalities if not row.name.startswith("odd(")),
        cs.variables,
    )

    return polytopes_equal(cs, without)


def reproduce(name: str, *, workers: int | None = None) -> Reproduction:
    """Run every check for catalog entry ``name``.

    Examples
    --------
    >>> run = reproduce("thm1")
    >>> run.ok, run.verdict.kind, run.domination.strict_entity
    (True, <VerdictKind.NOT_EXISTS: 'not_exists'>, 0)
    """
    entry = catalog_entry(name)
    inst = entry.instance
    logger.info("reproducing %s", name)

    verdict = decide_poef(inst, workers=workers)
    verification = verify_certificate(inst, verdict)
    domination = find_domination_certificate(inst, entry.y, workers=workers)
    domination_verification = None if domination is None else verify_certificate(inst, domination)
    forced = tuple(
        ForcedCheck(forced_value(inst, f, workers=workers), expected)
        for f, expected in entry.forced
    )

    if domination is not None:
        u = utility_profile(inst, entry.y)[domination.strict_entity]
        logger.info(
            "%s: %s gets %s under y, at most %s when envy-free",
            name,
            inst.describe(domination.strict_entity),
            u,
            u - domination.gap,
        )

    return Reproduction(
        name,
        inst,
        entry.expected,
        verdict,
        verification,
        domination,
        domination_verification,
        forced,
        _odd_sets_redundant(inst),
    )
