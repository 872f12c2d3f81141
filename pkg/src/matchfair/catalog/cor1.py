"""The symmetric counterexample as a non-bipartite market on its nine cross edges."""

import typing as t

from matchfair.catalog import thm2
from matchfair.market import MarketInstance

INSTANCE: t.Final = MarketInstance.non_bipartite(
    6,
    {(i, 3 + j): w for i, row in enumerate(thm2.INSTANCE.weights) for j, w in enumerate(row)},
)

LABELS: t.Final = thm2.LABELS
FORCED: t.Final = thm2.FORCED
EXPECTED: t.Final = "not_exists"
