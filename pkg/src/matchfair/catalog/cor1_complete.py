"""The non-bipartite counterexample on the complete graph, within-side edges worth zero.

The reference allocation is labeled on all nine cross edges, so the
within-side edges carry nothing.  No verdict is claimed for this variant.
"""

import typing as t
from itertools import combinations

from matchfair.catalog import cor1
from matchfair.exactmath import Rat
from matchfair.market import MarketInstance

INSTANCE: t.Final = MarketInstance.non_bipartite(
    6,
    {edge: cor1.INSTANCE.utility(*edge) for edge in combinations(range(6), 2)},
)

_Y: t.Final = ((Rat(2, 3), Rat(1, 3), 0), (Rat(1, 3), Rat(1, 3), Rat(1, 3)), (0, Rat(1, 3), Rat(2, 3)))

LABELS: t.Final = {(i, 3 + j): Rat(v) for i, row in enumerate(_Y) for j, v in enumerate(row)}
FORCED: t.Final[dict[str, t.Any]] = {}
EXPECTED: t.Final = None
