"""Every agent wants job 4 and jobs are indifferent: the uniform allocation is PO and EF."""

import typing as t

from matchfair.exactmath import Rat
from matchfair.market import MarketInstance

INSTANCE: t.Final = MarketInstance.asymmetric(
    [[1, 0, 0]] * 3,
    [[0, 0, 0]] * 3,
)

LABELS: t.Final = {(i, 3 + j): Rat(1, 3) for i in range(3) for j in range(3)}
FORCED: t.Final = {"x_1_4": Rat(1, 3), "x_2_4": Rat(1, 3), "x_3_4": Rat(1, 3)}
EXPECTED: t.Final = "exists"
