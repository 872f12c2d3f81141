"""Symmetric utilities over {0, 1, 2} with no Pareto-optimal envy-free allocation."""

import typing as t

from matchfair.exactmath import Rat
from matchfair.market import MarketInstance

INSTANCE: t.Final = MarketInstance.symmetric(
    [
        [1, 0, 0],
        [2, 1, 1],
        [0, 0, 0],
    ]
)

LABELS: t.Final = {
    (0, 3): Rat(2, 3),
    (1, 3): Rat(1, 3),
    (1, 4): Rat(1, 3),
    (1, 5): Rat(1, 3),
}

FORCED: t.Final = {
    "x_2_4": Rat(1, 3),
    "x_1_4": Rat(1, 3),
    "x_2_5": Rat(1, 3),
    "x_2_6": Rat(1, 3),
}

EXPECTED: t.Final = "not_exists"
