"""Dichotomous asymmetric utilities with no Pareto-optimal envy-free allocation."""

import typing as t

from matchfair.exactmath import Rat
from matchfair.market import MarketInstance

# Agent 1 wants job 4, agent 2 wants jobs 5 and 6, agent 3 is indifferent.
# Job 4 wants agent 2; jobs 5 and 6 are indifferent.
INSTANCE: t.Final = MarketInstance.asymmetric(
    [
        [1, 0, 0],
        [0, 1, 1],
        [0, 0, 0],
    ],
    [
        [0, 1, 0],
        [0, 0, 0],
        [0, 0, 0],
    ],
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
}

EXPECTED: t.Final = "not_exists"
