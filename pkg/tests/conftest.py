from fractions import Fraction

import pytest
from hypothesis import strategies as st

from matchfair.catalog import catalog
from matchfair.market import (
    Allocation,
    BirkhoffTerm,
    MarketInstance,
    compose_birkhoff,
    complete_allocation,
)


@pytest.fixture(scope="session")
def thm1() -> tuple[MarketInstance, Allocation]:
    return catalog("thm1")


@pytest.fixture(scope="session")
def thm2() -> tuple[MarketInstance, Allocation]:
    return catalog("thm2")


@pytest.fixture(scope="session")
def cor1() -> tuple[MarketInstance, Allocation]:
    return catalog("cor1")


@pytest.fixture(scope="session")
def thm2_pinned(thm2: tuple[MarketInstance, Allocation]) -> Allocation:
    """The only envy-free allocation of thm2 with its pinned coordinates at 1/3."""
    inst, _ = thm2
    third = Fraction(1, 3)

    return complete_allocation(inst, {(i, 3 + j): third for i in range(3) for j in range(3)})


@pytest.fixture(scope="session")
def zero3() -> MarketInstance:
    return MarketInstance.asymmetric([[0] * 3] * 3, [[0] * 3] * 3)


@st.composite
def mixtures(draw: st.DrawFn, n: int = 3) -> Allocation:
    """Random doubly stochastic allocations as mixtures of permutations."""
    perms = draw(st.lists(st.permutations(range(n)), min_size=1, max_size=4))
    weights = draw(st.lists(st.integers(1, 6), min_size=len(perms), max_size=len(perms)))
    total = sum(weights)

    return compose_birkhoff(
        n, [BirkhoffTerm(Fraction(w, total), tuple(p)) for w, p in zip(weights, perms)]
    )


dichotomous_instances = st.builds(
    MarketInstance.asymmetric,
    st.lists(st.lists(st.integers(0, 1), min_size=3, max_size=3), min_size=3, max_size=3),
    st.lists(st.lists(st.integers(0, 1), min_size=3, max_size=3), min_size=3, max_size=3),
)

small_utility_instances = st.builds(
    MarketInstance.asymmetric,
    st.lists(st.lists(st.integers(0, 3), min_size=3, max_size=3), min_size=3, max_size=3),
    st.lists(st.lists(st.integers(0, 3), min_size=3, max_size=3), min_size=3, max_size=3),
)

small_symmetric_instances = st.builds(
    MarketInstance.symmetric,
    st.lists(st.lists(st.integers(0, 3), min_size=3, max_size=3), min_size=3, max_size=3),
)


def cross_edges(inst: MarketInstance) -> MarketInstance:
    """The same weights as a non-bipartite market on the nine cross edges."""
    return MarketInstance.non_bipartite(
        6, {(i, 3 + j): inst.weights[i][j] for i in range(3) for j in range(3)}
    )
