from fractions import Fraction

import pytest
from conftest import mixtures
from hypothesis import given
from hypothesis import strategies as st

from matchfair.errors import AllocationError, CapExceededError, DimensionError, InfeasibleError
from matchfair.exactmath import ONE, ZERO
from matchfair.market import (
    Allocation,
    MarketInstance,
    Mode,
    allocation_polytope,
    birkhoff_decompose,
    check_allocation,
    complete_allocation,
    compose_birkhoff,
    gen_random,
    permute,
    uniform_allocation,
    utility_profile,
)

third = Fraction(1, 3)


def strings(matrix: tuple[tuple[Fraction, ...], ...]) -> list[list[str]]:
    return [[str(v) for v in row] for row in matrix]


def test_thm1_reference_allocation(thm1: tuple[MarketInstance, Allocation]) -> None:
    inst, y = thm1

    assert strings(y.matrix) == [
        ["2/3", "1/3", "0"],
        ["1/3", "1/3", "1/3"],
        ["0", "1/3", "2/3"],
    ]
    assert [str(v) for v in utility_profile(inst, y).values] == ["2/3", "2/3", "0", "1/3", "0", "0"]


def test_thm2_reference_allocation(thm2: tuple[MarketInstance, Allocation]) -> None:
    inst, y = thm2

    assert [str(v) for v in utility_profile(inst, y).values] == ["2/3", "4/3", "0", "4/3", "1/3", "1/3"]


def test_greedy_completion_fills_row_major(thm2: tuple[MarketInstance, Allocation]) -> None:
    inst, _ = thm2
    x = complete_allocation(inst, {(0, 3): third, (1, 3): third, (1, 4): third, (1, 5): third})

    assert strings(x.matrix) == [
        ["1/3", "2/3", "0"],
        ["1/3", "1/3", "1/3"],
        ["1/3", "0", "2/3"],
    ]


def test_strict_completion_keeps_the_profile(thm1: tuple[MarketInstance, Allocation]) -> None:
    inst, y = thm1
    labels = {(0, 3): 2 * third, (1, 3): third, (1, 4): third, (1, 5): third}
    strict = complete_allocation(inst, labels, strict=True)

    assert utility_profile(inst, strict) == utility_profile(inst, y)


def test_completion_rejects_overfull_columns(zero3: MarketInstance) -> None:
    with pytest.raises(InfeasibleError, match="job 4"):
        complete_allocation(zero3, {(0, 3): 2 * third, (1, 3): 2 * third})


def test_completion_rejects_negative_shares(zero3: MarketInstance) -> None:
    with pytest.raises(InfeasibleError, match="negative share"):
        complete_allocation(zero3, {(0, 3): -third})


def test_check_allocation_names_violated_rows(zero3: MarketInstance) -> None:
    x = Allocation.from_matrix([[1, 0, 0], [1, 0, 0], [0, 0, 1]])

    with pytest.raises(AllocationError, match=r"col\(4\), col\(5\)"):
        check_allocation(zero3, x)

    with pytest.raises(DimensionError):
        check_allocation(zero3, Allocation.from_matrix([[1, 0], [0, 1]]))


def test_uniform_allocation(zero3: MarketInstance) -> None:
    x = uniform_allocation(zero3)

    assert set(x.values) == {third}
    check_allocation(zero3, x)

    path = MarketInstance.non_bipartite(4, {(0, 1): 1, (1, 2): 1, (2, 3): 1})

    with pytest.raises(AllocationError):
        uniform_allocation(path)


@given(mixtures(), mixtures(), st.fractions(min_value=0, max_value=1, max_denominator=7))
def test_profiles_are_linear(x: Allocation, y: Allocation, weight: Fraction) -> None:
    inst = MarketInstance.asymmetric([[1, 2, 0], [0, 1, 3], [2, 0, 1]], [[0, 1, 1], [2, 0, 0], [1, 1, 1]])
    ux, uy = utility_profile(inst, x), utility_profile(inst, y)
    mixed = utility_profile(inst, x.mix(weight, y))

    assert mixed.values == tuple(weight * a + (ONE - weight) * b for a, b in zip(ux.values, uy.values))


@given(mixtures(4))
def test_birkhoff_decomposition_reconstructs(x: Allocation) -> None:
    terms = birkhoff_decompose(x)

    assert sum((term.coefficient for term in terms), ZERO) == 1
    assert all(term.coefficient > 0 for term in terms)
    assert compose_birkhoff(4, terms) == x


def test_birkhoff_rejects_non_stochastic() -> None:
    with pytest.raises(AllocationError, match="not doubly stochastic"):
        birkhoff_decompose(Allocation.from_matrix([[1, 1], [0, 0]]))


def test_gen_random_is_deterministic() -> None:
    a = gen_random(Mode.TWO_SIDED_SYMMETRIC, 3, ["0", "1/2", "1"], seed=11)
    b = gen_random(Mode.TWO_SIDED_SYMMETRIC, 3, ["0", "1/2", "1"], seed=11)

    assert a == b
    assert {v for row in a.weights for v in row} <= {ZERO, Fraction(1, 2), ONE}
    assert dict(a.provenance) == {
        "generator": "numpy.random.PCG64",
        "seed": "11",
        "values": "0 1/2 1",
    }


def test_gen_random_non_bipartite_uses_the_complete_graph() -> None:
    inst = gen_random("non_bipartite", 4, [0, 1], seed=3)

    assert len(inst.edges) == 6
    assert inst.variables[0] == "x_1_2"


def test_gen_random_rejects_bad_parameters() -> None:
    with pytest.raises(ValueError, match="value set"):
        gen_random(Mode.TWO_SIDED_ASYMMETRIC, 3, [], seed=0)

    with pytest.raises(ValueError, match="seed"):
        gen_random(Mode.TWO_SIDED_ASYMMETRIC, 3, [1], seed=-1)


def test_instance_validation() -> None:
    with pytest.raises(DimensionError):
        MarketInstance.asymmetric([[1, 0]], [[0]])

    with pytest.raises(ValueError, match="negative"):
        MarketInstance.symmetric([[0, -1], [0, 0]])

    with pytest.raises(ValueError, match="self-loop"):
        MarketInstance.non_bipartite(2, {(0, 0): 1})

    with pytest.raises(ValueError, match="more than once"):
        MarketInstance.non_bipartite(2, {(0, 1): 1, (1, 0): 2})


def test_odd_set_rows_are_capped() -> None:
    inst = MarketInstance.non_bipartite(12, {(v, v + 1): 1 for v in range(0, 12, 2)})

    with pytest.raises(CapExceededError, match="10 vertices"):
        allocation_polytope(inst)


def test_non_bipartite_odd_set_rows() -> None:
    inst = MarketInstance.non_bipartite(4, {(0, 1): 1, (1, 2): 1, (0, 2): 1, (2, 3): 1})
    cs = allocation_polytope(inst)
    odd = {row.name: row for row in cs.inequalities if row.name.startswith("odd(")}

    assert len(odd) == 4
    assert odd["odd(1,2,3)"].rhs == 1
    assert sum(odd["odd(1,2,3)"].coefficients) == 3


def test_permute_moves_utilities(thm1: tuple[MarketInstance, Allocation]) -> None:
    inst, _ = thm1
    moved = permute(inst, [2, 0, 1], [1, 2, 0])

    for i in range(3):
        for j in range(3):
            assert moved.agent_matrix()[[2, 0, 1][i]][[1, 2, 0][j]] == inst.agent_matrix()[i][j]
            assert moved.job_matrix()[[1, 2, 0][j]][[2, 0, 1][i]] == inst.job_matrix()[j][i]

    assert permute(inst, [0, 1, 2]) == inst
