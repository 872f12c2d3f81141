from fractions import Fraction

import pytest
from conftest import cross_edges, mixtures, small_symmetric_instances, small_utility_instances
from hypothesis import given, settings
from hypothesis import strategies as st

from matchfair.config import CACHE_SIZE
from matchfair.constraints import Row, contains
from matchfair.errors import ParseError
from matchfair.exactmath import ZERO
from matchfair.fairness import (
    Sides,
    WeakDominance,
    ef_constraints,
    envy_pairs,
    forced_value,
    improvement_value,
    is_envy_free,
    is_pareto_optimal,
    pareto_dominates,
    parse_functional,
)
from matchfair.market import Allocation, MarketInstance, uniform_allocation, utility_profile
from matchfair.polytope import polytopes_equal

third = Fraction(1, 3)


def scaled(inst: MarketInstance, factor: int) -> MarketInstance:
    return MarketInstance.asymmetric(
        [[factor * v for v in row] for row in inst.agent_utilities],
        [[factor * v for v in row] for row in inst.job_utilities],
    )


def test_thm1_reference_allocation_has_envy(thm1: tuple[MarketInstance, Allocation]) -> None:
    inst, y = thm1

    assert not is_envy_free(inst, y)
    assert is_envy_free(inst, y, Sides.JOBS)
    assert is_envy_free(inst, uniform_allocation(inst))


def test_thm2_envy_free_allocation_is_dominated(
    thm2: tuple[MarketInstance, Allocation], thm2_pinned: Allocation
) -> None:
    inst, y = thm2

    assert is_envy_free(inst, thm2_pinned)
    assert pareto_dominates(inst, y, thm2_pinned) == WeakDominance(strict=(0, 3))

    optimal, result = is_pareto_optimal(inst, thm2_pinned)

    assert not optimal
    assert result.value >= 2 * third


def test_non_bipartite_copy_has_the_same_envy(
    thm2: tuple[MarketInstance, Allocation], cor1: tuple[MarketInstance, Allocation]
) -> None:
    (inst, y), (nb, y_nb) = thm2, cor1

    assert y_nb.values == y.values
    assert envy_pairs(nb, y_nb) == envy_pairs(inst, y)


def test_ef_rows_per_side(thm1: tuple[MarketInstance, Allocation], cor1: tuple[MarketInstance, Allocation]) -> None:
    def count(cs_rows: tuple[Row, ...]) -> int:
        return sum(row.name.startswith("EF(") for row in cs_rows)

    inst, _ = thm1

    assert count(ef_constraints(inst).inequalities) == 12
    assert count(ef_constraints(inst, Sides.AGENTS).inequalities) == 6
    assert count(ef_constraints(inst, Sides.JOBS).inequalities) == 6
    assert count(ef_constraints(cor1[0]).inequalities) == 30


def assert_envy_matches_ef_rows(inst: MarketInstance, x: Allocation, sides: Sides = Sides.BOTH) -> None:
    membership = contains(ef_constraints(inst, sides), x.values)
    names = {f"EF({w.observer + 1},{w.envied + 1})" for w in envy_pairs(inst, x, sides)}

    assert set(membership.violated) == names
    assert membership.satisfied == (not names)


@settings(max_examples=200, deadline=None)
@given(small_utility_instances, mixtures(), st.sampled_from(Sides))
def test_envy_pairs_agree_with_the_ef_system(inst: MarketInstance, x: Allocation, sides: Sides) -> None:
    assert_envy_matches_ef_rows(inst, x, sides)


@settings(max_examples=200, deadline=None)
@given(small_symmetric_instances, mixtures())
def test_envy_pairs_agree_with_the_ef_system_symmetric(inst: MarketInstance, x: Allocation) -> None:
    assert_envy_matches_ef_rows(inst, x)


@settings(max_examples=200, deadline=None)
@given(small_symmetric_instances, mixtures())
def test_envy_pairs_agree_with_the_ef_system_non_bipartite(inst: MarketInstance, x: Allocation) -> None:
    nb = cross_edges(inst)

    assert_envy_matches_ef_rows(nb, Allocation.for_instance(nb, x.values))


@settings(max_examples=200, deadline=None)
@given(st.one_of(small_utility_instances, small_symmetric_instances))
def test_uniform_allocation_is_envy_free(inst: MarketInstance) -> None:
    assert contains(ef_constraints(inst), uniform_allocation(inst).values).satisfied


@settings(max_examples=25, deadline=None)
@given(small_utility_instances, mixtures())
def test_improvement_certificate(inst: MarketInstance, x: Allocation) -> None:
    result = improvement_value(inst, x)
    before = utility_profile(inst, x).values
    after = utility_profile(inst, result.witness).values

    assert result.value >= 0
    assert sum(result.gains, ZERO) == result.value
    assert all(b - a >= gain for a, b, gain in zip(before, after, result.gains))

    if result.value:
        assert pareto_dominates(inst, result.witness, x) is not None


@pytest.mark.slow
@settings(max_examples=200, deadline=None)
@given(
    small_utility_instances,
    mixtures(),
    mixtures(),
    st.sampled_from([Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)]),
)
def test_improvement_value_is_concave(
    inst: MarketInstance, x: Allocation, y: Allocation, weight: Fraction
) -> None:
    mixed = improvement_value(inst, x.mix(weight, y)).value
    chord = weight * improvement_value(inst, x).value + (1 - weight) * improvement_value(inst, y).value

    assert mixed >= chord


def scale_entity(inst: MarketInstance, entity: int, factor: Fraction) -> MarketInstance:
    agents = [list(row) for row in inst.agent_utilities]
    jobs = [list(row) for row in inst.job_utilities]
    rows, index = (agents, entity) if entity < inst.size else (jobs, entity - inst.size)
    rows[index] = [factor * v for v in rows[index]]

    return MarketInstance.asymmetric(agents, jobs)


@pytest.mark.slow
@settings(max_examples=100, deadline=None)
@given(
    small_utility_instances,
    mixtures(),
    st.integers(0, 5),
    st.fractions(min_value=Fraction(1, 4), max_value=4, max_denominator=4),
)
def test_verdicts_survive_scaling_one_entity(
    inst: MarketInstance, x: Allocation, entity: int, factor: Fraction
) -> None:
    moved = scale_entity(inst, entity, factor)

    assert bool(envy_pairs(moved, x)) == bool(envy_pairs(inst, x))
    assert is_pareto_optimal(moved, x)[0] == is_pareto_optimal(inst, x)[0]
    assert polytopes_equal(ef_constraints(moved), ef_constraints(inst))


def test_improvement_value_scales_with_utilities(thm1: tuple[MarketInstance, Allocation]) -> None:
    inst, _ = thm1
    x = uniform_allocation(inst)

    assert improvement_value(scaled(inst, 3), x).value == 3 * improvement_value(inst, x).value


def test_one_sided_uniform_allocation_is_pareto_optimal() -> None:
    inst = MarketInstance.asymmetric([[1, 0, 0]] * 3, [[0, 0, 0]] * 3)
    optimal, result = is_pareto_optimal(inst, uniform_allocation(inst))

    assert optimal
    assert result.value == 0


@pytest.mark.parametrize("name", ["x_1_4", "x_2_4", "x_2_5", "x_2_6"])
def test_thm2_forced_coordinates(thm2: tuple[MarketInstance, Allocation], name: str) -> None:
    r = forced_value(thm2[0], name)

    assert r.forced
    assert r.min == third


@pytest.mark.parametrize("fixture", ["thm1", "thm2"])
def test_first_agent_is_capped_when_envy_free(fixture: str, request: pytest.FixtureRequest) -> None:
    inst, y = request.getfixturevalue(fixture)
    r = forced_value(inst, "u_1", workers=2)

    assert r.max == third
    assert utility_profile(inst, y)[0] == 2 * third


def test_forced_values_survive_scaling(thm1: tuple[MarketInstance, Allocation]) -> None:
    inst, _ = thm1

    assert forced_value(scaled(inst, 5), "x_2_4") == forced_value(inst, "x_2_4")


def test_coordinates_can_be_free(thm1: tuple[MarketInstance, Allocation]) -> None:
    r = forced_value(thm1[0], "x_3_6")

    assert not r.forced
    assert r.min < r.max


@pytest.mark.parametrize("text", ["u_7", "u_0", "x_4_1_2", "y"])
def test_parse_functional_rejects(thm1: tuple[MarketInstance, Allocation], text: str) -> None:
    with pytest.raises(ParseError, match="functional"):
        parse_functional(thm1[0], text)


@pytest.mark.parametrize("fixture", ["thm1", "thm2"])
def test_reference_allocations_are_pareto_optimal(fixture: str, request: pytest.FixtureRequest) -> None:
    inst, y = request.getfixturevalue(fixture)
    optimal, result = is_pareto_optimal(inst, y)

    assert optimal
    assert result.value == 0
    assert pareto_dominates(inst, result.witness, y) is None


def test_constraint_caches_are_bounded() -> None:
    for k in range(CACHE_SIZE + 10):
        ef_constraints(MarketInstance.symmetric([[k, 0], [0, 1]]))

    info = ef_constraints.cache_info()

    assert info.maxsize == CACHE_SIZE
    assert info.currsize <= CACHE_SIZE
