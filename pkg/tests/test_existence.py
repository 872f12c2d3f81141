import json
from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matchfair.catalog import catalog
from matchfair.errors import CapExceededError, ParseError
from matchfair.existence import (
    Exists,
    NotExists,
    NotExistsDominated,
    VerdictKind,
    decide_poef,
    find_domination_certificate,
    functional_is_forced_on_grid,
    grid_oracle,
    search_poef,
    verdict_from_json,
    verdict_to_json,
    verify_certificate,
)
from matchfair.fairness import Sides, improvement_value, is_envy_free, parse_functional
from matchfair.market import (
    Allocation,
    MarketInstance,
    Mode,
    gen_random,
    permute,
    uniform_allocation,
)

third = Fraction(1, 3)


@pytest.fixture(scope="module")
def thm1_verdict(thm1: tuple[MarketInstance, Allocation]) -> NotExists:
    verdict = decide_poef(thm1[0])
    assert isinstance(verdict, NotExists)

    return verdict


@pytest.fixture(scope="module")
def one_sided() -> MarketInstance:
    return MarketInstance.asymmetric([[1, 0, 0]] * 3, [[0, 0, 0]] * 3)


def test_thm1_has_no_pareto_optimal_envy_free_allocation(
    thm1: tuple[MarketInstance, Allocation], thm1_verdict: NotExists
) -> None:
    inst, _ = thm1

    assert thm1_verdict.kind is VerdictKind.NOT_EXISTS
    assert all(v.improvement.value > 0 for v in thm1_verdict.vertices)
    assert all(is_envy_free(inst, v.point) for v in thm1_verdict.vertices)
    assert verify_certificate(inst, thm1_verdict)


def test_thm2_has_no_pareto_optimal_envy_free_allocation(thm2: tuple[MarketInstance, Allocation]) -> None:
    inst, _ = thm2
    verdict = decide_poef(inst, workers=2)

    assert isinstance(verdict, NotExists)
    assert verify_certificate(inst, verdict)


@pytest.mark.slow
def test_non_bipartite_copy_has_no_pareto_optimal_envy_free_allocation(
    cor1: tuple[MarketInstance, Allocation],
) -> None:
    inst, _ = cor1
    verdict = decide_poef(inst)

    assert isinstance(verdict, NotExists)
    assert verify_certificate(inst, verdict)


def test_one_sided_market_has_one(one_sided: MarketInstance) -> None:
    verdict = decide_poef(one_sided)

    assert isinstance(verdict, Exists)
    assert verdict.improvement.value == 0
    assert is_envy_free(one_sided, verdict.allocation)
    assert verify_certificate(one_sided, verdict)


def test_ignoring_one_side_changes_the_answer(thm1: tuple[MarketInstance, Allocation]) -> None:
    inst, _ = thm1

    assert decide_poef(inst, sides=Sides.JOBS).kind is VerdictKind.EXISTS


@pytest.mark.parametrize("fixture", ["thm1", "thm2"])
def test_reference_allocation_dominates_every_envy_free_allocation(
    fixture: str, request: pytest.FixtureRequest
) -> None:
    inst, y = request.getfixturevalue(fixture)
    certificate = find_domination_certificate(inst, y)

    assert isinstance(certificate, NotExistsDominated)
    assert certificate.strict_entity == 0
    assert certificate.gap == third
    assert all(m >= 0 for m in certificate.minima)
    assert verify_certificate(inst, certificate)


def test_envy_free_allocations_do_not_dominate(thm2: tuple[MarketInstance, Allocation]) -> None:
    inst, _ = thm2

    assert find_domination_certificate(inst, uniform_allocation(inst)) is None


def test_grid_agrees_with_the_vertex_scan(
    thm1: tuple[MarketInstance, Allocation], thm1_verdict: NotExists
) -> None:
    inst, _ = thm1
    report = grid_oracle(inst, 3)

    assert report.total == 55
    assert report.ef_count > 0
    assert report.poef_count == 0
    assert functional_is_forced_on_grid(report, parse_functional(inst, "x_2_4"), third)
    assert not functional_is_forced_on_grid(report, parse_functional(inst, "x_3_6"), third)

    lowest = min(v.improvement.value for v in thm1_verdict.vertices)

    assert all(p.improvement >= lowest for p in report.points if p.envy_free)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(1, 5), min_size=1, max_size=12))
def test_vertex_minimum_bounds_convex_combinations(
    thm1: tuple[MarketInstance, Allocation], thm1_verdict: NotExists, weights: list[int]
) -> None:
    inst, _ = thm1
    vertices = thm1_verdict.vertices
    point, total = vertices[0].point, weights[0]

    for vertex, w in zip(vertices[1:], weights[1:]):
        point = point.mix(Fraction(total, total + w), vertex.point)
        total += w

    lowest = min(v.improvement.value for v in vertices)

    assert is_envy_free(inst, point)
    assert improvement_value(inst, point).value >= lowest


def test_grid_frame(thm1: tuple[MarketInstance, Allocation]) -> None:
    report = grid_oracle(thm1[0], 2)
    df = report.to_frame()

    assert df.height == report.total
    assert df.columns[-3:] == ["envy_free", "pareto_optimal", "improvement"]
    assert df["envy_free"].sum() == report.ef_count


def test_thm2_grid_agrees_with_the_vertex_scan(thm2: tuple[MarketInstance, Allocation]) -> None:
    inst, _ = thm2
    report = grid_oracle(inst, 3)

    assert report.total == 55
    assert report.ef_count > 0
    assert report.poef_count == 0
    assert functional_is_forced_on_grid(report, parse_functional(inst, "x_2_4"), third)
    assert decide_poef(inst).kind is VerdictKind.NOT_EXISTS


def test_grid_caps(thm1: tuple[MarketInstance, Allocation], cor1: tuple[MarketInstance, Allocation]) -> None:
    with pytest.raises(CapExceededError, match="denominator"):
        grid_oracle(thm1[0], 7)

    with pytest.raises(CapExceededError):
        grid_oracle(cor1[0], 2)

    with pytest.raises(CapExceededError):
        grid_oracle(MarketInstance.symmetric([[0] * 4] * 4), 1)


def test_existence_caps() -> None:
    with pytest.raises(CapExceededError, match="n = 4"):
        decide_poef(MarketInstance.symmetric([[0] * 5] * 5))


def test_tampered_certificates_fail(
    thm1: tuple[MarketInstance, Allocation], thm1_verdict: NotExists, one_sided: MarketInstance
) -> None:
    inst, y = thm1

    dropped = replace(thm1_verdict, vertices=thm1_verdict.vertices[1:])
    assert verify_certificate(inst, dropped).reason == "vertex list differs from a fresh enumeration"

    exists = decide_poef(one_sided)
    assert isinstance(exists, Exists)
    envious = replace(exists, allocation=Allocation.from_matrix([[1, 0, 0], [0, 1, 0], [0, 0, 1]]))
    assert "envies" in verify_certificate(one_sided, envious).reason

    certificate = find_domination_certificate(inst, y)
    assert certificate is not None
    shifted = replace(certificate, minima=(certificate.minima[0] + 1, *certificate.minima[1:]))
    assert "mismatch" in verify_certificate(inst, shifted).reason


def test_certificates_round_trip_through_json(
    thm1: tuple[MarketInstance, Allocation], thm1_verdict: NotExists, one_sided: MarketInstance
) -> None:
    inst, _ = thm1
    document = json.loads(json.dumps(verdict_to_json(inst, thm1_verdict)))

    assert document["verdict"] == "not_exists"
    assert document["method"] == "vertex-scan"
    assert verdict_from_json(inst, document) == thm1_verdict

    exists = decide_poef(one_sided)
    assert verdict_from_json(one_sided, json.loads(json.dumps(verdict_to_json(one_sided, exists)))) == exists


def test_certificates_are_bound_to_their_instance(
    thm1: tuple[MarketInstance, Allocation],
    thm2: tuple[MarketInstance, Allocation],
    thm1_verdict: NotExists,
) -> None:
    document = verdict_to_json(thm1[0], thm1_verdict)

    with pytest.raises(ParseError, match="different instance"):
        verdict_from_json(thm2[0], document)

    with pytest.raises(ParseError, match="malformed certificate"):
        verdict_from_json(thm1[0], {"verdict": "not_exists"})


def test_search_is_seeded(one_sided: MarketInstance) -> None:
    a = search_poef(one_sided, trials=10, seed=3)
    b = search_poef(one_sided, trials=10, seed=3)

    assert a == b
    assert a.allocation is not None
    assert a.trials <= 10


@pytest.mark.slow
@settings(max_examples=10, deadline=None)
@given(st.permutations(range(3)), st.permutations(range(3)))
def test_verdict_survives_relabeling(agents: list[int], jobs: list[int]) -> None:
    inst, _ = catalog("thm1")

    assert decide_poef(permute(inst, agents, jobs)).kind is VerdictKind.NOT_EXISTS


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(100))
def test_one_sided_dichotomous_markets_have_one(seed: int) -> None:
    agents = gen_random(Mode.TWO_SIDED_ASYMMETRIC, 3, [0, 1], seed).agent_utilities
    inst = MarketInstance.asymmetric(agents, [[0] * 3] * 3)
    verdict = decide_poef(inst)

    assert isinstance(verdict, Exists)
    assert verify_certificate(inst, verdict)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(100))
def test_symmetric_dichotomous_markets_have_one(seed: int) -> None:
    inst = gen_random(Mode.TWO_SIDED_SYMMETRIC, 3, [0, 1], seed)
    verdict = decide_poef(inst)

    assert isinstance(verdict, Exists)
    assert verify_certificate(inst, verdict)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(5))
def test_non_bipartite_dichotomous_markets_have_one(seed: int) -> None:
    inst = gen_random(Mode.NON_BIPARTITE, 4, [0, 1], seed)

    assert decide_poef(inst).kind is VerdictKind.EXISTS
