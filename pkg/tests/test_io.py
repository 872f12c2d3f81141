import json
from pathlib import Path

import pytest

from matchfair.catalog import CATALOG_NAMES, catalog
from matchfair.errors import ParseError
from matchfair.io import (
    allocation_from_json,
    allocation_to_json,
    instance_from_json,
    instance_hash,
    instance_to_json,
    load_allocation,
    load_instance,
)
from matchfair.market import MarketInstance, gen_random


@pytest.mark.parametrize("name", CATALOG_NAMES)
def test_catalog_documents_parse_back(name: str) -> None:
    inst, y = catalog(name)

    assert instance_from_json(instance_to_json(inst)) == inst
    assert allocation_from_json(allocation_to_json(y), inst) == y


def test_generated_instances_keep_provenance() -> None:
    inst = gen_random("two_sided_asymmetric", 2, ["0", "1"], seed=5)
    data = instance_to_json(inst)

    assert data["provenance"]["seed"] == "5"
    assert instance_from_json(json.loads(json.dumps(data))) == inst


def test_hash_ignores_provenance() -> None:
    inst = gen_random("two_sided_symmetric", 2, ["0", "1"], seed=5)
    bare = MarketInstance.symmetric(inst.weights)

    assert instance_hash(inst) == instance_hash(bare)
    assert instance_hash(MarketInstance.symmetric([[2, 0], [0, 2]])) != instance_hash(
        MarketInstance.symmetric([[0, 2], [2, 0]])
    )


def test_errors_carry_their_location() -> None:
    doc = {
        "mode": "two_sided_asymmetric",
        "n": 2,
        "agent_utilities": [["1", "0"], ["0", "1"]],
        "job_utilities": [["1", "0"], ["0", "0.5"]],
    }

    with pytest.raises(ParseError, match=r"instance\.job_utilities\[1\]\[1\]") as info:
        instance_from_json(doc)

    assert info.value.location == "instance.job_utilities[1][1]"

    with pytest.raises(ParseError, match="missing field 'n'"):
        instance_from_json({"mode": "two_sided_symmetric", "weights": []})

    with pytest.raises(ParseError, match="even number of vertices"):
        instance_from_json({"mode": "non_bipartite", "m": 3, "edges": []})


def test_column_sums_are_checked() -> None:
    with pytest.raises(ParseError, match="column 1 sums to 2"):
        allocation_from_json({"n": 2, "x": [["1", "0"], ["1", "0"]]})


def test_edge_list_allocations() -> None:
    inst = MarketInstance.non_bipartite(4, {(0, 1): 1, (2, 3): 1, (0, 2): 0, (1, 3): 0})
    doc = {"m": 4, "edges": [{"a": 1, "b": 2, "x": "1"}, {"a": 3, "b": 4, "x": "1"}]}
    x = allocation_from_json(doc, inst)

    assert x.share(0, 1) == 1
    assert x.share(0, 2) == 0

    with pytest.raises(ParseError, match="non-bipartite instance"):
        allocation_from_json(doc)

    unknown = {"m": 4, "edges": [{"a": 1, "b": 4, "x": "1"}]}

    with pytest.raises(ParseError, match=r"edge \(1, 4\) is not an edge"):
        allocation_from_json(unknown, inst)

    short = {"m": 4, "edges": [{"a": 1, "b": 2, "x": "1"}]}

    with pytest.raises(ParseError, match=r"degree\(3\)"):
        allocation_from_json(short, inst)


def test_files(tmp_path: Path) -> None:
    inst, y = catalog("thm1")
    instance_path = tmp_path / "instance.json"
    allocation_path = tmp_path / "y.json"
    instance_path.write_text(json.dumps(instance_to_json(inst)))
    allocation_path.write_text(json.dumps(allocation_to_json(y)))

    assert load_instance(instance_path) == inst
    assert load_allocation(allocation_path, inst) == y

    broken = tmp_path / "broken.json"
    broken.write_text('{"mode": ')

    with pytest.raises(ParseError, match="invalid JSON") as info:
        load_instance(broken)

    assert info.value.location == str(broken)


def test_unreadable_files_are_parse_errors(tmp_path: Path) -> None:
    latin = tmp_path / "latin.json"
    latin.write_bytes(b'{"mode": "caf\xe9"}')

    with pytest.raises(ParseError, match="not UTF-8") as info:
        load_instance(latin)

    assert info.value.location == str(latin)

    with pytest.raises(ParseError, match="cannot read file"):
        load_instance(tmp_path / "missing.json")

    with pytest.raises(ParseError, match="cannot read file"):
        load_instance(tmp_path)


def test_unknown_catalog_names_are_rejected() -> None:
    with pytest.raises(KeyError, match="unknown catalog instance 'thm9'"):
        catalog("thm9")
