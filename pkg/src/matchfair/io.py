"""JSON files for instances and allocations.

Instances::

    {"mode": "two_sided_asymmetric", "n": 3,
     "agent_utilities": [["1", "0", "0"], ...], "job_utilities": [...]}
    {"mode": "two_sided_symmetric", "n": 3, "weights": [...]}
    {"mode": "non_bipartite", "m": 6, "edges": [{"a": 1, "b": 4, "w": "1"}, ...]}

Allocations::

    {"n": 3, "x": [["1/3", "1/3", "1/3"], ...]}
    {"m": 6, "edges": [{"a": 1, "b": 4, "x": "1/3"}, ...]}

Rationals are strings ``"p/q"`` or ``"p"``; entity numbers in edge lists are
external labels starting at 1.  An optional ``"provenance"`` object of
strings records how an instance was generated.
"""

from __future__ import annotations

import hashlib
import json
import typing as t
from collections.abc import Mapping, Sequence
from pathlib import Path

from matchfair.errors import ParseError
from matchfair.exactmath import ONE, ZERO, Rat, format_rat, parse_rat
from matchfair.market import Allocation, Edge, MarketInstance, Mode, check_allocation

__all__ = [
    "allocation_from_json",
    "allocation_to_json",
    "dumps",
    "instance_from_json",
    "instance_hash",
    "instance_to_json",
    "load_allocation",
    "load_instance",
    "read_json",
]


def _rat(value: t.Any, location: str) -> Rat:
    try:
        return parse_rat(value)
    except ParseError as e:
        raise ParseError(str(e), location) from e


def _nonnegative(value: t.Any, location: str) -> Rat:
    if (rat := _rat(value, location)) < 0:
        msg = f"negative value {format_rat(rat)}"
        raise ParseError(msg, location)

    return rat


def _field(data: Mapping[str, t.Any], key: str, location: str) -> t.Any:
    if not isinstance(data, Mapping) or key not in data:
        msg = f"missing field {key!r}"
        raise ParseError(msg, location)

    return data[key]


def _size(data: Mapping[str, t.Any], key: str, location: str) -> int:
    value = _field(data, key, location)

    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        msg = f"{key!r} must be a positive integer, not {value!r}"
        raise ParseError(msg, location)

    return value


def _table(data: Mapping[str, t.Any], key: str, n: int, location: str) -> list[list[Rat]]:
    rows = _field(data, key, location)

    if not isinstance(rows, list) or len(rows) != n:
        msg = f"{key!r} must be a list of {n} rows"
        raise ParseError(msg, location)

    table = []

    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            msg = f"row must have {n} entries"
            raise ParseError(msg, f"{location}.{key}[{i}]")

        table.append([_nonnegative(v, f"{location}.{key}[{i}][{j}]") for j, v in enumerate(row)])

    return table


def _edge_list(
    data: Mapping[str, t.Any], m: int, value_key: str, location: str
) -> dict[Edge, Rat]:
    items = _field(data, "edges", location)

    if not isinstance(items, list):
        msg = "'edges' must be a list"
        raise ParseError(msg, location)

    edges: dict[Edge, Rat] = {}

    for k, item in enumerate(items):
        where = f"{location}.edges[{k}]"
        a, b = (_field(item, key, where) for key in ("a", "b"))

        if not all(isinstance(v, int) and not isinstance(v, bool) and 1 <= v <= m for v in (a, b)):
            msg = f"edge endpoints must be vertex labels 1..{m}, got ({a!r}, {b!r})"
            raise ParseError(msg, where)

        if a == b:
            msg = f"self-loop at vertex {a}"
            raise ParseError(msg, where)

        edge = (min(a, b) - 1, max(a, b) - 1)

        if edge in edges:
            msg = f"edge ({a}, {b}) appears more than once"
            raise ParseError(msg, where)

        edges[edge] = _nonnegative(_field(item, value_key, where), f"{where}.{value_key}")

    return edges


def _provenance(data: Mapping[str, t.Any], location: str) -> tuple[tuple[str, str], ...]:
    provenance = data.get("provenance", {})

    if not isinstance(provenance, Mapping) or not all(
        isinstance(v, str) for v in provenance.values()
    ):
        msg = "'provenance' must be an object of strings"
        raise ParseError(msg, location)

    return tuple(provenance.items())


def instance_from_json(data: t.Any, location: str = "instance") -> MarketInstance:
    """Parse an instance document.

    Examples
    --------
    >>> inst = instance_from_json(
    ...     {"mode": "two_sided_symmetric", "n": 2, "weights": [["1", "0"], ["1/2", "2"]]}
    ... )
    >>> inst.mode, inst.weights[1]
    (<Mode.TWO_SIDED_SYMMETRIC: 'two_sided_symmetric'>, (Fraction(1, 2), Fraction(2, 1)))
    >>> instance_from_json({"mode": "two_sided_symmetric", "n": 1, "weights": [["-1/2"]]})
    Traceback (most recent call last):
    ...
    matchfair.errors.ParseError: instance.weights[0][0]: negative value -1/2
    >>> instance_from_json({"mode": "one_sided", "n": 1})
    Traceback (most recent call last):
    ...
    matchfair.errors.ParseError: instance.mode: unknown mode 'one_sided'
    """
    raw_mode = _field(data, "mode", location)

    try:
        mode = Mode(raw_mode)
    except ValueError as e:
        msg = f"unknown mode {raw_mode!r}"
        raise ParseError(msg, f"{location}.mode") from e

    provenance = _provenance(data, location)

    match mode:
        case Mode.TWO_SIDED_ASYMMETRIC:
            n = _size(data, "n", location)
            return MarketInstance.asymmetric(
                _table(data, "agent_utilities", n, location),
                _table(data, "job_utilities", n, location),
                provenance,
            )
        case Mode.TWO_SIDED_SYMMETRIC:
            n = _size(data, "n", location)
            return MarketInstance.symmetric(_table(data, "weights", n, location), provenance)
        case Mode.NON_BIPARTITE:
            m = _size(data, "m", location)

            if m % 2:
                msg = f"non-bipartite markets need an even number of vertices, got {m}"
                raise ParseError(msg, f"{location}.m")

            return MarketInstance.non_bipartite(m, _edge_list(data, m, "w", location), provenance)


def _strings(matrix: Sequence[Sequence[Rat]]) -> list[list[str]]:
    return [[format_rat(v) for v in row] for row in matrix]


def instance_to_json(inst: MarketInstance) -> dict[str, t.Any]:
    """Serialize an instance (inverse of ``instance_from_json``)."""
    data: dict[str, t.Any] = {"mode": str(inst.mode)}

    match inst.mode:
        case Mode.TWO_SIDED_ASYMMETRIC:
            data["n"] = inst.size
            data["agent_utilities"] = _strings(inst.agent_utilities)
            data["job_utilities"] = _strings(inst.job_utilities)
        case Mode.TWO_SIDED_SYMMETRIC:
            data["n"] = inst.size
            data["weights"] = _strings(inst.weights)
        case Mode.NON_BIPARTITE:
            data["m"] = inst.size
            data["edges"] = [
                {"a": a + 1, "b": b + 1, "w": format_rat(w)} for (a, b), w in inst.graph
            ]

    if inst.provenance:
        data["provenance"] = dict(inst.provenance)

    return data


def allocation_from_json(
    data: t.Any,
    inst: MarketInstance | None = None,
    location: str = "allocation",
) -> Allocation:
    """Parse an allocation document, checking it is a valid allocation.

    Matrix documents are checked to be doubly stochastic on their own; edge
    lists need the instance they belong to.

    Examples
    --------
    >>> allocation_from_json({"n": 2, "x": [["1/3", "2/3"], ["2/3", "1/3"]]}).values[1]
    Fraction(2, 3)
    >>> allocation_from_json({"n": 2, "x": [["1/3", "1/3"], ["2/3", "2/3"]]})
    Traceback (most recent call last):
    ...
    matchfair.errors.ParseError: allocation.x[0]: row 1 sums to 2/3, expected 1
    """
    if isinstance(data, Mapping) and "x" in data:
        n = _size(data, "n", location)
        rows = _table(data, "x", n, location)

        for i, row in enumerate(rows):
            if (total := sum(row, ZERO)) != ONE:
                msg = f"row {i + 1} sums to {format_rat(total)}, expected 1"
                raise ParseError(msg, f"{location}.x[{i}]")

        for j in range(n):
            if (total := sum((row[j] for row in rows), ZERO)) != ONE:
                msg = f"column {j + 1} sums to {format_rat(total)}, expected 1"
                raise ParseError(msg, f"{location}.x")

        x = Allocation.from_matrix(rows)
    else:
        if inst is None or inst.mode.bipartite:
            msg = "edge-list allocations need a non-bipartite instance"
            raise ParseError(msg, location)

        m = _size(data, "m", location)
        shares = _edge_list(data, m, "x", location)

        if unknown := sorted(set(shares) - set(inst.edges)):
            a, b = unknown[0]
            msg = f"edge ({a + 1}, {b + 1}) is not an edge of the instance"
            raise ParseError(msg, location)

        x = Allocation.for_instance(inst, [shares.get(edge, ZERO) for edge in inst.edges])

    if inst is not None:
        try:
            check_allocation(inst, x)
        except ValueError as e:
            raise ParseError(str(e), location) from e

    return x


def allocation_to_json(x: Allocation) -> dict[str, t.Any]:
    if x.bipartite:
        return {"n": x.size, "x": _strings(x.matrix)}

    return {
        "m": x.size,
        "edges": [
            {"a": a + 1, "b": b + 1, "x": format_rat(v)} for (a, b), v in zip(x.edges, x.values)
        ],
    }


def dumps(data: t.Any) -> str:
    """Canonical JSON text: sorted keys, no insignificant whitespace."""
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def instance_hash(inst: MarketInstance) -> str:
    """SHA-256 of the canonical instance JSON, provenance excluded.

    Examples
    --------
    >>> from matchfair.catalog import catalog
    >>> a = instance_hash(catalog("thm1")[0])
    >>> len(a), a == instance_hash(catalog("thm2")[0])
    (64, False)
    """
    data = instance_to_json(inst)
    data.pop("provenance", None)

    return hashlib.sha256(dumps(data).encode()).hexdigest()


def read_json(path: str | Path) -> t.Any:
    """Load a UTF-8 JSON file, reporting every failure as a ``ParseError``."""
    try:
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        msg = f"invalid JSON ({e.msg} at line {e.lineno})"
        raise ParseError(msg, str(path)) from e
    except UnicodeDecodeError as e:
        msg = f"not UTF-8 text (byte {e.start})"
        raise ParseError(msg, str(path)) from e
    except OSError as e:
        msg = f"cannot read file ({e.strerror})"
        raise ParseError(msg, str(path)) from e


def load_instance(path: str | Path) -> MarketInstance:
    return instance_from_json(read_json(path), str(path))


def load_allocation(path: str | Path, inst: MarketInstance | None = None) -> Allocation:
    return allocation_from_json(read_json(path), inst, str(path))
