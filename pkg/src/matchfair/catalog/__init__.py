"""Embedded market instances.

Each entry is a module in this package defining:

``INSTANCE``
    the ``MarketInstance``;
``LABELS``
    labeled edge shares of the reference allocation ``y`` (0-based entity
    pairs), completed with ``complete_allocation``;
``FORCED``
    functionals whose value is pinned over the envy-free polytope, mapped to
    that value;
``EXPECTED``
    the expected ``decide_poef`` verdict kind, or ``None`` when no verdict
    is claimed.
"""

import typing as t
from dataclasses import dataclass
from functools import cache

from matchfair.exactmath import Rat
from matchfair.market import Allocation, Edge, MarketInstance, complete_allocation

__all__ = [
    "CATALOG_NAMES",
    "CatalogEntry",
    "catalog",
    "catalog_entry",
]

CATALOG_NAMES: t.Final = ("thm1", "thm2", "cor1", "cor1_complete", "one_sided")


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    instance: MarketInstance
    labels: tuple[tuple[Edge, Rat], ...]
    y: Allocation
    forced: tuple[tuple[str, Rat], ...]
    expected: str | None
    description: str


@cache
def catalog_entry(name: str) -> CatalogEntry:
    """Load a catalog entry by name.

    Names outside ``CATALOG_NAMES`` raise ``KeyError``.  The CLI narrows
    names with a literal type before calling, so this check serves library
    callers.

    Examples
    --------
    >>> entry = catalog_entry("thm1")
    >>> entry.expected, dict(entry.forced)["x_2_4"]
    ('not_exists', Fraction(1, 3))
    >>> catalog_entry("thm3")
    Traceback (most recent call last):
    ...
    KeyError: "unknown catalog instance 'thm3' (choose from thm1, thm2, cor1, cor1_complete, one_sided)"
    """
    from importlib import import_module

    if name not in CATALOG_NAMES:
        msg = f"unknown catalog instance {name!r} (choose from {', '.join(CATALOG_NAMES)})"
        raise KeyError(msg)

    module = import_module(f"matchfair.catalog.{name}")
    instance: MarketInstance = module.INSTANCE
    labels: dict[Edge, Rat] = module.LABELS

    return CatalogEntry(
        name,
        instance,
        tuple(sorted(labels.items())),
        complete_allocation(instance, labels),
        tuple(module.FORCED.items()),
        module.EXPECTED,
        (module.__doc__ or "").strip(),
    )


def catalog(name: str) -> tuple[MarketInstance, Allocation]:
    """Return a catalog instance with its completed reference allocation.

    Examples
    --------
    >>> inst, y = catalog("thm1")
    >>> inst.agent_utilities[0]
    (Fraction(1, 1), Fraction(0, 1), Fraction(0, 1))
    >>> [str(v) for v in y.matrix[2]]
    ['0', '1/3', '2/3']
    """
    entry = catalog_entry(name)

    return entry.instance, entry.y
