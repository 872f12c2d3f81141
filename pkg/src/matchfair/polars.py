"""Tabular views of allocations, profiles and envy, as polars DataFrames.

Rationals are kept exact by rendering them as ``"p/q"`` strings.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence

import polars as pl

from matchfair.exactmath import format_rat
from matchfair.fairness import EnvyWitness
from matchfair.market import Allocation, MarketInstance, UtilityProfile


def allocation_frame(
    variables: Sequence[str],
    allocations: Sequence[Allocation],
    **columns: Sequence[object],
) -> pl.DataFrame:
    """One row per allocation, one string column per variable, then ``columns``.

    Examples
    --------
    >>> x = Allocation.from_matrix([[1, 0], [0, 1]])
    >>> df = allocation_frame(("x_1_3", "x_1_4", "x_2_3", "x_2_4"), [x], v=["0"])
    >>> df.columns, df.row(0)
    (['x_1_3', 'x_1_4', 'x_2_3', 'x_2_4', 'v'], ('1', '0', '0', '1', '0'))
    """
    data: dict[str, list[object]] = {
        name: [format_rat(x.values[j]) for x in allocations] for j, name in enumerate(variables)
    }
    data.update((name, list(values)) for name, values in columns.items())

    return pl.DataFrame(data, schema_overrides={name: pl.String for name in variables})


def profile_frame(inst: MarketInstance, profiles: Mapping[str, UtilityProfile]) -> pl.DataFrame:
    """One row per entity, one column of utilities per named profile.

    Examples
    --------
    >>> from matchfair.catalog import catalog
    >>> from matchfair.market import utility_profile
    >>> inst, y = catalog("thm1")
    >>> df = profile_frame(inst, {"y": utility_profile(inst, y)})
    >>> df.shape, df.row(0)
    ((6, 2), ('agent 1', '2/3'))
    """
    data: dict[str, list[str]] = {
        "entity": [inst.describe(e) for e in range(inst.entity_count)],
    }

    for name, profile in profiles.items():
        data[name] = [format_rat(v) for v in profile.values]

    return pl.DataFrame(data)


def envy_frame(inst: MarketInstance, witnesses: Sequence[EnvyWitness]) -> pl.DataFrame:
    return pl.DataFrame(
        {
            "observer": [inst.describe(w.observer) for w in witnesses],
            "envied": [inst.describe(w.envied) for w in witnesses],
            "own_value": [format_rat(w.own_value) for w in witnesses],
            "envied_value": [format_rat(w.envied_value) for w in witnesses],
        },
        schema={name: pl.String for name in ("observer", "envied", "own_value", "envied_value")},
    )


def render(df: pl.DataFrame) -> str:
    """Full-width text rendering without row or string truncation."""
    with pl.Config(tbl_rows=-1, tbl_cols=-1, fmt_str_lengths=80, tbl_width_chars=200):
        return str(df)
