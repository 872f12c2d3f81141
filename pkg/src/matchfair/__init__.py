import matchfair.existence as existence
import matchfair.fairness as fairness
import matchfair.market as market
from matchfair.catalog import CATALOG_NAMES, catalog
from matchfair.existence import (
    Exists,
    NotExists,
    NotExistsDominated,
    decide_poef,
    find_domination_certificate,
    grid_oracle,
    verify_certificate,
)
from matchfair.fairness import (
    Sides,
    ef_constraints,
    envy_pairs,
    forced_value,
    improvement_value,
    is_pareto_optimal,
    pareto_dominates,
)
from matchfair.io import instance_from_json, instance_hash, instance_to_json
from matchfair.market import Allocation, MarketInstance, Mode, utility_profile

__all__ = [
    # modules
    "existence",
    "fairness",
    "market",
    # types
    "Allocation",
    "Exists",
    "MarketInstance",
    "Mode",
    "NotExists",
    "NotExistsDominated",
    "Sides",
    # functions
    "catalog",
    "decide_poef",
    "ef_constraints",
    "envy_pairs",
    "find_domination_certificate",
    "forced_value",
    "grid_oracle",
    "improvement_value",
    "instance_from_json",
    "instance_hash",
    "instance_to_json",
    "is_pareto_optimal",
    "pareto_dominates",
    "utility_profile",
    "verify_certificate",
    # constants
    "CATALOG_NAMES",
]
