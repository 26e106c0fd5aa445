"""Combat system-of-systems modeling in electromagnetic space.

Builds a directed weighted relation graph from radar, communication and
jamming link budgets, scores OODA combat cycles, and ranks platforms by the
capability lost when each is removed.
"""

from .baselines import CentralityTable, comm_graph, compare
from .cycles import CombatCycle, CycleOptions, cycle_capability, enumerate_cycles
from .effectiveness import (
    CapabilityReport,
    CriticalityRow,
    RankOptions,
    criticality,
    evaluate,
    rank_nodes,
    sos_capability,
    target_capability,
)
from .network import (
    BuildOptions,
    Edge,
    EdgeKind,
    Network,
    Platform,
    Scenario,
    ScenarioError,
    build_network,
    delete_node,
    interference_capability,
    load_scenario,
    load_scenario_file,
)
from .physics import BerModel, CommParams, JammerParams, RadarParams

__version__ = "0.1.0"

__all__ = [
    "BerModel", "BuildOptions", "CapabilityReport", "CentralityTable", "CombatCycle",
    "CommParams", "CriticalityRow", "CycleOptions", "Edge", "EdgeKind", "JammerParams",
    "Network", "Platform", "RadarParams", "RankOptions", "Scenario", "ScenarioError",
    "build_network", "comm_graph", "compare", "criticality", "cycle_capability",
    "delete_node", "enumerate_cycles", "evaluate", "interference_capability",
    "load_scenario", "load_scenario_file", "rank_nodes", "sos_capability",
    "target_capability",
]
