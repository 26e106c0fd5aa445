"""Enumeration and scoring of OODA combat cycles.

A cycle against target ``t`` walks ``t -> s`` (detection), a simple
communication path ``s -> ... -> i`` among friendly platforms, and closes with
the interference edge ``i -> t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

from .network import Edge, EdgeKind, Network, NodeNotFound, id_key


@dataclass(frozen=True)
class CycleOptions:
    max_cycle_edges: int = 8
    penalty_gamma: float = 0.95
    require_decider_on_final_hop: bool = True

    def __post_init__(self) -> None:
        if isinstance(self.max_cycle_edges, bool) or int(self.max_cycle_edges) != self.max_cycle_edges:
            raise ValueError("max_cycle_edges must be an integer")
        object.__setattr__(self, "max_cycle_edges", int(self.max_cycle_edges))
        if self.max_cycle_edges < 2:
            raise ValueError("max_cycle_edges must be >= 2")
        if not 0.0 < self.penalty_gamma <= 1.0:
            raise ValueError("penalty_gamma must lie in (0, 1]")


@dataclass(frozen=True)
class CombatCycle:
    target: str
    sensor: str
    comm_path: tuple[str, ...]  # platforms after the sensor, ending at the jammer
    jammer: str
    edges: tuple[Edge, ...]
    capability: float

    @property
    def nodes(self) -> tuple[str, ...]:
        """Node sequence ``(t, s, ..., i)``; the walk closes back on ``t``."""
        return (self.target, self.sensor, *self.comm_path)

    def __len__(self) -> int:
        return len(self.edges)


def cycle_capability(edge_caps, opts: CycleOptions = CycleOptions()) -> float:
    """Product of edge capabilities, each discounted by ``penalty_gamma``.

    Accepts a :class:`CombatCycle` or a plain sequence of capabilities.
    """
    if isinstance(edge_caps, CombatCycle):
        edge_caps = [e.capability for e in edge_caps.edges]
    caps = list(edge_caps)
    return min(max(math.prod(caps) * opts.penalty_gamma ** len(caps), 0.0), 1.0)


def _pattern_ok(path: list[str], network: Network, opts: CycleOptions) -> bool:
    plats = network.platforms
    if not any(plats[n].has("D") for n in path):
        return False
    if opts.require_decider_on_final_hop:
        # with no hops the sensor is the jammer and must decide for itself
        sender = path[-2] if len(path) > 1 else path[0]
        return plats[sender].has("D")
    return True


def _walks(network: Network, target: str, opts: CycleOptions) -> Iterator[list[str]]:
    max_hops = opts.max_cycle_edges - 2
    closers = network.in_edges(target, EdgeKind.INTERFERENCE)
    if not closers:
        return
    for sensor in network.out_edges(target, EdgeKind.DETECTION):
        path = [sensor]
        on_path = {target, sensor}

        def extend() -> Iterator[list[str]]:
            node = path[-1]
            if node in closers and _pattern_ok(path, network, opts):
                yield list(path)
            if len(path) - 1 >= max_hops:
                return
            for nxt in network.out_edges(node, EdgeKind.COMMUNICATION):
                if nxt in on_path:
                    continue
                path.append(nxt)
                on_path.add(nxt)
                yield from extend()
                path.pop()
                on_path.discard(nxt)

        yield from extend()


def _cycle(network: Network, target: str, path: list[str], opts: CycleOptions) -> CombatCycle:
    edges = [network.edge(target, path[0], EdgeKind.DETECTION)]
    edges += [network.edge(a, b, EdgeKind.COMMUNICATION) for a, b in zip(path, path[1:])]
    edges.append(network.edge(path[-1], target, EdgeKind.INTERFERENCE))
    return CombatCycle(
        target=target,
        sensor=path[0],
        comm_path=tuple(path[1:]),
        jammer=path[-1],
        edges=tuple(edges),
        capability=cycle_capability([e.capability for e in edges], opts),
    )


def enumerate_cycles(
    network: Network,
    target: str,
    opts: CycleOptions = CycleOptions(),
    attacker: str = "A",
) -> list[CombatCycle]:
    """All combat cycles by side ``attacker`` closing on ``target``.

    Sorted by node sequence (natural id order). Raises ``ValueError`` when
    ``target`` belongs to the attacking side.
    """
    _check_target(network, target, attacker)
    cycles = [_cycle(network, target, path, opts) for path in _walks(network, target, opts)]
    cycles.sort(key=lambda c: tuple(id_key(n) for n in c.nodes))
    return cycles


def _check_target(network: Network, target: str, attacker: str) -> None:
    if target not in network:
        raise NodeNotFound(target)
    if network.platforms[target].side == attacker:
        raise ValueError(f"{target!r} is on the attacking side {attacker!r}")


def count_cycles(
    network: Network, target: str, opts: CycleOptions = CycleOptions(), attacker: str = "A"
) -> int:
    _check_target(network, target, attacker)
    return sum(1 for _ in _walks(network, target, opts))
