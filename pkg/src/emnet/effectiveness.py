"""System capability aggregation and node-deletion criticality."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .cycles import CycleOptions, enumerate_cycles
from .network import Network, NodeNotFound, delete_node, id_key, opposing


class UndefinedBaseline(ValueError):
    """Criticality requested against a zero-capability baseline."""


@dataclass(frozen=True)
class RankOptions:
    protected_nodes: frozenset[str] = frozenset()
    target_weights: Mapping[str, float] | None = None
    normalize_weights: bool = True
    attacker: str = "A"

    def __post_init__(self) -> None:
        object.__setattr__(self, "protected_nodes", frozenset(self.protected_nodes))
        if self.attacker not in ("A", "B"):
            raise ValueError("attacker must be 'A' or 'B'")


@dataclass(frozen=True)
class CapabilityReport:
    per_target: dict[str, float]
    total: float
    cycle_counts: dict[str, int]
    weights: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class CriticalityRow:
    node: str
    capability_after_deletion: float
    crt: float  # percent
    rank: int
    label: str = ""


def _check_unit(values: Iterable[float]) -> list[float]:
    out = []
    for v in values:
        v = float(v)
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"capability {v!r} outside [0, 1]")
        out.append(v)
    return out


def target_capability(cycle_caps: Iterable[float]) -> float:
    """Parallel combination: 1 - prod(1 - c). No cycles gives 0."""
    caps = _check_unit(cycle_caps)
    return min(max(1.0 - math.prod(1.0 - c for c in caps), 0.0), 1.0)


def sos_capability(
    per_target: Mapping[str, float], weights: Mapping[str, float], normalize: bool = True
) -> float:
    if set(per_target) != set(weights):
        raise ValueError(
            f"weight keys {sorted(weights)} do not match targets {sorted(per_target)}"
        )
    _check_unit(per_target.values())
    if any(not w >= 0 for w in weights.values()):
        raise ValueError("target weights must be >= 0")
    keys = sorted(per_target, key=id_key)
    total_w = math.fsum(weights[k] for k in keys)
    if normalize:
        if total_w <= 0.0:
            return 0.0
        return min(math.fsum(weights[k] * per_target[k] for k in keys) / total_w, 1.0)
    return math.fsum(weights[k] * per_target[k] for k in keys)


def criticality(base: float, after: float) -> float:
    """Percentage capability loss when a node is removed; 0 if capability rises."""
    if not 0.0 < base <= 1.0:
        if base == 0.0:
            raise UndefinedBaseline("criticality is undefined for a zero baseline")
        raise ValueError(f"baseline {base!r} outside (0, 1]")
    if not 0.0 <= after <= 1.0:
        raise ValueError(f"capability {after!r} outside [0, 1]")
    if after > base:
        return 0.0
    return (base - after) / base * 100.0


def targets(network: Network, attacker: str = "A") -> list[str]:
    return network.side(opposing(attacker))


def target_weights(network: Network, opts: RankOptions, tgts: list[str]) -> dict[str, float]:
    if opts.target_weights is not None:
        missing = set(tgts) ^ set(opts.target_weights)
        if missing:
            raise ValueError(f"target_weights keys mismatch: {sorted(missing)}")
        return {t: float(opts.target_weights[t]) for t in tgts}
    weights = {t: network.platforms[t].target_weight for t in tgts}
    if all(w is None for w in weights.values()):
        return {t: 1.0 for t in tgts}
    return {t: (0.0 if w is None else float(w)) for t, w in weights.items()}


def evaluate(
    network: Network,
    cycle_opts: CycleOptions = CycleOptions(),
    rank_opts: RankOptions = RankOptions(),
    tgts: list[str] | None = None,
    weights: Mapping[str, float] | None = None,
) -> CapabilityReport:
    """Capability of the attacking side against every opposing target."""
    if tgts is None:
        tgts = targets(network, rank_opts.attacker)
    if weights is None:
        weights = target_weights(network, rank_opts, tgts)
    per_target, counts = {}, {}
    for t in tgts:
        if t not in network:
            per_target[t], counts[t] = 0.0, 0
            continue
        cycles = enumerate_cycles(network, t, cycle_opts, rank_opts.attacker)
        per_target[t] = target_capability(c.capability for c in cycles)
        counts[t] = len(cycles)
    total = sos_capability(per_target, weights, rank_opts.normalize_weights)
    return CapabilityReport(per_target, total, counts, dict(weights))


def thread_count() -> int:
    raw = os.environ.get("EMNET_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"EMNET_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError("EMNET_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


def deletion_candidates(network: Network, rank_opts: RankOptions) -> list[str]:
    for node in rank_opts.protected_nodes:
        if node not in network:
            raise NodeNotFound(node)
    return [n for n in network.side(rank_opts.attacker) if n not in rank_opts.protected_nodes]


def deletion_reports(
    network: Network,
    cycle_opts: CycleOptions = CycleOptions(),
    rank_opts: RankOptions = RankOptions(),
    threads: int | None = None,
) -> tuple[CapabilityReport, dict[str, CapabilityReport]]:
    """Baseline report plus one report per deletable node (n + 1 evaluations)."""
    tgts = targets(network, rank_opts.attacker)
    if not tgts:
        raise ValueError("network has no targets on the opposing side")
    weights = target_weights(network, rank_opts, tgts)
    base = evaluate(network, cycle_opts, rank_opts, tgts, weights)
    nodes = deletion_candidates(network, rank_opts)

    def one(node: str) -> CapabilityReport:
        return evaluate(delete_node(network, node), cycle_opts, rank_opts, tgts, weights)

    n = thread_count() if threads is None else threads
    if n <= 1 or len(nodes) <= 1:
        after = [one(x) for x in nodes]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            after = list(pool.map(one, nodes))
    return base, dict(zip(nodes, after))


def rank_rows(base: CapabilityReport, after: Mapping[str, CapabilityReport], network: Network) -> list[CriticalityRow]:
    scored = [
        (node, rep.total, criticality(base.total, rep.total) if base.total > 0 else 0.0)
        for node, rep in after.items()
    ]
    scored.sort(key=lambda r: (-r[2], id_key(r[0])))
    return [
        CriticalityRow(node, cap, crt, i + 1, network.platforms[node].label)
        for i, (node, cap, crt) in enumerate(scored)
    ]


def rank_nodes(
    network: Network,
    cycle_opts: CycleOptions = CycleOptions(),
    rank_opts: RankOptions = RankOptions(),
    threads: int | None = None,
) -> list[CriticalityRow]:
    """Criticality of every deletable attacking-side platform, most critical first.

    Ties in CRT are broken by ascending (natural) platform id. A zero baseline
    makes every CRT undefined; rows then report 0.
    """
    base, after = deletion_reports(network, cycle_opts, rank_opts, threads)
    return rank_rows(base, after, network)
