"""Scenario loading and construction of the weighted relation multigraph.

Edges are directed and typed:

* ``DETECTION`` runs target -> sensor (the order a combat cycle walks it);
  its capability is the sensor's detection probability on that target.
* ``COMMUNICATION`` runs transmitter -> receiver between same-side platforms.
* ``INTERFERENCE`` runs jammer -> opposing platform; its capability is the
  capability-weighted mean fraction of the victim's receive edges that the
  jammer destroys.

Detection and communication edges exist when their jam-free capability clears
the prune threshold. ``capability`` is the value seen in analysis: the jammed
value when adversary jamming is applied, otherwise the jam-free one.
"""

from __future__ import annotations

import enum
import json
import logging
import math
import re
from dataclasses import MISSING, dataclass, field, fields, replace
from pathlib import Path
from types import MappingProxyType
from typing import Any, Iterable, Mapping

from .physics import (
    DEFAULT_BER_MODEL,
    BerModel,
    CommParams,
    JammerParams,
    ModelValidationError,
    RadarParams,
    detection_probability,
    jammer_received_power,
    link_capability,
    radar_snr,
)

log = logging.getLogger(__name__)

FUNCTIONS = frozenset("SCDI")
SIDES = ("A", "B")


class ScenarioError(ValueError):
    """Raised when a scenario document violates the schema."""


class NodeNotFound(KeyError):
    pass


class EdgeKind(str, enum.Enum):
    DETECTION = "detection"
    COMMUNICATION = "communication"
    INTERFERENCE = "interference"


def id_key(node_id: str) -> tuple:
    """Natural sort key: numeric runs compare as integers ("2" < "10")."""
    return tuple(
        (0, int(tok), "") if tok.isdigit() else (1, 0, tok)
        for tok in re.findall(r"\d+|\D+", node_id)
    )


def opposing(side: str) -> str:
    return "B" if side == "A" else "A"


@dataclass(frozen=True)
class Platform:
    id: str
    side: str
    functions: frozenset[str]
    position: tuple[float, float, float]
    comm: CommParams
    rcs: float = 1.0
    label: str = ""
    radar: RadarParams | None = None
    jammer: JammerParams | None = None
    target_weight: float | None = None

    def __post_init__(self) -> None:
        if self.side not in SIDES:
            raise ScenarioError(f"side must be 'A' or 'B', got {self.side!r}")
        funcs = frozenset(self.functions) | {"C"}
        if not funcs <= FUNCTIONS:
            raise ScenarioError(f"unknown functions {sorted(funcs - FUNCTIONS)}")
        object.__setattr__(self, "functions", funcs)
        object.__setattr__(self, "position", tuple(float(v) for v in self.position))
        if "S" in funcs and self.radar is None:
            raise ScenarioError("radar: required for function S")
        if "I" in funcs and self.jammer is None:
            raise ScenarioError("jammer: required for function I")
        if not self.rcs > 0:
            raise ScenarioError("rcs: must be > 0")
        if self.target_weight is not None and not self.target_weight >= 0:
            raise ScenarioError("target_weight: must be >= 0")

    def has(self, function: str) -> bool:
        return function in self.functions


@dataclass(frozen=True)
class BuildOptions:
    detection_prune_threshold: float = 1e-3
    comm_prune_threshold: float = 1e-6
    apply_adversary_jamming: bool = True
    min_separation: float = 1.0
    # hold interference capabilities fixed when nodes are deleted
    static_interference: bool = False

    def __post_init__(self) -> None:
        for name in ("detection_prune_threshold", "comm_prune_threshold"):
            if not 0.0 <= getattr(self, name) < 1.0:
                raise ValueError(f"{name} must lie in [0, 1)")
        if not self.min_separation > 0:
            raise ValueError("min_separation must be > 0")


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    kind: EdgeKind
    capability: float
    pre_jamming_capability: float | None = None
    post_jamming_capability: float | None = None

    def __post_init__(self) -> None:
        if self.src == self.dst:
            raise ValueError(f"self-loop on {self.src!r}")
        if not 0.0 <= self.capability <= 1.0:
            raise ValueError(f"capability {self.capability!r} outside [0, 1]")

    @property
    def key(self) -> tuple[str, str, EdgeKind]:
        return self.src, self.dst, self.kind


@dataclass(frozen=True)
class Scenario:
    name: str
    platforms: tuple[Platform, ...]
    build_options: BuildOptions = BuildOptions()
    ber_models: Mapping[str, BerModel] = field(default_factory=dict)
    cycle_options: Mapping[str, Any] = field(default_factory=dict)
    rank_options: Mapping[str, Any] = field(default_factory=dict)


def weighted_degradation(pairs: Iterable[tuple[float, float]]) -> float:
    """Capability-weighted mean of per-edge degradation ratios.

    ``pairs`` holds ``(before, after)`` capabilities of the victim's edges.
    Each ratio is ``(before - after) / before`` clamped to [0, 1]; the weights
    are the ``before`` values. Zero total weight gives 0.
    """
    total = 0.0
    acc = 0.0
    for before, after in pairs:
        if before <= 0.0:
            continue
        delta = min(max((before - after) / before, 0.0), 1.0)
        acc += delta * before
        total += before
    if total <= 0.0:
        return 0.0
    return min(max(acc / total, 0.0), 1.0)


class Network:
    """Immutable directed multigraph of platforms and typed edges.

    ``interference_terms`` maps a jammer/victim pair to the ``(before,
    after)`` capabilities of each victim receive edge, keyed by that edge.
    Pairs with recorded terms are revalued by :func:`delete_node`.
    """

    def __init__(
        self,
        platforms: Iterable[Platform],
        edges: Iterable[Edge],
        interference_terms: Mapping[tuple[str, str], Mapping[tuple, tuple[float, float]]]
        | None = None,
        options: BuildOptions = BuildOptions(),
    ) -> None:
        plat = {}
        for p in platforms:
            if p.id in plat:
                raise ValueError(f"duplicate platform id {p.id!r}")
            plat[p.id] = p
        self.platforms: Mapping[str, Platform] = MappingProxyType(plat)
        self.options = options
        self._edges: dict[tuple[str, str, EdgeKind], Edge] = {}
        self._out: dict[EdgeKind, dict[str, dict[str, Edge]]] = {k: {} for k in EdgeKind}
        self._in: dict[EdgeKind, dict[str, dict[str, Edge]]] = {k: {} for k in EdgeKind}
        for e in edges:
            if e.src not in plat or e.dst not in plat:
                raise ValueError(f"edge {e.src}->{e.dst} references an unknown platform")
            if e.key in self._edges:
                raise ValueError(f"duplicate {e.kind.value} edge {e.src}->{e.dst}")
            self._edges[e.key] = e
            self._out[e.kind].setdefault(e.src, {})[e.dst] = e
            self._in[e.kind].setdefault(e.dst, {})[e.src] = e
        self.interference_terms = MappingProxyType(
            {k: MappingProxyType(dict(v)) for k, v in (interference_terms or {}).items()}
        )

    def __repr__(self) -> str:
        return f"Network({len(self.platforms)} platforms, {len(self._edges)} edges)"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Network):
            return NotImplemented
        return (
            dict(self.platforms) == dict(other.platforms)
            and self._edges == other._edges
            and {k: dict(v) for k, v in self.interference_terms.items()}
            == {k: dict(v) for k, v in other.interference_terms.items()}
        )

    @property
    def edges(self) -> list[Edge]:
        return list(self._edges.values())

    def edge(self, src: str, dst: str, kind: EdgeKind) -> Edge | None:
        return self._edges.get((src, dst, kind))

    def out_edges(self, node: str, kind: EdgeKind) -> Mapping[str, Edge]:
        return self._out[kind].get(node, {})

    def in_edges(self, node: str, kind: EdgeKind) -> Mapping[str, Edge]:
        return self._in[kind].get(node, {})

    def side(self, side: str) -> list[str]:
        return sorted((p.id for p in self.platforms.values() if p.side == side), key=id_key)

    def __contains__(self, node_id: object) -> bool:
        return node_id in self.platforms


# -- scenario loading -------------------------------------------------------


def _num(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{where}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ScenarioError(f"{where}: must be finite")
    return float(value)


def _build(cls: type, data: Any, where: str, extra: Mapping[str, Any] | None = None):
    if not isinstance(data, Mapping):
        raise ScenarioError(f"{where}: expected an object")
    known = {f.name for f in fields(cls)}
    kwargs: dict[str, Any] = {}
    for key, value in data.items():
        if extra and key in extra:
            continue
        if key not in known:
            raise ScenarioError(f"{where}.{key}: unknown field")
        kwargs[key] = _num(value, f"{where}.{key}")
    if extra:
        kwargs.update({k: v for k, v in extra.items() if v is not None})
    try:
        return cls(**kwargs)
    except TypeError as exc:
        missing = sorted(
            f.name
            for f in fields(cls)
            if f.name not in kwargs
            and f.default is MISSING
            and f.default_factory is MISSING
        )
        raise ScenarioError(f"{where}.{missing[0] if missing else '?'}: missing field") from exc
    except ValueError as exc:
        msg = str(exc)
        name = msg.split()[0] if msg else "?"
        raise ScenarioError(f"{where}.{name}: {msg}") from exc


def _ber_model(data: Any, where: str) -> BerModel:
    if not isinstance(data, Mapping):
        raise ScenarioError(f"{where}: expected an object")
    kind = data.get("kind")
    kw: dict[str, Any] = {"kind": kind}
    try:
        if kind == "logistic_db":
            for key in ("slope", "midpoint_db", "ceiling"):
                if key in data:
                    kw[key] = _num(data[key], f"{where}.{key}")
        elif kind == "polynomial_db":
            kw["coefficients"] = [
                _num(c, f"{where}.coefficients[{i}]")
                for i, c in enumerate(data.get("coefficients") or [])
            ]
            if "domain_db" in data:
                kw["domain_db"] = tuple(_num(v, f"{where}.domain_db") for v in data["domain_db"])
        elif kind == "table":
            kw["points"] = [
                (_num(p[0], f"{where}.points[{i}]"), _num(p[1], f"{where}.points[{i}]"))
                for i, p in enumerate(data.get("points") or [])
            ]
        else:
            raise ScenarioError(f"{where}.kind: unknown BER model kind {kind!r}")
        return BerModel(**kw)
    except ModelValidationError as exc:
        raise ScenarioError(f"{where}: {exc}") from exc


def _platform(data: Any, where: str, models: Mapping[str, BerModel]) -> Platform:
    if not isinstance(data, Mapping):
        raise ScenarioError(f"{where}: expected an object")
    allowed = {
        "id", "label", "side", "functions", "position", "rcs",
        "radar", "comm", "jammer", "target_weight",
    }
    for key in data:
        if key not in allowed:
            raise ScenarioError(f"{where}.{key}: unknown field")
    for key in ("id", "side", "functions", "position", "comm"):
        if key not in data:
            raise ScenarioError(f"{where}.{key}: missing field")
    pid = data["id"]
    if not isinstance(pid, str) or not pid:
        raise ScenarioError(f"{where}.id: expected a non-empty string")
    where = f"{where}[id={pid}]"
    side = data["side"]
    if side not in SIDES:
        raise ScenarioError(f"{where}.side: must be 'A' or 'B', got {side!r}")
    funcs = data["functions"]
    if not isinstance(funcs, list) or any(f not in FUNCTIONS for f in funcs):
        raise ScenarioError(f"{where}.functions: must be a subset of S, C, D, I")
    pos = data["position"]
    if not isinstance(pos, list) or len(pos) != 3:
        raise ScenarioError(f"{where}.position: expected [x, y, z]")
    position = tuple(_num(v, f"{where}.position") for v in pos)

    comm_data = data["comm"]
    if not isinstance(comm_data, Mapping):
        raise ScenarioError(f"{where}.comm: expected an object")
    model_id = comm_data.get("ber_model", "default")
    if model_id not in models:
        raise ScenarioError(f"{where}.comm.ber_model: unknown model {model_id!r}")
    comm = _build(CommParams, comm_data, f"{where}.comm", {"ber_model": models[model_id]})

    radar = data.get("radar")
    if radar is None and "S" in funcs:
        raise ScenarioError(f"{where}.radar: required for function S")
    radar = None if radar is None else _build(RadarParams, radar, f"{where}.radar")
    jammer = data.get("jammer")
    if jammer is None and "I" in funcs:
        raise ScenarioError(f"{where}.jammer: required for function I")
    jammer = None if jammer is None else _build(JammerParams, jammer, f"{where}.jammer")

    weight = data.get("target_weight")
    if weight is not None:
        weight = _num(weight, f"{where}.target_weight")
        if weight < 0:
            raise ScenarioError(f"{where}.target_weight: must be >= 0")
    rcs = _num(data.get("rcs", 1.0), f"{where}.rcs")
    if rcs <= 0:
        raise ScenarioError(f"{where}.rcs: must be > 0")
    label = data.get("label", pid)
    if not isinstance(label, str):
        raise ScenarioError(f"{where}.label: expected a string")
    return Platform(
        id=pid,
        label=label,
        side=side,
        functions=frozenset(funcs),
        position=position,
        rcs=rcs,
        radar=radar,
        comm=comm,
        jammer=jammer,
        target_weight=weight,
    )


def _build_options(data: Any) -> BuildOptions:
    if data is None:
        return BuildOptions()
    if not isinstance(data, Mapping):
        raise ScenarioError("options: expected an object")
    known = {f.name: f for f in fields(BuildOptions)}
    kw = {}
    for key, value in data.items():
        if key not in known:
            raise ScenarioError(f"options.{key}: unknown field")
        if isinstance(BuildOptions.__dataclass_fields__[key].default, bool):
            if not isinstance(value, bool):
                raise ScenarioError(f"options.{key}: expected true or false")
            kw[key] = value
        else:
            kw[key] = _num(value, f"options.{key}")
    try:
        return BuildOptions(**kw)
    except ValueError as exc:
        raise ScenarioError(f"options.{str(exc).split()[0]}: {exc}") from exc


def load_scenario(document: str | Mapping[str, Any]) -> Scenario:
    """Parse and validate a scenario from JSON text or an already-decoded dict."""
    if isinstance(document, (str, bytes)):
        try:
            data = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"document: invalid JSON ({exc})") from exc
    else:
        data = document
    if not isinstance(data, Mapping):
        raise ScenarioError("document: top level must be an object")
    allowed = {"name", "sides", "ber_models", "platforms", "options", "cycle_options", "rank_options"}
    for key in data:
        if key not in allowed:
            raise ScenarioError(f"{key}: unknown top-level field")

    models: dict[str, BerModel] = {"default": DEFAULT_BER_MODEL}
    raw_models = data.get("ber_models") or {}
    if not isinstance(raw_models, Mapping):
        raise ScenarioError("ber_models: expected an object")
    for mid, entry in raw_models.items():
        models[mid] = _ber_model(entry, f"ber_models.{mid}")

    raw_platforms = data.get("platforms", [])
    if not isinstance(raw_platforms, list):
        raise ScenarioError("platforms: expected a list")
    platforms = []
    seen: set[str] = set()
    for i, item in enumerate(raw_platforms):
        p = _platform(item, f"platforms[{i}]", models)
        if p.id in seen:
            raise ScenarioError(f"platforms[{i}].id: duplicate id {p.id!r}")
        seen.add(p.id)
        platforms.append(p)

    for key in ("cycle_options", "rank_options"):
        if not isinstance(data.get(key, {}), Mapping):
            raise ScenarioError(f"{key}: expected an object")
    protected = (data.get("rank_options") or {}).get("protected_nodes", [])
    for node in protected:
        if node not in seen:
            raise ScenarioError(f"rank_options.protected_nodes: unknown platform {node!r}")

    return Scenario(
        name=str(data.get("name", "")),
        platforms=tuple(platforms),
        build_options=_build_options(data.get("options")),
        ber_models=MappingProxyType(models),
        cycle_options=MappingProxyType(dict(data.get("cycle_options") or {})),
        rank_options=MappingProxyType(dict(data.get("rank_options") or {})),
    )


def load_scenario_file(path: str | Path) -> Scenario:
    return load_scenario(Path(path).read_text(encoding="utf-8"))


# -- network construction ---------------------------------------------------


def _distance(a: Platform, b: Platform, min_sep: float) -> float:
    d = math.dist(a.position, b.position)
    if d < min_sep:
        log.info("separation %s-%s %.3g m clamped to %.3g m", a.id, b.id, d, min_sep)
        return min_sep
    return d


def _jamming_at(
    victim: Platform, rx_gain: float, jammers: Iterable[Platform], min_sep: float
) -> float:
    return sum(
        jammer_received_power(j.jammer, rx_gain, _distance(j, victim, min_sep))
        for j in jammers
    )


def _detection_cap(sensor: Platform, target: Platform, d: float, jam: float) -> float:
    radar = sensor.radar
    return detection_probability(radar_snr(radar, target.rcs, d, jam), radar.pulses)


def build_network(scenario: Scenario, options: BuildOptions | None = None) -> Network:
    """Build the relation multigraph for both sides of ``scenario``."""
    opts = options or scenario.build_options
    sep = opts.min_separation
    plats = sorted(scenario.platforms, key=lambda p: id_key(p.id))
    jammers = {s: [p for p in plats if p.side == s and p.has("I")] for s in SIDES}

    edges: list[Edge] = []
    # per receive edge: victim-side receive gain, plus pre-jamming capability
    receive: dict[str, list[tuple[tuple, float, float]]] = {p.id: [] for p in plats}

    for s in plats:
        if not s.has("S"):
            continue
        hostile = jammers[opposing(s.side)]
        for t in plats:
            if t.side == s.side:
                continue
            d = _distance(s, t, sep)
            cap = _detection_cap(s, t, d, 0.0)
            if cap < opts.detection_prune_threshold:
                continue
            jammed = _detection_cap(s, t, d, _jamming_at(s, s.radar.antenna_gain, hostile, sep))
            key = (t.id, s.id, EdgeKind.DETECTION)
            edges.append(
                Edge(
                    t.id, s.id, EdgeKind.DETECTION,
                    jammed if opts.apply_adversary_jamming else cap,
                    cap, jammed,
                )
            )
            receive[s.id].append((key, cap, d))

    for tx in plats:
        for rx in plats:
            if rx.side != tx.side or rx.id == tx.id:
                continue
            d = _distance(tx, rx, sep)
            cap = link_capability(tx.comm, rx.comm, d)
            if cap < opts.comm_prune_threshold:
                continue
            hostile = jammers[opposing(rx.side)]
            jammed = link_capability(
                tx.comm, rx.comm, d, _jamming_at(rx, rx.comm.rx_gain, hostile, sep)
            )
            key = (tx.id, rx.id, EdgeKind.COMMUNICATION)
            edges.append(
                Edge(
                    tx.id, rx.id, EdgeKind.COMMUNICATION,
                    jammed if opts.apply_adversary_jamming else cap,
                    cap, jammed,
                )
            )
            receive[rx.id].append((key, cap, d))

    by_id = {p.id: p for p in plats}
    terms: dict[tuple[str, str], dict[tuple, tuple[float, float]]] = {}
    for side in SIDES:
        for i in jammers[side]:
            for j in plats:
                if j.side == side:
                    continue
                pairs = {}
                for key, before, d in receive[j.id]:
                    src, _, kind = key
                    if kind is EdgeKind.DETECTION:
                        jam = _jamming_at(j, j.radar.antenna_gain, [i], sep)
                        after = _detection_cap(j, by_id[src], d, jam)
                    else:
                        jam = _jamming_at(j, j.comm.rx_gain, [i], sep)
                        after = link_capability(by_id[src].comm, j.comm, d, jam)
                    pairs[key] = (before, after)
                if not pairs:
                    log.debug("victim %s has no receive edges; interference from %s is 0", j.id, i.id)
                    continue
                cap = weighted_degradation(pairs.values())
                if cap <= 0.0:
                    continue
                terms[(i.id, j.id)] = pairs
                edges.append(Edge(i.id, j.id, EdgeKind.INTERFERENCE, cap))

    return Network(plats, edges, terms, opts)


def interference_capability(network: Network, jammer: str, victim: str) -> float:
    """Interference capability of ``jammer`` on ``victim`` from recorded terms."""
    for node in (jammer, victim):
        if node not in network:
            raise NodeNotFound(node)
    i, j = network.platforms[jammer], network.platforms[victim]
    if not i.has("I"):
        raise ValueError(f"{jammer!r} has no interference function")
    if i.side == j.side:
        raise ValueError(f"{victim!r} is not on the side opposing {jammer!r}")
    pairs = network.interference_terms.get((jammer, victim))
    if not pairs:
        log.debug("victim %s has no receive edges; interference from %s is 0", victim, jammer)
        return 0.0
    return weighted_degradation(pairs.values())


def delete_node(network: Network, node_id: str) -> Network:
    """Return a copy of ``network`` without ``node_id`` and its incident edges.

    Interference edges that have recorded terms are revalued over the victim's
    surviving receive edges unless the network was built with
    ``static_interference``.
    """
    if node_id not in network:
        raise NodeNotFound(node_id)
    platforms = [p for pid, p in network.platforms.items() if pid != node_id]
    terms = {
        pair: {k: v for k, v in pairs.items() if node_id not in k[:2]}
        for pair, pairs in network.interference_terms.items()
        if node_id not in pair
    }
    edges = []
    for e in network.edges:
        if node_id in (e.src, e.dst):
            continue
        if (
            e.kind is EdgeKind.INTERFERENCE
            and not network.options.static_interference
            and (e.src, e.dst) in terms
        ):
            e = replace(e, capability=weighted_degradation(terms[(e.src, e.dst)].values()))
        edges.append(e)
    return Network(platforms, edges, terms, network.options)
