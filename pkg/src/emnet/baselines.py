"""Classical key-node indicators on the undirected communication graph."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .cycles import CycleOptions, count_cycles
from .effectiveness import RankOptions, deletion_candidates, targets
from .network import EdgeKind, Network, delete_node, id_key

METHODS = ("degree", "closeness", "betweenness", "pagerank", "eigenvector", "cycle_count")


class DegenerateSpectrum(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph: sorted vertex ids and neighbour sets."""

    nodes: tuple[str, ...]
    adj: Mapping[str, frozenset[str]]

    @classmethod
    def from_edges(cls, nodes, edges) -> "Graph":
        adj: dict[str, set[str]] = {n: set() for n in nodes}
        for a, b in edges:
            if a == b:
                continue
            adj.setdefault(a, set()).add(b)
            adj.setdefault(b, set()).add(a)
        order = tuple(sorted(adj, key=id_key))
        return cls(order, {n: frozenset(adj[n]) for n in order})

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return sum(len(v) for v in self.adj.values()) // 2

    def adjacency_matrix(self) -> np.ndarray:
        index = {n: i for i, n in enumerate(self.nodes)}
        a = np.zeros((len(self.nodes), len(self.nodes)))
        for n, nbrs in self.adj.items():
            for m in nbrs:
                a[index[n], index[m]] = 1.0
        return a


@dataclass(frozen=True)
class CentralityTable:
    method: str
    scores: dict[str, float]
    ranks: dict[str, int]

    def tie_groups(self) -> list[tuple[int, list[str]]]:
        groups: dict[int, list[str]] = {}
        for node, r in self.ranks.items():
            groups.setdefault(r, []).append(node)
        return [
            (r, sorted(nodes, key=id_key))
            for r, nodes in sorted(groups.items())
            if len(nodes) > 1
        ]


def dense_ranks(scores: Mapping[str, float], descending: bool = True) -> dict[str, int]:
    """Dense ranking; scores equal to 10 significant digits share a rank."""
    rounded = {n: float(f"{s:.10g}") for n, s in scores.items()}
    distinct = sorted(set(rounded.values()), reverse=descending)
    pos = {v: i + 1 for i, v in enumerate(distinct)}
    return {n: pos[v] for n, v in rounded.items()}


def _table(method: str, scores: dict[str, float], descending: bool = True) -> CentralityTable:
    return CentralityTable(method, scores, dense_ranks(scores, descending))


def comm_graph(network: Network) -> Graph:
    pairs = [
        (e.src, e.dst) for e in network.edges if e.kind is EdgeKind.COMMUNICATION
    ]
    return Graph.from_edges(network.platforms, pairs)


def subgraph(graph: Graph, nodes) -> Graph:
    keep = set(nodes)
    return Graph.from_edges(
        [n for n in graph.nodes if n in keep],
        [(a, b) for a in keep for b in graph.adj[a] if b in keep],
    )


def _bfs(graph: Graph, source: str) -> dict[str, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in graph.adj[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def degree_centrality(graph: Graph) -> CentralityTable:
    return _table("degree", {n: float(len(graph.adj[n])) for n in graph.nodes})


def closeness_centrality(graph: Graph) -> CentralityTable:
    """Inverse distance sum over the reachable set, scaled by (r - 1)/(n - 1)."""
    n = len(graph)
    scores = {}
    for u in graph.nodes:
        dist = _bfs(graph, u)
        total = sum(dist.values())
        r = len(dist)
        scores[u] = 0.0 if total == 0 or n <= 1 else (1.0 / total) * (r - 1) / (n - 1)
    return _table("closeness", scores)


def betweenness_centrality(graph: Graph) -> CentralityTable:
    """Unnormalized pair-count betweenness (Brandes accumulation).

    Each unordered pair contributes once; equal-length shortest paths split
    the credit evenly.
    """
    cb = {v: 0.0 for v in graph.nodes}
    for s in graph.nodes:
        stack = []
        preds: dict[str, list[str]] = {v: [] for v in graph.nodes}
        sigma = dict.fromkeys(graph.nodes, 0.0)
        sigma[s] = 1.0
        dist = {s: 0}
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in sorted(graph.adj[v], key=id_key):
                if w not in dist:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = dict.fromkeys(graph.nodes, 0.0)
        while stack:
            w = stack.pop()
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                cb[w] += delta[w]
    return _table("betweenness", {v: c / 2.0 for v, c in cb.items()})


def pagerank(graph: Graph, damping: float = 0.5, tol: float = 1e-12, max_iter: int = 10_000) -> CentralityTable:
    if not 0.0 < damping < 1.0:
        raise ValueError("damping must lie in (0, 1)")
    n = len(graph)
    if n == 0:
        return _table("pagerank", {})
    a = graph.adjacency_matrix()
    deg = a.sum(axis=1)
    dangling = deg == 0
    p = np.divide(a, deg[:, None], out=np.zeros_like(a), where=~dangling[:, None])
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = damping * (x @ p + x[dangling].sum() / n) + (1.0 - damping) / n
        nxt /= nxt.sum()
        change = np.abs(nxt - x).sum()
        x = nxt
        if change < tol:
            break
    return _table("pagerank", {v: float(s) for v, s in zip(graph.nodes, x)})


def eigenvector_centrality(graph: Graph, tol: float = 1e-10, max_iter: int = 100_000) -> CentralityTable:
    """Dominant adjacency eigenvector by power iteration, scaled to unit sum.

    Iterates on A + I, which shares A's eigenvectors but has no -lambda
    partner to oscillate against on bipartite graphs.
    """
    if graph.edge_count == 0:
        raise DegenerateSpectrum("eigenvector centrality needs at least one edge")
    a = graph.adjacency_matrix()
    m = a + np.eye(len(graph))
    x = np.ones(len(graph)) / len(graph)
    for _ in range(max_iter):
        y = m @ x
        y /= y.sum()
        lam = (y @ (m @ y)) / (y @ y)
        residual = np.linalg.norm(m @ y - lam * y, 1) / lam
        x = y
        if residual < tol:
            break
    return _table("eigenvector", {v: float(s) for v, s in zip(graph.nodes, x)})


def cycle_count_ranking(
    network: Network,
    cycle_opts: CycleOptions = CycleOptions(),
    rank_opts: RankOptions = RankOptions(),
) -> CentralityTable:
    """Surviving combat-cycle count after deleting each deletable node.

    Fewer surviving cycles means more critical, so the smallest count ranks 1.
    """
    tgts = targets(network, rank_opts.attacker)
    if not tgts:
        raise ValueError("network has no targets on the opposing side")
    scores = {}
    for node in deletion_candidates(network, rank_opts):
        reduced = delete_node(network, node)
        scores[node] = float(
            sum(count_cycles(reduced, t, cycle_opts, rank_opts.attacker) for t in tgts)
        )
    return _table("cycle_count", scores, descending=False)


GRAPH_METHODS: dict[str, Callable[[Graph], CentralityTable]] = {
    "degree": degree_centrality,
    "closeness": closeness_centrality,
    "betweenness": betweenness_centrality,
    "pagerank": lambda g: pagerank(g, 0.5),
    "eigenvector": eigenvector_centrality,
}


def compare(
    network: Network,
    cycle_opts: CycleOptions = CycleOptions(),
    rank_opts: RankOptions = RankOptions(),
    pagerank_damping: float = 0.5,
) -> dict[str, CentralityTable]:
    """All six baseline tables, restricted to the deletable platforms.

    Graph centralities are computed on the whole attacking side's
    communication graph and then filtered, so scores are comparable to CRT.
    """
    nodes = deletion_candidates(network, rank_opts)
    graph = subgraph(comm_graph(network), network.side(rank_opts.attacker))
    tables = {}
    for name, fn in GRAPH_METHODS.items():
        full = pagerank(graph, pagerank_damping) if name == "pagerank" else fn(graph)
        scores = {n: full.scores[n] for n in nodes}
        tables[name] = _table(name, scores)
    tables["cycle_count"] = cycle_count_ranking(network, cycle_opts, rank_opts)
    return tables
