"""Undirected-graph steps of clique-tree construction.

Moralization, greedy elimination ordering, fill-in triangulation, and
elimination-clique harvesting.  Vertices keep their insertion order (the
network's declaration order), which is the tie-break priority used by all
deterministic choices downstream.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import CompilationError
from .network import BayesianNetwork


class UndirectedGraph:
    """Simple undirected graph with insertion-ordered vertices."""

    def __init__(self, vertices: Iterable[str] = ()):
        self._order: list[str] = []
        self._adj: dict[str, set[str]] = {}
        for v in vertices:
            self.add_vertex(v)

    def add_vertex(self, v: str) -> None:
        if v not in self._adj:
            self._order.append(v)
            self._adj[v] = set()

    def add_edge(self, u: str, v: str) -> None:
        if u == v:
            raise ValueError(f"self-loop on {u!r}")
        if u not in self._adj or v not in self._adj:
            missing = u if u not in self._adj else v
            raise ValueError(f"edge references unknown vertex {missing!r}")
        self._adj[u].add(v)
        self._adj[v].add(u)

    def has_edge(self, u: str, v: str) -> bool:
        return v in self._adj.get(u, ())

    def neighbors(self, v: str) -> set[str]:
        return set(self._adj[v])

    @property
    def vertices(self) -> tuple[str, ...]:
        return tuple(self._order)

    def edges(self) -> set[frozenset[str]]:
        out: set[frozenset[str]] = set()
        for u, nbrs in self._adj.items():
            for v in nbrs:
                out.add(frozenset((u, v)))
        return out

    def copy(self) -> "UndirectedGraph":
        g = UndirectedGraph(self._order)
        for u in self._order:
            g._adj[u] = set(self._adj[u])
        return g

    def __len__(self):
        return len(self._order)


def moralize(bn: BayesianNetwork) -> UndirectedGraph:
    """Drop arc directions and link every variable's parents pairwise."""
    g = UndirectedGraph(bn.names)
    for name in bn.names:
        ps = bn.parents[name]
        for p in ps:
            g.add_edge(p, name)
        for i in range(len(ps)):
            for j in range(i + 1, len(ps)):
                g.add_edge(ps[i], ps[j])
    return g


def _fill_cost(adj: dict[str, set[str]], v: str) -> int:
    nbrs = sorted(adj[v])
    cost = 0
    for i in range(len(nbrs)):
        for j in range(i + 1, len(nbrs)):
            if nbrs[j] not in adj[nbrs[i]]:
                cost += 1
    return cost


def min_fill_order(g: UndirectedGraph) -> tuple[str, ...]:
    """Greedy minimum-fill elimination order.

    At each step the vertex whose elimination adds the fewest fill edges is
    removed; ties go to the lexicographically smallest name, so the result
    is deterministic for a given graph.
    """
    adj = {v: g.neighbors(v) for v in g.vertices}
    order: list[str] = []
    remaining = sorted(adj)
    while remaining:
        best = min(remaining, key=lambda v: (_fill_cost(adj, v), v))
        order.append(best)
        nbrs = sorted(adj[best])
        for i in range(len(nbrs)):
            for j in range(i + 1, len(nbrs)):
                adj[nbrs[i]].add(nbrs[j])
                adj[nbrs[j]].add(nbrs[i])
        for n in nbrs:
            adj[n].discard(best)
        del adj[best]
        remaining.remove(best)
    return tuple(order)


def triangulate(
    g: UndirectedGraph, order: Sequence[str]
) -> tuple[UndirectedGraph, tuple[tuple[str, str], ...]]:
    """Simulate elimination along `order`, adding the induced fill edges.

    Returns the filled graph and the fill edges in discovery order.  The
    returned graph is chordal; re-running with the same order adds nothing.
    """
    order = tuple(order)
    if sorted(order) != sorted(g.vertices):
        raise CompilationError(
            "elimination order must be a permutation of the graph vertices"
        )
    filled = g.copy()
    adj = {v: filled.neighbors(v) for v in filled.vertices}
    fill: list[tuple[str, str]] = []
    for v in order:
        nbrs = sorted(adj[v])
        for i in range(len(nbrs)):
            for j in range(i + 1, len(nbrs)):
                a, b = nbrs[i], nbrs[j]
                if b not in adj[a]:
                    adj[a].add(b)
                    adj[b].add(a)
                    filled.add_edge(a, b)
                    fill.append((a, b))
        for n in nbrs:
            adj[n].discard(v)
        del adj[v]
    return filled, tuple(fill)


def find_cliques(g: UndirectedGraph, order: Sequence[str]) -> tuple[frozenset[str], ...]:
    """Maximal cliques of a triangulated graph, in discovery order.

    Each candidate is the closed neighborhood of a vertex at its elimination
    time; candidates contained in another candidate are dropped.  `g` must
    already be triangulated for `order`.
    """
    adj = {v: g.neighbors(v) for v in g.vertices}
    candidates: list[frozenset[str]] = []
    for v in order:
        candidates.append(frozenset(adj[v]) | {v})
        for n in adj[v]:
            adj[n].discard(v)
        del adj[v]
    cliques: list[frozenset[str]] = []
    for c in candidates:
        if any(c <= other for other in candidates if other is not c and c != other):
            continue
        if c not in cliques:
            cliques.append(c)
    return tuple(cliques)


def mcs_numbering(g: UndirectedGraph, priority: dict[str, int]) -> dict[str, int]:
    """Maximum-cardinality-search positions (1-based).

    Repeatedly numbers the vertex with the most already-numbered neighbors;
    ties go to the smallest `priority` value (declaration order), making the
    numbering deterministic.
    """
    numbered: dict[str, int] = {}
    counts = {v: 0 for v in g.vertices}
    while len(numbered) < len(g.vertices):
        best = min(
            (v for v in g.vertices if v not in numbered),
            key=lambda v: (-counts[v], priority[v]),
        )
        numbered[best] = len(numbered) + 1
        for n in g.neighbors(best):
            if n not in numbered:
                counts[n] += 1
    return numbered
