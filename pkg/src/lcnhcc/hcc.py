"""Highly coordinating community (HCC) extraction from a merged LCN.

Three extractors share one output type:

* ``fsa_v``: Louvain pre-partition, then greedy heaviest-edge growth inside
  each community, gated by ``theta`` and the global mean edge weight.
* ``knn_extract``: keep each vertex's ``round(ln |V|)`` heaviest edges.
* ``threshold_extract``: keep the heaviest fraction of edges.

Ties on weight are always broken by the canonical ``(u, v)`` order, so every
extractor is deterministic for a fixed graph (and seed, for ``fsa_v``).
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple

import networkx as nx

from .lcn import Edge, EmptyEdgeSetError, MergedLcn, canonical, mean_edge_weight

METHODS = ("fsa_v", "knn", "threshold")


@dataclass(frozen=True)
class Hcc:
    members: tuple[str, ...]
    internal_edges: tuple[tuple[str, str, int | float], ...]
    mew: float

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[str, str, int | float]]) -> Hcc:
        es = tuple(sorted((*canonical(u, v), w) for u, v, w in edges))
        if not es:
            raise EmptyEdgeSetError("an HCC needs at least one edge")
        members = tuple(sorted({x for u, v, _ in es for x in (u, v)}))
        return cls(members, es, mean_edge_weight(w for _, _, w in es))

    def __len__(self) -> int:
        return len(self.members)

    @property
    def member_set(self) -> frozenset[str]:
        return frozenset(self.members)


@dataclass(frozen=True)
class FsaVParams:
    theta: float = 0.3
    strict: bool = True

    def __post_init__(self):
        if not (0 < self.theta <= 1):
            raise ValueError(f"theta must be in (0, 1], got {self.theta}")


class GrowthStep(NamedTuple):
    """One accepted edge during FSA_V candidate growth."""

    community: int
    edge: Edge
    weight: int | float
    old_mean: Fraction
    new_mean: Fraction


def _edge_order(u: str, v: str, w) -> tuple:
    # heaviest first, then canonical (u, v)
    return (-w, u, v)


def louvain(g: MergedLcn, seed: int = 0) -> list[set[str]]:
    """Weighted Louvain communities, deterministic for a given seed.

    Communities are returned sorted by their smallest-first member listing.
    """
    if not g:
        raise ValueError("louvain needs a non-empty graph")
    comms = nx.community.louvain_communities(g.to_networkx(), weight="weight", seed=seed)
    return sorted((set(c) for c in comms), key=sorted)


def modularity(g: MergedLcn, communities: Iterable[Iterable[str]]) -> float:
    return nx.community.modularity(g.to_networkx(), [set(c) for c in communities], weight="weight")


def _as_fraction(w) -> Fraction:
    return Fraction(w)


def _grow(
    g: MergedLcn,
    community: set[str],
    index: int,
    g_mean: Fraction,
    theta: Fraction,
    trace: list[GrowthStep] | None,
) -> list[tuple[str, str, int | float]] | None:
    """Grow one candidate inside ``community``; None if it has no edges."""
    inner = [(u, v, w) for (u, v), w in g.weights.items() if u in community and v in community]
    if not inner:
        return None
    u0, v0, w0 = min(inner, key=lambda e: _edge_order(*e))

    h_edges = [(u0, v0, w0)]
    h_vertices: set[str] = set()
    total = _as_fraction(w0)
    frontier: list[tuple] = []
    pushed: set[Edge] = {(u0, v0)}

    def attach(x: str) -> None:
        if x in h_vertices:
            return
        h_vertices.add(x)
        for y, w in g.adj[x].items():
            if y not in community:
                continue
            e = canonical(x, y)
            if e not in pushed:
                pushed.add(e)
                heapq.heappush(frontier, (_edge_order(*e, w), e, w))

    attach(u0)
    attach(v0)
    while frontier:
        _, e, w = frontier[0]
        old_mean = total / len(h_edges)
        new_mean = (total + _as_fraction(w)) / (len(h_edges) + 1)
        if new_mean < g_mean or new_mean < old_mean * theta:
            break
        heapq.heappop(frontier)
        h_edges.append((*e, w))
        total += _as_fraction(w)
        if trace is not None:
            trace.append(GrowthStep(index, e, w, old_mean, new_mean))
        attach(e[0])
        attach(e[1])
    return h_edges


def fsa_v(
    g: MergedLcn,
    params: FsaVParams | float = FsaVParams(),
    seed: int = 0,
    trace: list[GrowthStep] | None = None,
    communities: list[set[str]] | None = None,
) -> list[Hcc]:
    """Extract HCCs with FSA_V.

    Inside each Louvain community the candidate starts from the heaviest
    edge and repeatedly takes the heaviest community edge touching it.
    Growth stops when the next edge would pull the candidate's mean below
    the global mean, or below ``theta`` times its current mean.  A candidate
    is kept only if its mean ends strictly above the global mean (``>=``
    when ``params.strict`` is False).

    Means are compared as exact fractions.  Pass ``trace`` to collect every
    accepted growth step; pass ``communities`` to skip the Louvain call.
    """
    if not isinstance(params, FsaVParams):
        params = FsaVParams(theta=params)
    if not g:
        return []
    theta = Fraction(str(params.theta)) if isinstance(params.theta, float) else Fraction(params.theta)
    g_mean = sum((_as_fraction(w) for w in g.weights.values()), Fraction(0)) / len(g.weights)
    if communities is None:
        communities = louvain(g, seed)

    out = []
    for i, comm in enumerate(communities):
        edges = _grow(g, set(comm), i, g_mean, theta, trace)
        if edges is None:
            continue
        mean = sum((_as_fraction(w) for _, _, w in edges), Fraction(0)) / len(edges)
        if mean > g_mean or (not params.strict and mean == g_mean):
            out.append(Hcc.from_edges(edges))
    return out


def _components(edges: Iterable[tuple[str, str, int | float]]) -> list[Hcc]:
    sub = nx.Graph()
    for u, v, w in edges:
        sub.add_edge(u, v, weight=w)
    out = []
    for comp in nx.connected_components(sub):
        if len(comp) < 2:
            continue
        out.append(Hcc.from_edges((u, v, d["weight"]) for u, v, d in sub.subgraph(comp).edges(data=True)))
    return sorted(out, key=lambda h: h.members)


def knn_k(n_vertices: int) -> int:
    return max(1, round(math.log(n_vertices)))


def knn_extract(g: MergedLcn, k: int | None = None) -> list[Hcc]:
    """Union of every vertex's ``k`` heaviest incident edges, split into components.

    ``k`` defaults to ``max(1, round(ln |V|))``.  A kept edge is kept whole,
    whatever its weight relative to the rest of the graph.
    """
    if not g:
        return []
    if k is None:
        k = knn_k(len(g.adj))
    kept: set[Edge] = set()
    for x, nbrs in g.adj.items():
        ranked = sorted((_edge_order(*canonical(x, y), w) for y, w in nbrs.items()))
        for _, u, v in ranked[:k]:
            kept.add((u, v))
    return _components((u, v, g.weights[(u, v)]) for u, v in sorted(kept))


def threshold_extract(g: MergedLcn, fraction: float = 0.9) -> list[Hcc]:
    """Keep the ``floor(fraction * |E|)`` heaviest edges (at least one)."""
    if not (0 < fraction <= 1):
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    if not g:
        return []
    exact = Fraction(str(fraction)) if isinstance(fraction, float) else Fraction(fraction)
    n_keep = max(1, math.floor(exact * len(g.weights)))
    ranked = sorted(_edge_order(u, v, w) for (u, v), w in g.weights.items())
    return _components((u, v, -negw) for negw, u, v in ranked[:n_keep])


def extract(g: MergedLcn, method: str = "fsa_v", *, theta: float = 0.3,
            fraction: float = 0.9, seed: int = 0, strict: bool = True) -> list[Hcc]:
    if method == "fsa_v":
        return fsa_v(g, FsaVParams(theta, strict), seed)
    if method == "knn":
        return knn_extract(g)
    if method == "threshold":
        return threshold_extract(g, fraction)
    raise ValueError(f"unknown method {method!r} (valid: {', '.join(METHODS)})")
