"""Latent connection networks: typed per-window graphs and their merged form."""

from __future__ import annotations

import math
from collections import defaultdict
from fractions import Fraction
from typing import Iterable, Mapping

import networkx as nx

from .linkage import Criterion, InferredLink, sorted_criteria
from .windowing import WindowId

Edge = tuple[str, str]


class EmptyEdgeSetError(ValueError):
    """Mean requested over no edges."""


def canonical(u: str, v: str) -> Edge:
    return (u, v) if u < v else (v, u)


class Lcn:
    """Undirected multigraph over accounts, one integer weight per criterion."""

    def __init__(self, typed: Mapping[Edge, Mapping[Criterion, int]] | None = None):
        self.typed: dict[Edge, dict[Criterion, int]] = {}
        for (u, v), per in (typed or {}).items():
            for c, w in per.items():
                self.add(u, v, c, w)

    def add(self, u: str, v: str, criterion: Criterion, weight: int) -> None:
        if u == v:
            raise ValueError(f"self-loop on {u!r}")
        if weight <= 0:
            raise ValueError("edge weight must be positive")
        per = self.typed.setdefault(canonical(u, v), {})
        per[criterion] = per.get(criterion, 0) + weight

    @property
    def vertices(self) -> set[str]:
        return {x for e in self.typed for x in e}

    def __len__(self) -> int:
        return len(self.typed)

    def __eq__(self, other) -> bool:
        return isinstance(other, Lcn) and self.typed == other.typed

    def __repr__(self) -> str:
        return f"Lcn({len(self.vertices)} vertices, {len(self.typed)} edges)"


class MergedLcn:
    """Single-weight graph with the per-criterion breakdown kept per edge."""

    def __init__(
        self,
        weights: Mapping[Edge, int | float],
        breakdown: Mapping[Edge, Mapping[Criterion, int]] | None = None,
    ):
        self.weights: dict[Edge, int | float] = {}
        self.breakdown: dict[Edge, dict[Criterion, int]] = {}
        breakdown = breakdown or {}
        for (u, v), w in weights.items():
            if u == v:
                raise ValueError(f"self-loop on {u!r}")
            if w <= 0:
                raise ValueError(f"non-positive weight on ({u}, {v})")
            e = canonical(u, v)
            self.weights[e] = w
            self.breakdown[e] = dict(breakdown.get((u, v)) or breakdown.get((v, u)) or {})
        self.adj: dict[str, dict[str, int | float]] = defaultdict(dict)
        for (u, v), w in self.weights.items():
            self.adj[u][v] = w
            self.adj[v][u] = w
        self.adj = dict(self.adj)

    @property
    def vertices(self) -> list[str]:
        return sorted(self.adj)

    def __len__(self) -> int:
        return len(self.weights)

    def __bool__(self) -> bool:
        return bool(self.weights)

    def weight(self, u: str, v: str) -> int | float:
        return self.weights[canonical(u, v)]

    def sorted_edges(self) -> list[tuple[str, str, int | float]]:
        return [(u, v, self.weights[(u, v)]) for u, v in sorted(self.weights)]

    def to_networkx(self) -> nx.Graph:
        """Graph with nodes and edges inserted in sorted order."""
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        for u, v, w in self.sorted_edges():
            g.add_edge(u, v, weight=w)
        return g

    def breakdown_str(self, e: Edge) -> str:
        per = self.breakdown.get(e, {})
        return ",".join(f"{c.value}:{per[c]}" for c in sorted_criteria(per))

    def write_edge_list(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("u\tv\tweight\tcriterion_breakdown\n")
            for u, v, w in self.sorted_edges():
                fh.write(f"{u}\t{v}\t{w}\t{self.breakdown_str((u, v))}\n")

    def write_graphml(self, path) -> None:
        g = self.to_networkx()
        for (u, v), per in self.breakdown.items():
            for c, w in per.items():
                g.edges[u, v][c.value] = w
        nx.write_graphml(g, path)

    @classmethod
    def read_edge_list(cls, path) -> MergedLcn:
        weights, breakdown = {}, {}
        with open(path, encoding="utf-8") as fh:
            next(fh, None)
            for line in fh:
                if not line.strip():
                    continue
                u, v, w, bd = line.rstrip("\n").split("\t")
                weights[(u, v)] = int(w) if w.lstrip("-").isdigit() else float(w)
                per = {}
                for item in filter(None, bd.split(",")):
                    name, count = item.rsplit(":", 1)
                    per[Criterion(name)] = int(count)
                breakdown[(u, v)] = per
        return cls(weights, breakdown)


def build_lcn(links: Iterable[InferredLink], window: WindowId | None = None) -> Lcn:
    """Sum link weights per (u, v, criterion).

    With ``window`` given, every link must carry that window id.
    """
    lcn = Lcn()
    for link in links:
        if window is not None and link.window != window:
            raise ValueError(f"link from window {link.window} passed to window {window}")
        lcn.add(link.u, link.v, link.criterion, link.weight)
    return lcn


def build_window_lcns(links: Iterable[InferredLink]) -> dict[WindowId, Lcn]:
    by_window: dict[WindowId, list[InferredLink]] = defaultdict(list)
    for link in links:
        by_window[link.window].append(link)
    return {w: build_lcn(ls, w) for w, ls in sorted(by_window.items())}


def aggregate(lcns: Iterable[Lcn]) -> Lcn:
    """Sum typed weights across windows; the vertex set is the union."""
    out = Lcn()
    for lcn in lcns:
        for (u, v), per in lcn.typed.items():
            for c, w in per.items():
                out.add(u, v, c, w)
    return out


def merge_multi_edges(
    lcn: Lcn, multipliers: Mapping[Criterion, float] | None = None
) -> MergedLcn:
    """Collapse typed edges to one weight by summation.

    Without ``multipliers`` the result stays integral and exact.  With them,
    each criterion's weight is scaled before summing (missing criteria count
    as 1.0); edges that end up at zero weight are dropped.
    """
    weights: dict[Edge, int | float] = {}
    for e, per in lcn.typed.items():
        if multipliers is None:
            weights[e] = sum(per.values())
        else:
            weights[e] = math.fsum(multipliers.get(c, 1.0) * w for c, w in per.items())
    kept = {e: w for e, w in weights.items() if w > 0}
    return MergedLcn(kept, {e: lcn.typed[e] for e in kept})


def mean_edge_weight(weights: Iterable[int | float] | MergedLcn) -> float:
    """Arithmetic mean of edge weights.

    Integer weights are summed exactly; floats go through ``math.fsum``.
    """
    if isinstance(weights, MergedLcn):
        weights = weights.weights.values()
    ws = list(weights)
    if not ws:
        raise EmptyEdgeSetError("mean edge weight of an empty edge set")
    if all(isinstance(w, int) for w in ws):
        return sum(ws) / len(ws)
    return math.fsum(ws) / len(ws)


def exact_mean(weights: Iterable[int | float]) -> Fraction:
    ws = [Fraction(w) for w in weights]
    if not ws:
        raise EmptyEdgeSetError("mean edge weight of an empty edge set")
    return sum(ws, Fraction(0)) / len(ws)
