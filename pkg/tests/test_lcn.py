import random
from collections import defaultdict

import networkx as nx
import pytest

from oracles import kahan_mean
from lcnhcc.lcn import (
    EmptyEdgeSetError,
    Lcn,
    MergedLcn,
    aggregate,
    build_lcn,
    build_window_lcns,
    merge_multi_edges,
    mean_edge_weight,
)
from lcnhcc.linkage import Criterion as C, InferredLink


def link(u, v, c=C.CO_HASHTAG, w=0, key="k"):
    return InferredLink(u, v, c, w, key)


def random_links(rng, n=300, windows=5):
    out = []
    accounts = [f"a{i}" for i in range(12)]
    for _ in range(n):
        u, v = sorted(rng.sample(accounts, 2))
        out.append(InferredLink(u, v, rng.choice(list(C)), rng.randrange(windows), str(rng.randrange(5))))
    return out


def test_empty_links_empty_graph():
    lcn = build_lcn([], 0)
    assert len(lcn) == 0 and lcn.vertices == set()


def test_repeated_link_sums():
    lcn = build_lcn([link("a", "b", key="x"), link("a", "b", key="y")], 0)
    assert lcn.typed == {("a", "b"): {C.CO_HASHTAG: 2}}


def test_window_mismatch_rejected():
    with pytest.raises(ValueError):
        build_lcn([link("a", "b", w=1)], 0)


def test_build_matches_hashmap_accumulation():
    rng = random.Random(1)
    links = [l for l in random_links(rng) if l.window == 0]
    expected = defaultdict(int)
    for l in links:
        expected[(l.u, l.v, l.criterion)] += l.weight
    lcn = build_lcn(links, 0)
    got = {(u, v, c): w for (u, v), per in lcn.typed.items() for c, w in per.items()}
    assert got == dict(expected)
    assert lcn.vertices == {x for l in links for x in (l.u, l.v)}


def test_aggregate_single_is_identity():
    lcn = build_lcn(random_links(random.Random(2), windows=1), 0)
    assert aggregate([lcn]) == lcn


def test_aggregate_four_windows():
    lcns = [build_lcn([link("a", "b", w=w)], w) for w in range(4)]
    assert aggregate(lcns).typed == {("a", "b"): {C.CO_HASHTAG: 4}}


def test_aggregate_order_independent_and_equals_direct_build():
    rng = random.Random(3)
    for _ in range(20):
        links = random_links(rng)
        per_window = list(build_window_lcns(links).values())
        merged = aggregate(per_window)
        rng.shuffle(per_window)
        assert aggregate(per_window) == merged
        assert build_lcn(links) == merged


def test_merge_example():
    lcn = Lcn({("a", "b"): {C.CO_RETWEET: 2, C.CO_HASHTAG: 3}, ("b", "c"): {C.CO_URL: 4}})
    m = merge_multi_edges(lcn)
    assert m.weight("a", "b") == 5
    assert m.weight("c", "b") == 4
    assert m.breakdown[("a", "b")] == {C.CO_RETWEET: 2, C.CO_HASHTAG: 3}


def test_merge_provenance_sums_to_scalar():
    rng = random.Random(4)
    for _ in range(50):
        m = merge_multi_edges(build_lcn(random_links(rng)))
        for e, w in m.weights.items():
            assert type(w) is int
            assert sum(m.breakdown[e].values()) == w


def test_multipliers_of_one_reduce_to_sum():
    lcn = build_lcn(random_links(random.Random(5)))
    plain = merge_multi_edges(lcn)
    ones = merge_multi_edges(lcn, {c: 1.0 for c in C})
    assert {e: float(w) for e, w in plain.weights.items()} == ones.weights


def test_multipliers_scale_and_drop_zero_edges():
    lcn = Lcn({("a", "b"): {C.CO_RETWEET: 2, C.CO_HASHTAG: 3}, ("c", "d"): {C.CO_HASHTAG: 1}})
    m = merge_multi_edges(lcn, {C.CO_HASHTAG: 0.0})
    assert m.weights == {("a", "b"): 2.0}


def test_no_self_loops_or_zero_weights():
    with pytest.raises(ValueError):
        Lcn().add("a", "a", C.CO_URL, 1)
    with pytest.raises(ValueError):
        Lcn().add("a", "b", C.CO_URL, 0)
    with pytest.raises(ValueError):
        MergedLcn({("a", "b"): 0})


@pytest.mark.parametrize("ws, mean", [([10, 10, 10], 10), ([9, 1], 5)])
def test_mean_examples(ws, mean):
    assert mean_edge_weight(ws) == mean


def test_mean_empty_raises():
    with pytest.raises(EmptyEdgeSetError):
        mean_edge_weight([])


def test_mean_matches_compensated_sum():
    rng = random.Random(6)
    for _ in range(20):
        ws = [rng.uniform(0.001, 1e6) for _ in range(1000)]
        assert mean_edge_weight(ws) == pytest.approx(kahan_mean(ws), rel=1e-12)
        ints = [rng.randint(1, 10**6) for _ in range(1000)]
        assert mean_edge_weight(ints) == pytest.approx(kahan_mean(ints), rel=1e-12)


def test_edge_list_round_trip_and_graphml(tmp_path):
    lcn = build_lcn(random_links(random.Random(7)))
    m = merge_multi_edges(lcn)
    m.write_edge_list(tmp_path / "lcn.tsv")
    back = MergedLcn.read_edge_list(tmp_path / "lcn.tsv")
    assert back.weights == m.weights and back.breakdown == m.breakdown

    m.write_graphml(tmp_path / "lcn.graphml")
    g = nx.read_graphml(tmp_path / "lcn.graphml")
    assert g.number_of_edges() == len(m)
    for (u, v), w in m.weights.items():
        data = g.edges[u, v]
        assert data["weight"] == w
        assert sum(data.get(c.value, 0) for c in C) == w
