import random
from fractions import Fraction

import pytest

from helpers import random_merged
from oracles import modularity_q
from lcnhcc.hcc import (
    FsaVParams,
    GrowthStep,
    Hcc,
    fsa_v,
    knn_extract,
    knn_k,
    louvain,
    threshold_extract,
)
from lcnhcc.lcn import MergedLcn, mean_edge_weight


def clique(names, w=1):
    return {(a, b): w for i, a in enumerate(names) for b in names[i + 1:]}


def planted(rng, groups=4, size=5, p_in=0.9, p_out=0.05):
    names = [f"n{g}_{i}" for g in range(groups) for i in range(size)]
    weights = {}
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            same = a.split("_")[0] == b.split("_")[0]
            if rng.random() < (p_in if same else p_out):
                weights[(a, b)] = rng.randint(3, 6) if same else 1
    return MergedLcn(weights)


# --- Louvain -----------------------------------------------------------------

def test_louvain_two_triangles(two_triangles):
    assert louvain(two_triangles) == [{"a", "b", "c"}, {"d", "e", "f"}]


def test_louvain_clique():
    assert louvain(MergedLcn(clique("abcde"))) == [set("abcde")]


def test_louvain_planted_partition_modularity():
    g = planted(random.Random(1))
    edges = g.sorted_edges()
    comms = louvain(g, seed=3)
    q = modularity_q(edges, comms)
    singletons = modularity_q(edges, [{v} for v in g.vertices])
    assert q >= singletons
    assert q >= 0.3


def test_louvain_seeded_determinism():
    g = random_merged(random.Random(2), 60, 0.1)
    assert louvain(g, 5) == louvain(g, 5)


def test_louvain_empty_rejected():
    with pytest.raises(ValueError):
        louvain(MergedLcn({}))


# --- FSA_V -------------------------------------------------------------------

def test_single_edge_graph_is_empty():
    assert fsa_v(MergedLcn({("a", "b"): 7}), 0.3) == []


def test_two_triangles_hand_trace(two_triangles):
    [h] = fsa_v(two_triangles, FsaVParams(0.3))
    assert h.members == ("a", "b", "c")
    assert h.mew == 10
    assert len(h.internal_edges) == 3


def test_path_nine_one_hand_trace():
    g = MergedLcn({("a", "b"): 9, ("b", "c"): 1})
    assert louvain(g) == [{"a", "b", "c"}]
    trace = []
    assert fsa_v(g, 0.3, trace=trace) == []
    assert trace == [GrowthStep(0, ("b", "c"), 1, Fraction(9), Fraction(5))]


def test_path_nine_one_non_strict_keeps_it():
    g = MergedLcn({("a", "b"): 9, ("b", "c"): 1})
    [h] = fsa_v(g, FsaVParams(0.3, strict=False))
    assert h.members == ("a", "b", "c") and h.mew == 5


def test_theta_stops_growth():
    # global mean 35/6; adding the 8 would take the mean from 9.5 to 9 < 10*0.95
    g = MergedLcn({("a", "b"): 10, ("b", "c"): 9, ("c", "d"): 8, ("x", "y"): 6, ("y", "z"): 1, ("x", "z"): 1})
    hccs = fsa_v(g, 0.95, communities=[{"a", "b", "c", "d"}, {"x", "y", "z"}])
    # x-y alone (6) also clears the global mean; growing it with a 1 does not
    assert [h.members for h in hccs] == [("a", "b", "c"), ("x", "y")]


def test_heaviest_edge_tie_break_is_canonical():
    g = MergedLcn({("c", "d"): 5, ("a", "b"): 5, ("x", "y"): 1})
    trace = []
    hccs = fsa_v(g, 1.0, trace=trace, communities=[{"a", "b", "c", "d"}, {"x", "y"}])
    # seed is (a, b); (c, d) never touches it, so the candidate is a-b alone
    assert [h.members for h in hccs] == [("a", "b")]
    assert trace == []


def test_edges_between_members_are_eligible():
    g = MergedLcn({("a", "b"): 10, ("b", "c"): 9, ("a", "c"): 8, ("x", "y"): 1})
    [h] = fsa_v(g, 0.3, communities=[{"a", "b", "c"}, {"x", "y"}])
    assert len(h.internal_edges) == 3


@pytest.mark.parametrize("theta", [0, -0.1, 1.5])
def test_theta_range(theta):
    with pytest.raises(ValueError):
        FsaVParams(theta)


def test_empty_graph_empty_result():
    assert fsa_v(MergedLcn({}), 0.3) == []


def test_fsa_v_invariants_on_random_graphs():
    rng = random.Random(11)
    for _ in range(40):
        g = random_merged(rng, rng.randint(5, 60), rng.uniform(0.05, 0.4))
        if not g:
            continue
        theta = rng.choice([0.1, 0.3, 0.5, 0.9, 1.0])
        seed = rng.randrange(100)
        trace = []
        comms = louvain(g, seed)
        hccs = fsa_v(g, theta, seed=seed, trace=trace)
        g_mean = Fraction(sum(g.weights.values()), len(g))
        for h in hccs:
            assert Fraction(sum(w for *_, w in h.internal_edges), len(h.internal_edges)) > g_mean
            assert sum(h.member_set <= c for c in comms) == 1
            assert len(h.members) >= 2
            for u, v, w in h.internal_edges:
                assert g.weight(u, v) == w
        for step in trace:
            assert not step.new_mean < step.old_mean * Fraction(str(theta))
            assert not step.new_mean < g_mean
        assert hccs == fsa_v(g, theta, seed=seed)


# --- kNN and threshold ---------------------------------------------------------

def test_knn_two_triangles(two_triangles):
    assert knn_k(6) == 2
    hccs = knn_extract(two_triangles)
    assert [h.members for h in hccs] == [("a", "b", "c"), ("d", "e", "f")]
    assert all(len(h.internal_edges) == 3 for h in hccs)


def test_knn_star_is_one_hcc():
    g = MergedLcn({("hub", f"leaf{i}"): 2 for i in range(5)})
    [h] = knn_extract(g)
    assert len(h.members) == 6


def test_knn_dense_graph_single_hcc():
    g = random_merged(random.Random(12), 100, 0.3)
    assert len(knn_extract(g)) == 1


def test_knn_keeps_light_edges_of_retained_vertices():
    # k = round(ln 4) = 1: c's only edge is weight 1, still kept
    g = MergedLcn({("a", "b"): 50, ("b", "c"): 1, ("a", "d"): 40})
    assert knn_k(4) == 1
    [h] = knn_extract(g)
    assert ("b", "c", 1) in h.internal_edges


def test_threshold_full_fraction_is_components(two_triangles):
    assert [h.members for h in threshold_extract(two_triangles, 1.0)] == [("a", "b", "c"), ("d", "e", "f")]


def test_threshold_ninety_percent_two_triangles(two_triangles):
    hccs = threshold_extract(two_triangles, 0.9)
    assert [h.members for h in hccs] == [("a", "b", "c"), ("d", "e", "f")]
    # (e, f) is last in canonical order among the weight-1 edges
    assert hccs[1].internal_edges == (("d", "e", 1), ("d", "f", 1))


def test_threshold_uniform_weights_deterministic():
    g = random_merged(random.Random(13), 30, 0.2, max_w=1)
    runs = {tuple(h.members for h in threshold_extract(g, 0.5)) for _ in range(5)}
    assert len(runs) == 1


def test_threshold_keeps_at_least_one_edge():
    g = MergedLcn({("a", "b"): 1, ("c", "d"): 2})
    [h] = threshold_extract(g, 0.1)
    assert h.members == ("c", "d")


def test_threshold_decimal_fraction_exact():
    g = random_merged(random.Random(14), 40, 0.2)
    n = len(g)
    kept = sum(len(h.internal_edges) for h in threshold_extract(g, 0.29))
    assert kept == max(1, n * 29 // 100)


def test_all_methods_deterministic_and_faithful():
    rng = random.Random(15)
    for _ in range(10):
        g = random_merged(rng, 40, 0.15)
        for fn in (lambda: fsa_v(g, 0.3, seed=1), lambda: knn_extract(g), lambda: threshold_extract(g, 0.9)):
            first = fn()
            assert first == fn()
            for h in first:
                assert len(h.members) >= 2
                assert set(h.members) == {x for u, v, _ in h.internal_edges for x in (u, v)}
                assert h.mew == mean_edge_weight(w for *_, w in h.internal_edges)
                for u, v, w in h.internal_edges:
                    assert g.weight(u, v) == w


def test_hcc_requires_edges():
    with pytest.raises(ValueError):
        Hcc.from_edges([])
