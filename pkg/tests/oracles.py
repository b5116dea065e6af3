"""Independent reference implementations used only by the tests.

Each one takes the slow, obvious route so it shares no code path with the
package function it checks.
"""

from __future__ import annotations

import math
from collections import Counter
from itertools import combinations

from lcnhcc.interactions import normalize_url


def bucket_by_subtraction(t: int, width: int) -> int:
    """Window index by repeated subtraction, counting whole widths."""
    index = 0
    # jump in large strides first so 10k random epoch timestamps stay fast
    stride = width
    while stride * 2 <= t:
        stride *= 2
    while stride >= width:
        while t >= stride:
            t -= stride
            index += stride // width
        stride //= 2
    return index


def all_pairs_links(posts, gamma_minutes: int, kinds_to_keys) -> Counter:
    """Quadratic scan over every pair of posts.

    ``kinds_to_keys`` maps a criterion name to a function returning the set
    of keys a post contributes.  Two distinct accounts are linked once per
    (window, criterion, key) they both used.
    """
    width = gamma_minutes * 60
    seen = set()
    posts = list(posts)
    for i in range(len(posts)):
        for j in range(len(posts)):
            a, b = posts[i], posts[j]
            if a.account_id >= b.account_id:
                continue
            wa, wb = a.timestamp // width, b.timestamp // width
            if wa != wb:
                continue
            for name, keys in kinds_to_keys.items():
                for k in keys(a) & keys(b):
                    seen.add((wa, name, k, a.account_id, b.account_id))
    return Counter((w, name, k, u, v) for w, name, k, u, v in seen)


def modularity_q(edges, communities) -> float:
    """Q = sum_c (e_cc - a_c^2) on a weighted undirected graph."""
    m = sum(w for _, _, w in edges)
    label = {x: i for i, c in enumerate(communities) for x in c}
    e_in = Counter()
    deg = Counter()
    for u, v, w in edges:
        deg[u] += w
        deg[v] += w
        if label[u] == label[v]:
            e_in[label[u]] += w
    a = Counter()
    for x, d in deg.items():
        a[label[x]] += d
    return sum(e_in[c] / m - (a[c] / (2 * m)) ** 2 for c in range(len(communities)))


def kahan_mean(values) -> float:
    total = 0.0
    comp = 0.0
    n = 0
    for x in values:
        y = x - comp
        t = total + y
        comp = (t - total) - y
        total = t
        n += 1
    return total / n


def dict_cosine(a: dict, b: dict) -> float:
    dot = sum(a[k] * b[k] for k in a if k in b)
    na = math.sqrt(sum(v * v for v in a.values()))
    nb = math.sqrt(sum(v * v for v in b.values()))
    if na == 0 or nb == 0:
        return 0.0
    return dot / (na * nb)


def five_grams(text: str) -> dict:
    grams = {}
    for i in range(len(text) - 4):
        g = text[i:i + 5]
        grams[g] = grams.get(g, 0) + 1
    return grams


def pair_counts(truth: dict, groups) -> tuple[int, int, int]:
    """(tp, predicted, true) pair counts by enumerating every account pair."""
    label = {}
    for gi, members in enumerate(groups):
        for a in members:
            label[a] = gi
    tp = pred = true = 0
    for a, c in combinations(sorted(set(truth) | set(label)), 2):
        same_truth = a in truth and c in truth and truth[a] == truth[c]
        same_pred = a in label and c in label and label[a] == label[c]
        true += same_truth
        pred += same_pred
        tp += same_truth and same_pred
    return tp, pred, true


def shannon_bits(counts) -> float:
    n = sum(counts)
    return -sum((c / n) * math.log2(c / n) for c in counts if c)


# Keys each post contributes per criterion, read straight off the record.
ORACLE_KEYS = {
    "co_retweet": lambda p: {p.reposted_post_id} if p.reposted_post_id else set(),
    "co_retweeted_account": lambda p: {p.reposted_account_id} if p.reposted_account_id else set(),
    "co_hashtag": lambda p: {h.lower() for h in p.hashtags},
    "co_url": lambda p: {normalize_url(u) for u in p.urls},
    "co_mention": lambda p: set(p.mentions),
    "co_conv": lambda p: {p.conversation_root_id} if p.conversation_root_id and not p.reposted_post_id else set(),
}
