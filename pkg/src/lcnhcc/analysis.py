"""Validation analytics over extracted groups.

Every function here takes member collections rather than ``Hcc`` objects so
the same code runs over detected HCCs and random baseline groups alike.
"""

from __future__ import annotations

import datetime as dt
import math
import random
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import Collection, Iterable, Sequence

import networkx as nx
import numpy as np
from scipy import sparse

from .interactions import Post, normalize_hashtag, normalize_url, url_domain
from .linkage import InferredLink

NGRAM = 5
FEATURES = ("hashtags", "urls", "domains", "mentioned_accounts", "retweeted_accounts")
DAY = 86_400
WEEK = 7 * DAY

_ws = re.compile(r"\s+")


class InsufficientPoolError(ValueError):
    pass


def posts_by_account(posts: Iterable[Post]) -> dict[str, list[Post]]:
    out: dict[str, list[Post]] = defaultdict(list)
    for p in sorted(posts, key=lambda p: (p.timestamp, p.post_id)):
        out[p.account_id].append(p)
    return dict(out)


def normalize_text(text: str) -> str:
    return _ws.sub(" ", text.lower()).strip()


def char_ngrams(text: str, n: int = NGRAM) -> Counter:
    return Counter(text[i:i + n] for i in range(len(text) - n + 1))


def account_document(posts: Sequence[Post], normalize: bool = True, n: int = NGRAM) -> Counter:
    """n-gram counts over one account's posts joined by single spaces."""
    texts = [p.text for p in posts]
    doc = " ".join(texts)
    if normalize:
        doc = normalize_text(doc)
    return char_ngrams(doc, n)


@dataclass
class SimilarityMatrix:
    order: list[tuple[int, str]]  # (group index, account id) per row
    values: np.ndarray

    def block_means(self) -> tuple[float, float]:
        """Mean off-diagonal cosine within groups and between groups."""
        labels = np.array([g for g, _ in self.order])
        same = labels[:, None] == labels[None, :]
        off = ~np.eye(len(labels), dtype=bool)
        intra = self.values[same & off]
        inter = self.values[~same]
        return (float(intra.mean()) if intra.size else math.nan,
                float(inter.mean()) if inter.size else math.nan)

    def boundaries(self) -> list[tuple[int, int, int]]:
        """(group, first_row, last_row_exclusive) for each group block."""
        out: list[tuple[int, int, int]] = []
        for row, (g, _) in enumerate(self.order):
            if out and out[-1][0] == g:
                out[-1] = (g, out[-1][1], row + 1)
            else:
                out.append((g, row, row + 1))
        return out


def similarity_matrix(
    groups: Sequence[Collection[str]],
    posts: Iterable[Post],
    binary: bool = False,
    normalize: bool = True,
) -> SimilarityMatrix:
    """Cosine similarity of members' 5-gram documents, grouped by HCC.

    Rows follow (group index, account id).  Accounts with no text get a zero
    vector, so their row is all zeros, diagonal included.
    """
    by_acct = posts_by_account(posts)
    order = [(gi, a) for gi, members in enumerate(groups) for a in sorted(members)]
    docs = [account_document(by_acct.get(a, []), normalize) for _, a in order]

    vocab: dict[str, int] = {}
    rows, cols, vals = [], [], []
    for r, doc in enumerate(docs):
        for gram in sorted(doc):
            rows.append(r)
            cols.append(vocab.setdefault(gram, len(vocab)))
            vals.append(1.0 if binary else float(doc[gram]))
    x = sparse.csr_matrix((vals, (rows, cols)), shape=(len(docs), max(len(vocab), 1)))
    norms = np.sqrt(np.asarray(x.multiply(x).sum(axis=1)).ravel())
    inv = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
    xn = sparse.diags(inv) @ x
    sim = (xn @ xn.T).toarray()
    sim = np.clip((sim + sim.T) / 2, 0.0, 1.0)
    np.fill_diagonal(sim, (norms > 0).astype(float))
    return SimilarityMatrix(order, sim)


def _shannon_bits(counts: Iterable[int]) -> float:
    c = np.array([x for x in counts if x > 0], dtype=float)
    if c.size <= 1:
        return 0.0
    p = c / c.sum()
    return float(max(0.0, -(p * np.log2(p)).sum()))


@dataclass
class FeatureStat:
    entropy: float
    distinct_values: int
    total_uses: int


@dataclass
class FeatureEntropyReport:
    group: int
    features: dict[str, FeatureStat] = field(default_factory=dict)


def feature_counts(members: Collection[str], posts: Iterable[Post]) -> dict[str, Counter]:
    """Pooled per-feature value counts over members' posts.

    Each distinct value counts once per post.  URL domains include URLs
    carried by reposts.
    """
    members = set(members)
    counts = {f: Counter() for f in FEATURES}
    for p in posts:
        if p.account_id not in members:
            continue
        urls = {normalize_url(u) for u in p.urls}
        counts["hashtags"].update({normalize_hashtag(h) for h in p.hashtags})
        counts["urls"].update(urls)
        counts["domains"].update({url_domain(u) for u in urls})
        counts["mentioned_accounts"].update(set(p.mentions))
        if p.reposted_account_id is not None:
            counts["retweeted_accounts"][p.reposted_account_id] += 1
    return counts


def feature_entropy(members: Collection[str], posts: Iterable[Post], group: int = 0) -> FeatureEntropyReport:
    """Base-2 Shannon entropy of each feature's pooled distribution.

    Features the group never used are left out of the report.
    """
    report = FeatureEntropyReport(group)
    for name, counts in feature_counts(members, posts).items():
        if counts:
            report.features[name] = FeatureStat(
                _shannon_bits(counts.values()), len(counts), sum(counts.values())
            )
    return report


def internal_ratios(members: Collection[str], posts: Iterable[Post]) -> tuple[float | None, float | None]:
    """Internal retweet and mention ratios (None where nothing was counted)."""
    members = set(members)
    rt_in = rt_all = mn_in = mn_all = 0
    for p in posts:
        if p.account_id not in members:
            continue
        if p.reposted_account_id is not None:
            rt_all += 1
            rt_in += p.reposted_account_id in members
        for m in set(p.mentions):
            mn_all += 1
            mn_in += m in members
    return (rt_in / rt_all if rt_all else None, mn_in / mn_all if mn_all else None)


def bucket_start(t: int, bucket: str) -> int:
    """Start of the UTC day, or of the ISO week (Monday 00:00 UTC)."""
    day = t // DAY
    if bucket == "daily":
        return day * DAY
    if bucket == "weekly":
        # 1970-01-01 was a Thursday
        return (day - (day + 3) % 7) * DAY
    raise ValueError(f"bucket must be 'daily' or 'weekly', got {bucket!r}")


@dataclass
class ActivitySeries:
    buckets: list[int]
    per_group: list[list[float]]
    mean: list[float]

    def iso(self, i: int) -> str:
        return dt.datetime.fromtimestamp(self.buckets[i], dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def temporal_activity(
    groups: Sequence[Collection[str]],
    posts: Iterable[Post],
    bucket: str = "daily",
    span: tuple[int, int] | None = None,
) -> ActivitySeries:
    """Mean posts per member per day (or ISO week), plus the cross-group mean.

    Buckets run over ``span`` (first, last timestamp), defaulting to the whole
    corpus, so silent members and quiet periods contribute zeros.
    """
    posts = list(posts)
    size = DAY if bucket == "daily" else WEEK
    if span is None:
        if not posts:
            return ActivitySeries([], [[] for _ in groups], [])
        span = (min(p.timestamp for p in posts), max(p.timestamp for p in posts))
    first, last = bucket_start(span[0], bucket), bucket_start(span[1], bucket)
    buckets = list(range(first, last + 1, size))
    index = {b: i for i, b in enumerate(buckets)}

    owner: dict[str, list[int]] = defaultdict(list)
    for gi, members in enumerate(groups):
        for a in members:
            owner[a].append(gi)
    tallies = [[0] * len(buckets) for _ in groups]
    for p in posts:
        if p.account_id in owner and span[0] <= p.timestamp <= span[1]:
            b = index[bucket_start(p.timestamp, bucket)]
            for gi in owner[p.account_id]:
                tallies[gi][b] += 1

    per_group = [[n / len(groups[gi]) for n in row] for gi, row in enumerate(tallies)]
    mean = [sum(col) / len(groups) for col in zip(*per_group)] if groups else [0.0] * len(buckets)
    return ActivitySeries(buckets, per_group, mean)


def random_baseline(
    all_accounts: Iterable[str],
    groups: Sequence[Collection[str]],
    seed: int = 0,
) -> list[frozenset[str]]:
    """Random groups of non-member accounts with the same size multiset.

    Group ``i`` of the result has the size of input group ``i``.
    """
    taken = {a for g in groups for a in g}
    pool = sorted(set(all_accounts) - taken)
    need = sum(len(g) for g in groups)
    if need > len(pool):
        raise InsufficientPoolError(
            f"random baseline needs {need} non-member accounts, pool has {len(pool)} "
            f"(short by {need - len(pool)})"
        )
    drawn = random.Random(seed).sample(pool, need)
    out, i = [], 0
    for g in groups:
        out.append(frozenset(drawn[i:i + len(g)]))
        i += len(g)
    return out


def hashtag_cooccurrence(members: Collection[str], posts: Iterable[Post]) -> nx.Graph:
    """Hashtags used by members, linked by the number of posts sharing both."""
    members = set(members)
    g = nx.Graph()
    for p in posts:
        if p.account_id not in members:
            continue
        tags = sorted({normalize_hashtag(h) for h in p.hashtags})
        for t in tags:
            if t not in g:
                g.add_node(t, uses=0)
            g.nodes[t]["uses"] += 1
        for a, b in combinations(tags, 2):
            if g.has_edge(a, b):
                g.edges[a, b]["weight"] += 1
            else:
                g.add_edge(a, b, weight=1)
    return g


def reason_node(link: InferredLink) -> str:
    return f"{link.criterion.value}:{link.key}"


def expand_reasons(
    groups: Sequence[Collection[str]],
    links: Iterable[InferredLink],
) -> nx.Graph:
    """Attach the shared keys behind each group's links as extra vertices.

    Account vertices carry ``kind="account"`` and ``hcc``; reason vertices
    carry ``kind="reason"``, ``criterion`` and ``key``.  An account-reason
    edge's weight is the number of windows in which that account was linked
    through that key.
    """
    group_of: dict[str, int] = {}
    for gi, members in enumerate(groups):
        for a in members:
            group_of.setdefault(a, gi)

    g = nx.Graph()
    for a in sorted(group_of):
        g.add_node(a, kind="account", hcc=group_of[a])

    usage: dict[tuple[str, str], set[int]] = defaultdict(set)
    meta: dict[str, InferredLink] = {}
    for link in links:
        for a in (link.u, link.v):
            if a in group_of:
                node = reason_node(link)
                usage[(a, node)].add(link.window)
                meta.setdefault(node, link)

    for (a, node), windows in sorted(usage.items()):
        if node not in g:
            src = meta[node]
            g.add_node(node, kind="reason", criterion=src.criterion.value, key=src.key)
        g.add_edge(a, node, weight=len(windows))
    return g


def group_entropy_means(reports: Sequence[FeatureEntropyReport]) -> dict[str, float]:
    """Mean entropy per feature over the groups that used it."""
    out = {}
    for f in FEATURES:
        vals = [r.features[f].entropy for r in reports if f in r.features]
        if vals:
            out[f] = sum(vals) / len(vals)
    return out


def account_set(posts: Iterable[Post]) -> set[str]:
    return {p.account_id for p in posts}

