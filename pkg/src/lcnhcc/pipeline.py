"""End-to-end detection: posts -> interactions -> links -> LCN -> HCCs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .hcc import Hcc, extract
from .interactions import Interaction, Post, iter_interactions
from .lcn import Lcn, MergedLcn, aggregate, build_window_lcns, merge_multi_edges
from .linkage import DEFAULT_MAX_GROUP_SIZE, Criterion, InferredLink, filter_interactions, find_coordination
from .windowing import WindowConfig, partition


@dataclass
class Detection:
    interactions: list[Interaction]
    links: list[InferredLink]
    lcn: Lcn
    merged: MergedLcn
    hccs: list[Hcc]


def detect(
    posts: Iterable[Post],
    criteria: Iterable[Criterion] = (Criterion.CO_RETWEET,),
    gamma_minutes: int = 15,
    method: str = "fsa_v",
    theta: float = 0.3,
    fraction: float = 0.9,
    seed: int = 0,
    strict: bool = True,
    max_group_size: int | None = DEFAULT_MAX_GROUP_SIZE,
    multipliers: Mapping[Criterion, float] | None = None,
    jobs: int = 1,
) -> Detection:
    criteria = frozenset(criteria)
    interactions = list(iter_interactions(posts))
    relevant = filter_interactions(interactions, criteria)
    buckets = partition(relevant, WindowConfig(gamma_minutes))
    links = find_coordination(buckets, criteria, max_group_size, jobs)
    lcn = aggregate(build_window_lcns(links).values())
    merged = merge_multi_edges(lcn, multipliers)
    hccs = extract(merged, method, theta=theta, fraction=fraction, seed=seed, strict=strict)
    return Detection(interactions, links, lcn, merged, hccs)


def corpus_stats(posts: Sequence[Post]) -> dict:
    """Corpus summary in the shape of a dataset-statistics table row."""
    n = len(posts)
    reposts = sum(p.is_repost for p in posts)
    accounts = len({p.account_id for p in posts})
    if n:
        first = min(p.timestamp for p in posts) // 86_400
        last = max(p.timestamp for p in posts) // 86_400
        days = last - first + 1
    else:
        days = 0
    per = accounts * days
    return {
        "posts": n,
        "reposts": reposts,
        "repost_share": round(reposts / n, 6) if n else None,
        "accounts": accounts,
        "days": days,
        "posts_per_account_per_day": round(n / per, 6) if per else None,
        "reposts_per_account_per_day": round(reposts / per, 6) if per else None,
    }
