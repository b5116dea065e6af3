"""Criteria filtering and pairwise link inference inside windows."""

from __future__ import annotations

import enum
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .interactions import Interaction, InteractionKind
from .windowing import WindowId

log = logging.getLogger(__name__)

DEFAULT_MAX_GROUP_SIZE = 1000


class ConfigError(ValueError):
    pass


class Criterion(enum.Enum):
    CO_RETWEET = "co_retweet"
    CO_RETWEETED_ACCOUNT = "co_retweeted_account"
    CO_HASHTAG = "co_hashtag"
    CO_URL = "co_url"
    CO_MENTION = "co_mention"
    CO_CONV = "co_conv"

    @property
    def kind(self) -> InteractionKind:
        return CRITERION_KIND[self]

    @classmethod
    def parse_list(cls, text: str) -> frozenset[Criterion]:
        """Parse a comma list such as ``co_retweet,co_hashtag``."""
        names = [n.strip().lower() for n in text.split(",") if n.strip()]
        if not names:
            raise ConfigError("criteria: empty list")
        out = set()
        for name in names:
            try:
                out.add(cls(name))
            except ValueError:
                valid = ", ".join(c.value for c in cls)
                raise ConfigError(f"criteria: unknown criterion {name!r} (valid: {valid})") from None
        return frozenset(out)


CRITERION_KIND = {
    Criterion.CO_RETWEET: InteractionKind.REPOST,
    Criterion.CO_RETWEETED_ACCOUNT: InteractionKind.REPOST_ACCOUNT,
    Criterion.CO_HASHTAG: InteractionKind.TAG,
    Criterion.CO_URL: InteractionKind.URL,
    Criterion.CO_MENTION: InteractionKind.MENTION,
    Criterion.CO_CONV: InteractionKind.REPLY,
}
CRITERION_ORDER = {c: i for i, c in enumerate(Criterion)}


def sorted_criteria(criteria: Iterable[Criterion]) -> list[Criterion]:
    return sorted(set(criteria), key=CRITERION_ORDER.__getitem__)


@dataclass(frozen=True)
class InferredLink:
    """One unit of coincidence evidence between two accounts.

    ``u < v`` always.  ``key`` is the shared value (post id, tag, url, ...)
    that produced the link; it is kept so reasons can be traced later.
    """

    u: str
    v: str
    criterion: Criterion
    window: WindowId
    key: str
    weight: int = 1

    def __post_init__(self):
        if not self.u < self.v:
            raise ValueError(f"link endpoints not canonical: {self.u!r}, {self.v!r}")
        if self.weight < 1:
            raise ValueError("link weight must be >= 1")

    def sort_key(self) -> tuple:
        return (self.window, CRITERION_ORDER[self.criterion], self.u, self.v, self.key)

    def to_tsv(self) -> str:
        return "\t".join((str(self.window), self.criterion.value, self.key, self.u, self.v, str(self.weight)))

    @classmethod
    def from_tsv(cls, line: str) -> InferredLink:
        window, crit, key, u, v, weight = line.rstrip("\n").split("\t")
        return cls(u, v, Criterion(crit), int(window), key, int(weight))


def filter_interactions(
    interactions: Iterable[Interaction], criteria: Iterable[Criterion]
) -> list[Interaction]:
    kinds = {c.kind for c in criteria}
    if not kinds:
        raise ConfigError("criteria: at least one criterion is required")
    return [it for it in interactions if it.kind in kinds]


def infer_links(
    bucket: Iterable[Interaction],
    criterion: Criterion,
    window: WindowId,
    max_group_size: int | None = DEFAULT_MAX_GROUP_SIZE,
) -> list[InferredLink]:
    """Link every pair of distinct accounts that share a key in this window.

    Each account counts once per key, so a pair sharing ``n`` keys gets ``n``
    links.  Key groups with more than ``max_group_size`` accounts are skipped.
    """
    kind = criterion.kind
    groups: dict[str, set[str]] = {}
    for it in bucket:
        if it.kind is kind:
            groups.setdefault(it.key, set()).add(it.actor)

    links = []
    for key in sorted(groups):
        actors = groups[key]
        if len(actors) < 2:
            continue
        if max_group_size is not None and len(actors) > max_group_size:
            log.warning(
                "window %d %s key %r: %d accounts exceeds max group size %d, skipped",
                window, criterion.value, key, len(actors), max_group_size,
            )
            continue
        for u, v in combinations(sorted(actors), 2):
            links.append(InferredLink(u, v, criterion, window, key))
    return links


def _window_links(args) -> list[InferredLink]:
    window, bucket, criteria, max_group_size = args
    out = []
    for c in criteria:
        out.extend(infer_links(bucket, c, window, max_group_size))
    return out


def find_coordination(
    partition: Mapping[WindowId, Sequence[Interaction]],
    criteria: Iterable[Criterion],
    max_group_size: int | None = DEFAULT_MAX_GROUP_SIZE,
    jobs: int = 1,
) -> list[InferredLink]:
    """All inferred links over every (window, criterion) pair.

    Links from different windows are never merged here.  Output is ordered by
    (window, criterion, u, v, key) regardless of ``jobs``.
    """
    crits = sorted_criteria(criteria)
    if not crits:
        raise ConfigError("criteria: at least one criterion is required")
    tasks = [(w, partition[w], crits, max_group_size) for w in sorted(partition)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_window_links, tasks, chunksize=max(1, len(tasks) // (jobs * 4))))
    else:
        chunks = [_window_links(t) for t in tasks]
    links = [link for chunk in chunks for link in chunk]
    links.sort(key=InferredLink.sort_key)
    return links
