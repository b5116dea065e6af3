"""Post records and the interaction primitives derived from them.

Input is newline-delimited JSON, one post per line.  Each post is reduced to
a small set of interactions (post, repost, reply, mention, tag, url) that the
linkage step can coincide on; everything else in the record is dropped.
"""

from __future__ import annotations

import enum
import json
import logging
from dataclasses import dataclass
from typing import Iterable, Iterator
from urllib.parse import urlsplit, urlunsplit

log = logging.getLogger(__name__)

RECORD_FIELDS = (
    "post_id",
    "account_id",
    "timestamp",
    "text",
    "reposted_post_id",
    "reposted_account_id",
    "replied_to_post_id",
    "conversation_root_id",
    "mentions",
    "hashtags",
    "urls",
)


class MalformedRecord(ValueError):
    """A single input line that cannot be turned into a Post."""


class InteractionKind(enum.Enum):
    POST = "post"
    REPOST = "repost"
    REPOST_ACCOUNT = "repost_account"
    REPLY = "reply"
    MENTION = "mention"
    TAG = "tag"
    URL = "url"


# Emission order within one post, also used as the kind tie-breaker downstream.
KIND_ORDER = {kind: i for i, kind in enumerate(InteractionKind)}


@dataclass(frozen=True)
class Post:
    post_id: str
    account_id: str
    timestamp: int
    text: str = ""
    reposted_post_id: str | None = None
    reposted_account_id: str | None = None
    replied_to_post_id: str | None = None
    conversation_root_id: str | None = None
    mentions: tuple[str, ...] = ()
    hashtags: tuple[str, ...] = ()
    urls: tuple[str, ...] = ()
    liked_post_id: str | None = None

    @property
    def is_repost(self) -> bool:
        return self.reposted_post_id is not None

    def to_record(self) -> dict:
        """Serialise back to the line format; absent optionals are omitted."""
        rec: dict = {
            "post_id": self.post_id,
            "account_id": self.account_id,
            "timestamp": self.timestamp,
            "text": self.text,
        }
        for name in ("reposted_post_id", "reposted_account_id",
                     "replied_to_post_id", "conversation_root_id", "liked_post_id"):
            value = getattr(self, name)
            if value is not None:
                rec[name] = value
        rec["mentions"] = list(self.mentions)
        rec["hashtags"] = list(self.hashtags)
        rec["urls"] = list(self.urls)
        return rec

    def to_line(self) -> str:
        return json.dumps(self.to_record(), ensure_ascii=False, separators=(",", ":"))


@dataclass(frozen=True)
class Interaction:
    kind: InteractionKind
    actor: str
    timestamp: int
    key: str
    source_post: str

    def sort_key(self) -> tuple:
        return (self.timestamp, self.source_post, KIND_ORDER[self.kind], self.key)

    def to_tsv(self) -> str:
        return "\t".join((self.kind.value, self.actor, str(self.timestamp), self.key, self.source_post))


def _optional_str(rec: dict, name: str) -> str | None:
    value = rec.get(name)
    if value is None:
        return None
    if not isinstance(value, str) or not value:
        raise MalformedRecord(f"{name} must be a non-empty string")
    return value


def _str_list(rec: dict, name: str) -> list[str]:
    value = rec.get(name)
    if value is None:
        return []
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise MalformedRecord(f"{name} must be a list of strings")
    return [v for v in value if v]


def normalize_hashtag(tag: str) -> str:
    return tag.lstrip("#").lower()


def post_from_record(rec: object) -> Post:
    """Validate one decoded record and build a Post from it."""
    if not isinstance(rec, dict):
        raise MalformedRecord("record is not an object")
    for name in ("post_id", "account_id"):
        if not isinstance(rec.get(name), str) or not rec[name]:
            raise MalformedRecord(f"missing or empty {name}")
    ts = rec.get("timestamp")
    if isinstance(ts, bool) or not isinstance(ts, int):
        if isinstance(ts, float) and ts.is_integer():
            ts = int(ts)
        else:
            raise MalformedRecord("missing or non-integer timestamp")
    if ts < 0:
        raise MalformedRecord("negative timestamp")
    text = rec.get("text")
    if text is None:
        text = ""
    elif not isinstance(text, str):
        raise MalformedRecord("text must be a string")

    reposted_post = _optional_str(rec, "reposted_post_id")
    reposted_account = _optional_str(rec, "reposted_account_id")
    if (reposted_post is None) != (reposted_account is None):
        raise MalformedRecord("reposted_post_id and reposted_account_id must appear together")

    hashtags = [normalize_hashtag(t) for t in _str_list(rec, "hashtags")]
    return Post(
        post_id=rec["post_id"],
        account_id=rec["account_id"],
        timestamp=ts,
        text=text,
        reposted_post_id=reposted_post,
        reposted_account_id=reposted_account,
        replied_to_post_id=_optional_str(rec, "replied_to_post_id"),
        conversation_root_id=_optional_str(rec, "conversation_root_id"),
        mentions=tuple(_str_list(rec, "mentions")),
        hashtags=tuple(t for t in hashtags if t),
        urls=tuple(_str_list(rec, "urls")),
        liked_post_id=_optional_str(rec, "liked_post_id"),
    )


def parse_posts(
    records: Iterable[str],
    malformed: list[tuple[int, str]] | None = None,
) -> list[Post]:
    """Parse line-delimited post records, in input order.

    Bad lines are logged and skipped.  If ``malformed`` is given, one
    ``(line_number, reason)`` entry is appended per skipped line, so
    ``len(malformed)`` is the malformed count.  Blank lines are ignored.
    A repeated ``post_id`` counts as malformed; the first occurrence wins.
    """
    posts: list[Post] = []
    seen: set[str] = set()
    for lineno, line in enumerate(records, start=1):
        if not line.strip():
            continue
        try:
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecord(f"invalid JSON: {exc.msg}") from None
            post = post_from_record(rec)
            if post.post_id in seen:
                raise MalformedRecord(f"duplicate post_id {post.post_id!r}")
        except MalformedRecord as exc:
            log.warning("line %d skipped: %s", lineno, exc)
            if malformed is not None:
                malformed.append((lineno, str(exc)))
            continue
        seen.add(post.post_id)
        posts.append(post)
    return posts


def read_corpus(path, malformed: list[tuple[int, str]] | None = None) -> list[Post]:
    with open(path, encoding="utf-8") as fh:
        return parse_posts(fh, malformed)


def write_corpus(posts: Iterable[Post], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for post in posts:
            fh.write(post.to_line())
            fh.write("\n")


def try_normalize_url(raw: str) -> tuple[str, bool]:
    """Normalise a URL, returning ``(url, ok)``.

    Scheme and host are lowercased, the fragment and any trailing slashes
    dropped, the query kept.  Anything without a scheme and host, or that
    ``urlsplit`` rejects, comes back verbatim with ``ok=False``.
    """
    try:
        parts = urlsplit(raw.strip())
    except ValueError:
        return raw, False
    if not parts.scheme or not parts.netloc:
        return raw, False
    netloc = parts.netloc
    userinfo, at, host = netloc.rpartition("@")
    netloc = f"{userinfo}{at}{host.lower()}"
    path = parts.path.rstrip("/")
    return urlunsplit((parts.scheme.lower(), netloc, path, parts.query, "")), True


def normalize_url(raw: str) -> str:
    url, ok = try_normalize_url(raw)
    if not ok:
        log.debug("url left unnormalised: %r", raw)
    return url


def url_domain(url: str) -> str:
    """Host of a normalised URL with a leading ``www.`` removed."""
    try:
        host = urlsplit(url).hostname
    except ValueError:
        host = None
    if not host:
        return url
    return host[4:] if host.startswith("www.") else host


def extract_interactions(p: Post) -> list[Interaction]:
    """Reduce a post to its interactions.

    Order is fixed: POST, REPOST, REPOST_ACCOUNT, REPLY, then MENTION, TAG
    and URL entries each in sorted key order.  Entities are deduplicated per
    post.  A repost carrying a conversation root is still only a repost.
    """
    def make(kind: InteractionKind, key: str) -> Interaction:
        return Interaction(kind, p.account_id, p.timestamp, key, p.post_id)

    out = [make(InteractionKind.POST, "")]
    if p.reposted_post_id is not None:
        out.append(make(InteractionKind.REPOST, p.reposted_post_id))
        out.append(make(InteractionKind.REPOST_ACCOUNT, p.reposted_account_id))
    elif p.conversation_root_id is not None:
        out.append(make(InteractionKind.REPLY, p.conversation_root_id))
    out.extend(make(InteractionKind.MENTION, m) for m in sorted(set(p.mentions)))
    out.extend(make(InteractionKind.TAG, t) for t in sorted({normalize_hashtag(h) for h in p.hashtags}))
    out.extend(make(InteractionKind.URL, u) for u in sorted({normalize_url(u) for u in p.urls}))
    return out


def iter_interactions(posts: Iterable[Post]) -> Iterator[Interaction]:
    for p in posts:
        yield from extract_interactions(p)
