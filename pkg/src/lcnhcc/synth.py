"""Synthetic labelled corpora: organic background plus implanted campaigns.

Background accounts post at a Poisson rate with Zipf-distributed words,
hashtags and domains, so coincidental links exist.  Each implant is a group
running one strategy for a number of episodes; every episode lands inside a
single gamma window unless ``straddle`` is set.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from typing import Collection, Iterable, Mapping, Sequence

import numpy as np

from .interactions import Post

DEFAULT_START = 1_577_836_800  # 2020-01-01T00:00:00Z
VOCAB_SIZE = 500
ZIPF_EXPONENT = 1.2
REPOST_SHARE = 0.55
REPLY_SHARE = 0.1
MENTION_PROB = 0.3
URL_PROB = 0.2
TEXT_WORDS = 5000
TEXT_EXPONENT = 0.9

_ONSETS = ("b", "c", "d", "f", "g", "h", "j", "k", "l", "m", "n", "p",
           "qu", "r", "s", "t", "v", "w", "x", "z", "br", "st", "tr", "ch", "sh")
_VOWELS = ("a", "e", "i", "o", "u", "y", "ai", "ou")
_CODAS = ("", "", "", "n", "r", "s", "l", "k", "m", "t")


class ScenarioError(ValueError):
    pass


class Strategy(enum.Enum):
    BOOST = "boost"
    BOOST_ACCOUNT = "boost_account"
    POLLUTE = "pollute"
    BULLY = "bully"


@dataclass
class ImplantSpec:
    strategy: Strategy
    group_size: int
    events: int
    within_window_seconds: int = 300
    target: str | None = None


@dataclass
class ScenarioConfig:
    seed: int = 0
    duration_days: int = 14
    background_accounts: int = 500
    background_rate: float = 0.3
    implants: list[ImplantSpec] = field(default_factory=list)
    gamma_minutes: int = 15
    start: int = DEFAULT_START
    straddle: bool = False
    implant_background: bool = True
    vocab_size: int = VOCAB_SIZE
    zipf_exponent: float = ZIPF_EXPONENT

    def problems(self) -> list[str]:
        out = []
        for name in ("duration_days", "background_accounts", "gamma_minutes", "vocab_size"):
            if getattr(self, name) <= 0:
                out.append(f"{name} must be positive (got {getattr(self, name)})")
        if not self.background_rate > 0:
            out.append(f"background_rate must be positive (got {self.background_rate})")
        if self.start < 0:
            out.append("start must be non-negative")
        window = self.gamma_minutes * 60
        if self.duration_days > 0 and window > 0 and self.duration_days * 86_400 < window:
            out.append("duration_days is shorter than one gamma window")
        for i, imp in enumerate(self.implants):
            if imp.group_size < 2:
                out.append(f"implant {i}: group_size must be >= 2 (got {imp.group_size})")
            if imp.events <= 0:
                out.append(f"implant {i}: events must be positive (got {imp.events})")
            if imp.within_window_seconds < 0:
                out.append(f"implant {i}: within_window_seconds must be >= 0")
            elif imp.within_window_seconds >= window:
                out.append(
                    f"implant {i}: within_window_seconds ({imp.within_window_seconds}) "
                    f"must be < gamma window ({window} s)"
                )
        return out

    def validate(self) -> None:
        problems = self.problems()
        if problems:
            raise ScenarioError("; ".join(problems))


def _zipf_p(n: int, s: float) -> np.ndarray:
    w = 1.0 / np.arange(1, n + 1) ** s
    return w / w.sum()


class _Builder:
    def __init__(self, cfg: ScenarioConfig):
        self.cfg = cfg
        self.rng = np.random.default_rng(cfg.seed)
        self.posts: list[Post] = []
        self._next = 0
        self.end = cfg.start + cfg.duration_days * 86_400
        n = cfg.vocab_size
        self.p = _zipf_p(n, cfg.zipf_exponent)
        self.words = self._make_words(max(TEXT_WORDS, n))
        self.p_words = _zipf_p(len(self.words), TEXT_EXPONENT)
        self.tags = [f"{self.words[i]}{i}" for i in range(n)]
        self.domains = [f"{self.words[i]}.example" for i in range(n)]

    def _make_words(self, n: int) -> list[str]:
        words, seen = [], set()
        while len(words) < n:
            k = int(self.rng.integers(1, 4))
            w = "".join(
                _ONSETS[int(self.rng.integers(len(_ONSETS)))]
                + _VOWELS[int(self.rng.integers(len(_VOWELS)))]
                + _CODAS[int(self.rng.integers(len(_CODAS)))]
                for _ in range(k)
            )
            if w not in seen:
                seen.add(w)
                words.append(w)
        return words

    def new_id(self) -> str:
        self._next += 1
        return f"p{self._next:07d}"

    def add(self, **kw) -> Post:
        post = Post(post_id=self.new_id(), **kw)
        self.posts.append(post)
        return post

    def sentence(self, lo: int = 6, hi: int = 14) -> str:
        k = int(self.rng.integers(lo, hi + 1))
        idx = self.rng.choice(len(self.words), size=k, p=self.p_words)
        return " ".join(self.words[int(i)] for i in idx)

    def zipf_pick(self, items: Sequence[str], k: int) -> list[str]:
        if k <= 0:
            return []
        idx = self.rng.choice(len(items), size=k, p=self.p)
        return sorted({items[int(i)] for i in idx})

    def url(self) -> str:
        d = self.zipf_pick(self.domains, 1)[0]
        return f"https://{d}/{int(self.rng.integers(0, 10_000))}"


def _background(b: _Builder, accounts: Sequence[str]) -> list[Post]:
    """Organic traffic; returns the original posts available for reposting."""
    cfg = b.cfg
    lam = cfg.background_rate * cfg.duration_days
    counts = b.rng.poisson(lam, size=len(accounts))
    events = []
    for acct, n in zip(accounts, counts):
        for t in b.rng.integers(cfg.start, b.end, size=int(n)):
            events.append((int(t), acct))
    events.sort()

    originals: list[Post] = []
    for t, acct in events:
        roll = float(b.rng.random())
        if originals and roll < REPOST_SHARE:
            src = originals[int(b.rng.integers(0, len(originals)))]
            if src.account_id != acct:
                b.add(account_id=acct, timestamp=t, text=f"RT @{src.account_id}: {src.text}",
                      reposted_post_id=src.post_id, reposted_account_id=src.account_id,
                      hashtags=src.hashtags, urls=src.urls)
                continue
        mentions = ()
        if float(b.rng.random()) < MENTION_PROB:
            other = accounts[int(b.rng.integers(0, len(accounts)))]
            if other != acct:
                mentions = (other,)
        tags = tuple(b.zipf_pick(b.tags, int(b.rng.integers(0, 3))))
        urls = (b.url(),) if float(b.rng.random()) < URL_PROB else ()
        reply_to = None
        if originals and float(b.rng.random()) < REPLY_SHARE:
            reply_to = originals[int(b.rng.integers(0, len(originals)))]
        post = b.add(
            account_id=acct, timestamp=t, text=b.sentence(), mentions=mentions,
            hashtags=tags, urls=urls,
            replied_to_post_id=reply_to.post_id if reply_to else None,
            conversation_root_id=(reply_to.conversation_root_id or reply_to.post_id) if reply_to else None,
        )
        originals.append(post)
    return originals


def _episode_start(b: _Builder, spread: int) -> int:
    """Start time such that [start, start + spread] sits inside one window."""
    w = b.cfg.gamma_minutes * 60
    first = -(-b.cfg.start // w)
    last = (b.end - w) // w
    if last < first:
        raise ScenarioError("duration too short for a whole gamma window")
    win = int(b.rng.integers(first, last + 1))
    if b.cfg.straddle:
        # first half of the spread before the boundary, second half after
        return max(b.cfg.start, (win + 1) * w - spread // 2 - 1)
    return win * w + int(b.rng.integers(0, w - spread))


def _implant(b: _Builder, gi: int, spec: ImplantSpec, members: list[str], background: Sequence[str]) -> None:
    target = spec.target or background[int(b.rng.integers(0, len(background)))]
    message = b.sentence(8, 12)
    for _ in range(spec.events):
        start = _episode_start(b, spec.within_window_seconds)
        times = [start + int(x) for x in b.rng.integers(0, spec.within_window_seconds + 1, size=len(members))]
        lead = max(b.cfg.start, start - int(b.rng.integers(60, 1800)))

        if spec.strategy is Strategy.BOOST:
            src = b.add(account_id=target, timestamp=lead, text=b.sentence())
            for m, t in zip(members, times):
                b.add(account_id=m, timestamp=t, text=f"RT @{target}: {src.text}",
                      reposted_post_id=src.post_id, reposted_account_id=target)
        elif spec.strategy is Strategy.BOOST_ACCOUNT:
            for m, t in zip(members, times):
                src = b.add(account_id=target, timestamp=lead, text=b.sentence())
                b.add(account_id=m, timestamp=t, text=f"RT @{target}: {src.text}",
                      reposted_post_id=src.post_id, reposted_account_id=target)
        elif spec.strategy is Strategy.POLLUTE:
            tag = f"g{gi}x{b.new_id()}"
            for m, t in zip(members, times):
                b.add(account_id=m, timestamp=t, text=f"{message} #{tag}", hashtags=(tag,))
        elif spec.strategy is Strategy.BULLY:
            root = b.add(account_id=target, timestamp=lead, text=b.sentence())
            repliers = set(b.rng.permutation(len(members))[: len(members) // 2].tolist())
            for j, (m, t) in enumerate(zip(members, times)):
                if j in repliers:
                    b.add(account_id=m, timestamp=t, text=f"@{target} {message}", mentions=(target,),
                          replied_to_post_id=root.post_id, conversation_root_id=root.post_id)
                else:
                    b.add(account_id=m, timestamp=t, text=f"@{target} {message}", mentions=(target,))


def generate(cfg: ScenarioConfig) -> tuple[list[Post], dict[str, str]]:
    """Build a corpus and its ground truth (implanted account -> group id).

    Implanted accounts also get organic activity unless
    ``cfg.implant_background`` is False.  Output posts
    are sorted by (timestamp, post_id).
    """
    cfg.validate()
    b = _Builder(cfg)
    background = [f"bg{i:05d}" for i in range(cfg.background_accounts)]
    groups = [[f"g{gi}m{j:03d}" for j in range(spec.group_size)] for gi, spec in enumerate(cfg.implants)]
    truth = {m: f"g{gi}" for gi, members in enumerate(groups) for m in members}

    organic = background + ([m for g in groups for m in g] if cfg.implant_background else [])
    _background(b, organic)
    for gi, (spec, members) in enumerate(zip(cfg.implants, groups)):
        _implant(b, gi, spec, members, background)

    posts = sorted(b.posts, key=lambda p: (p.timestamp, p.post_id))
    return posts, truth


def write_truth(truth: Mapping[str, str], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("account_id,group_id\n")
        for acct in sorted(truth):
            fh.write(f"{acct},{truth[acct]}\n")


def read_truth(path) -> dict[str, str]:
    with open(path, encoding="utf-8", newline="") as fh:
        return {row["account_id"]: row["group_id"] for row in csv.DictReader(fh)}


@dataclass
class PairScore:
    precision: float | None
    recall: float | None
    f1: float | None
    true_positive_pairs: int
    predicted_pairs: int
    truth_pairs: int


def _pairs(n: int) -> int:
    return n * (n - 1) // 2


def score_detection(truth: Mapping[str, str], groups: Iterable[Collection[str]]) -> PairScore:
    """Pairwise precision/recall/F1 of detected groups against truth groups.

    A pair is a true pair when both accounts share a truth group, predicted
    when both share a detected group.  Accounts missing from ``truth`` never
    form true pairs.  Precision is None with no predicted pairs, recall None
    with no true pairs.
    """
    truth_sizes: dict[str, int] = {}
    for g in truth.values():
        truth_sizes[g] = truth_sizes.get(g, 0) + 1
    truth_pairs = sum(_pairs(n) for n in truth_sizes.values())

    predicted = tp = 0
    for members in groups:
        members = set(members)
        predicted += _pairs(len(members))
        overlap: dict[str, int] = {}
        for a in members:
            if a in truth:
                overlap[truth[a]] = overlap.get(truth[a], 0) + 1
        tp += sum(_pairs(n) for n in overlap.values())

    precision = tp / predicted if predicted else None
    recall = tp / truth_pairs if truth_pairs else None
    if precision is None and recall is None:
        f1 = None
    elif not precision or not recall:
        f1 = 0.0
    else:
        f1 = 2 * precision * recall / (precision + recall)
    return PairScore(precision, recall, f1, tp, predicted, truth_pairs)


def boost_acceptance_config(seed: int = 7) -> ScenarioConfig:
    """500 background accounts at 0.3 posts/day, five BOOST groups of sizes 3-8."""
    sizes = (3, 4, 5, 6, 8)
    return ScenarioConfig(
        seed=seed,
        duration_days=14,
        background_accounts=500,
        background_rate=0.3,
        gamma_minutes=15,
        implants=[ImplantSpec(Strategy.BOOST, s, 10, within_window_seconds=300) for s in sizes],
    )

