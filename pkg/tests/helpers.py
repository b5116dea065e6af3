import json
import random

from lcnhcc.interactions import Post
from lcnhcc.lcn import MergedLcn


def make_post(post_id, account, ts, **kw):
    for name in ("mentions", "hashtags", "urls"):
        if name in kw:
            kw[name] = tuple(kw[name])
    return Post(post_id=post_id, account_id=account, timestamp=ts, **kw)


def record_line(**fields):
    return json.dumps(fields)


def random_merged(rng: random.Random, n: int, p: float, max_w: int = 20) -> MergedLcn:
    weights = {}
    names = [f"v{i:03d}" for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                weights[(names[i], names[j])] = rng.randint(1, max_w)
    return MergedLcn(weights)


def random_corpus(rng, n_posts=50, span=3 * 900):
    accounts = [f"acc{i}" for i in range(8)]
    posts = []
    for i in range(n_posts):
        kw = {}
        if rng.random() < 0.4:
            kw["reposted_post_id"] = rng.choice(["T1", "T2", "T3"])
            kw["reposted_account_id"] = rng.choice(["S1", "S2"])
        elif rng.random() < 0.3:
            kw["conversation_root_id"] = rng.choice(["R1", "R2"])
            kw["replied_to_post_id"] = "X"
        kw["hashtags"] = rng.sample(["h1", "h2", "H1", "h3"], rng.randint(0, 2))
        kw["mentions"] = rng.sample(["m1", "m2", "acc1"], rng.randint(0, 2))
        kw["urls"] = rng.sample(["http://a.com/x", "HTTP://A.com/x/", "http://b.org"], rng.randint(0, 2))
        posts.append(make_post(f"p{i}", rng.choice(accounts), 1_000_000 * 900 + rng.randint(0, span), **kw))
    return posts
