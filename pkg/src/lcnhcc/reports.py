"""File writers for detection and analysis outputs.

CSV files use ``csv`` with ``\\n`` line endings and a header row; floats
are written with ``repr`` so reruns are byte-identical.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Sequence

import networkx as nx

from . import analysis
from .hcc import Hcc
from .lcn import MergedLcn
from .linkage import InferredLink, sorted_criteria
from .interactions import Post


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def write_json(path, data) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(data, fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")


def write_links(links: Iterable[InferredLink], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("window\tcriterion\tkey\tu\tv\tweight\n")
        for link in links:
            fh.write(link.to_tsv())
            fh.write("\n")


def read_links(path) -> list[InferredLink]:
    with open(path, encoding="utf-8") as fh:
        next(fh, None)
        return [InferredLink.from_tsv(line) for line in fh if line.strip()]


def hcc_summary(hccs: Sequence[Hcc], merged: MergedLcn) -> list[dict]:
    out = []
    for i, h in enumerate(hccs):
        per: dict = {}
        for u, v, _ in h.internal_edges:
            for c, w in merged.breakdown.get((u, v), {}).items():
                per[c] = per.get(c, 0) + w
        out.append({
            "hcc_id": i,
            "size": len(h.members),
            "mew": h.mew,
            "edge_count": len(h.internal_edges),
            "criterion_breakdown": {c.value: per[c] for c in sorted_criteria(per)},
            "members": list(h.members),
        })
    return out


def write_membership(groups: Sequence[Iterable[str]], path, id_column: str = "hcc_id") -> None:
    write_csv(path, (id_column, "account_id"),
              ((i, a) for i, members in enumerate(groups) for a in sorted(members)))


def read_membership(path) -> list[list[str]]:
    groups: dict[int, list[str]] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        next(reader, None)
        for row in reader:
            if row:
                groups.setdefault(int(row[0]), []).append(row[1])
    if not groups:
        return []
    return [sorted(groups.get(i, [])) for i in range(max(groups) + 1)]


def write_group_reports(
    out: Path,
    prefix: str,
    groups: Sequence[Sequence[str]],
    posts: Sequence[Post],
    links: Sequence[InferredLink] | None = None,
    binary: bool = False,
    normalize: bool = True,
    buckets: Sequence[str] = ("daily", "weekly"),
) -> dict:
    """Write every per-group report for one set of groups; return a summary."""
    sim = analysis.similarity_matrix(groups, posts, binary=binary, normalize=normalize)
    write_csv(out / f"{prefix}similarity.csv", [a for _, a in sim.order], sim.values.tolist())
    write_csv(out / f"{prefix}similarity_index.csv", ("row", "hcc_id", "account_id"),
              ((r, g, a) for r, (g, a) in enumerate(sim.order)))

    reports = [analysis.feature_entropy(g, posts, i) for i, g in enumerate(groups)]
    write_csv(out / f"{prefix}entropy.csv", ("hcc_id", "feature", "entropy", "distinct_values", "total_uses"),
              ((r.group, f, s.entropy, s.distinct_values, s.total_uses)
               for r in reports for f, s in r.features.items()))

    ratios = [analysis.internal_ratios(g, posts) for g in groups]
    write_csv(out / f"{prefix}ratios.csv", ("hcc_id", "size", "irr", "imr"),
              ((i, len(g), irr, imr) for i, (g, (irr, imr)) in enumerate(zip(groups, ratios))))

    for bucket in buckets:
        series = analysis.temporal_activity(groups, posts, bucket)
        rows = []
        for b in range(len(series.buckets)):
            stamp = series.iso(b)
            rows.extend((stamp, i, series.per_group[i][b]) for i in range(len(groups)))
            rows.append((stamp, "mean", series.mean[b]))
        write_csv(out / f"{prefix}activity_{bucket}.csv", ("bucket_start", "hcc_id", "value"), rows)

    co_rows = []
    for i, g in enumerate(groups):
        graph = analysis.hashtag_cooccurrence(g, posts)
        for a, b, d in sorted(graph.edges(data=True), key=lambda e: tuple(sorted(e[:2]))):
            a, b = sorted((a, b))
            co_rows.append((i, a, b, d["weight"]))
    write_csv(out / f"{prefix}hashtag_cooccurrence.csv", ("hcc_id", "tag_a", "tag_b", "weight"), co_rows)

    if links is not None:
        reasons = analysis.expand_reasons(groups, links)
        nx.write_graphml(reasons, out / f"{prefix}reasons.graphml")
        write_csv(out / f"{prefix}reasons.csv", ("hcc_id", "account_id", "criterion", "key", "weight"),
                  ((reasons.nodes[a]["hcc"], a, reasons.nodes[r]["criterion"], reasons.nodes[r]["key"], d["weight"])
                   for a, r, d in _account_reason_edges(reasons)))

    intra, inter = sim.block_means() if groups else (None, None)
    irrs = [r[0] for r in ratios if r[0] is not None]
    imrs = [r[1] for r in ratios if r[1] is not None]
    return {
        "groups": len(groups),
        "accounts": sum(len(g) for g in groups),
        "mean_entropy": analysis.group_entropy_means(reports),
        "similarity_intra_mean": _nan_to_none(intra),
        "similarity_inter_mean": _nan_to_none(inter),
        "mean_irr": sum(irrs) / len(irrs) if irrs else None,
        "mean_imr": sum(imrs) / len(imrs) if imrs else None,
    }


def _nan_to_none(x):
    return None if x is None or x != x else x


def _account_reason_edges(g: nx.Graph):
    for u, v, d in g.edges(data=True):
        a, r = (u, v) if g.nodes[u]["kind"] == "account" else (v, u)
        yield a, r, d
