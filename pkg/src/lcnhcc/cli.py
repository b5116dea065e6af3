"""Command line entry point: ``lcnhcc {ingest,detect,analyze,synth,score}``.

Exit codes: 0 success, 2 usage or configuration error, 3 fatal data error.
Every flag can also be set in a ``--config`` file (key = value per line, or
a JSON manifest from an earlier run); flags given on the command line win.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .config import ConfigFileError, load_config, load_scenario, parse_bool, scenario_to_kv
from .hcc import METHODS
from .interactions import iter_interactions, read_corpus, write_corpus
from .linkage import DEFAULT_MAX_GROUP_SIZE, ConfigError, Criterion, sorted_criteria
from .pipeline import corpus_stats, detect
from .reports import (
    hcc_summary,
    read_links,
    read_membership,
    write_group_reports,
    write_json,
    write_links,
    write_membership,
)
from .synth import ScenarioError, generate, read_truth, score_detection, write_truth

log = logging.getLogger("lcnhcc")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 2, 3


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


def _positive_int(text) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def _unit_interval(text) -> float:
    value = float(text)
    if not (0 < value <= 1):
        raise argparse.ArgumentTypeError(f"must be in (0, 1], got {text}")
    return value


def _criteria(text) -> str:
    try:
        return ",".join(c.value for c in sorted_criteria(Criterion.parse_list(text)))
    except ConfigError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _weights(text) -> str:
    """``co_retweet=1,co_hashtag=0.5`` -> normalised string; validated here."""
    if not text:
        return ""
    out = {}
    for item in text.split(","):
        name, sep, value = item.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError(f"expected criterion=weight, got {item!r}")
        try:
            crit = Criterion(name.strip().lower())
            out[crit] = float(value)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad criterion weight {item!r}") from None
    return ",".join(f"{c.value}={out[c]!r}" for c in sorted_criteria(out))


def _bool_flag(p: argparse.ArgumentParser, name: str, default: bool, help: str) -> None:
    p.add_argument(name, type=parse_bool, nargs="?", const=True, default=default, metavar="BOOL", help=help)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lcnhcc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    parser.subcommands = sub.choices

    p = sub.add_parser("ingest", help="validate a corpus and optionally dump its interactions")
    p.add_argument("--config")
    p.add_argument("--input", help="newline-delimited JSON post records")
    p.add_argument("--dump-interactions", metavar="PATH", help="TSV of interactions ('-' for stdout)")

    p = sub.add_parser("detect", help="build the LCN and extract HCCs")
    p.add_argument("--config")
    p.add_argument("--input")
    p.add_argument("--out", help="output directory")
    p.add_argument("--gamma", type=_positive_int, default=15, help="window size in minutes")
    p.add_argument("--criteria", type=_criteria, default="co_retweet")
    p.add_argument("--max-group-size", type=int, default=DEFAULT_MAX_GROUP_SIZE,
                   help="skip key groups with more accounts (0 = no cap)")
    p.add_argument("--criterion-weights", type=_weights, default="",
                   help="optional multipliers, e.g. co_retweet=1,co_hashtag=0.5")
    p.add_argument("--method", choices=METHODS, default="fsa_v")
    p.add_argument("--theta", type=_unit_interval, default=0.3)
    p.add_argument("--threshold-fraction", type=_unit_interval, default=0.9)
    p.add_argument("--seed", type=int, default=0)
    _bool_flag(p, "--final-filter-strict", True, "require MEW > global mean (false: >=)")
    p.add_argument("--jobs", type=_positive_int, default=os.cpu_count() or 1)
    p.add_argument("--dump-lcn", metavar="PATH", help="edge list path (default OUT/lcn.tsv)")
    _bool_flag(p, "--graphml", False, "also write the merged LCN as GraphML")
    p.add_argument("--dump-interactions", metavar="PATH")

    p = sub.add_parser("analyze", help="validation reports over detected HCCs")
    p.add_argument("--config")
    p.add_argument("--run", help="directory written by 'detect'")
    p.add_argument("--out", help="report directory (default RUN/analysis)")
    _bool_flag(p, "--random-baseline", False, "also report on random non-HCC groups")
    p.add_argument("--seed", type=int, help="random baseline seed (default: the detect seed)")
    _bool_flag(p, "--binary-ngrams", False, "n-gram presence instead of counts")
    _bool_flag(p, "--normalize-text", True, "lowercase and collapse whitespace before n-grams")
    p.add_argument("--buckets", default="daily,weekly", help="comma list of daily, weekly")

    p = sub.add_parser("synth", help="generate a labelled synthetic corpus")
    p.add_argument("--config", help="scenario file")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int, help="override the scenario seed")

    p = sub.add_parser("score", help="pairwise precision/recall of HCCs against truth")
    p.add_argument("--config")
    p.add_argument("--truth", help="truth.csv from 'synth'")
    p.add_argument("--hccs", help="hccs.csv from 'detect'")
    p.add_argument("--out", help="write the scores as JSON here as well")
    return parser


def parse_args(argv: list[str] | None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "synth" or not getattr(args, "config", None):
        return args
    sub = parser.subcommands[args.command]
    try:
        kv = load_config(args.config)
    except OSError as exc:
        raise UsageError(f"--config: {exc}") from None
    known = {a.dest for a in sub._actions}
    defaults = {}
    for key, values in kv.items():
        if key == "config":
            continue
        if key not in known:
            raise UsageError(f"--config: unknown key {key!r}")
        defaults[key] = values[-1]
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def _require(args, *names):
    for name in names:
        if not getattr(args, name):
            raise UsageError(f"--{name.replace('_', '-')} is required")


def _load_posts(path):
    if not Path(path).is_file():
        raise UsageError(f"input not found: {path}")
    malformed: list[tuple[int, str]] = []
    try:
        posts = read_corpus(path, malformed)
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    return posts, malformed


def _dump_interactions(posts, path) -> None:
    lines = (it.to_tsv() + "\n" for it in iter_interactions(posts))
    if path == "-":
        sys.stdout.writelines(lines)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.writelines(lines)


def cmd_ingest(args) -> int:
    _require(args, "input")
    posts, malformed = _load_posts(args.input)
    if args.dump_interactions:
        _dump_interactions(posts, args.dump_interactions)
    stats = corpus_stats(posts)
    stats["malformed_lines"] = len(malformed)
    print(json.dumps(stats, sort_keys=True), file=sys.stderr if args.dump_interactions == "-" else sys.stdout)
    return EXIT_OK


def run_config(args) -> dict:
    return {
        "input": args.input,
        "out": args.out,
        "gamma": args.gamma,
        "criteria": args.criteria,
        "max_group_size": args.max_group_size,
        "criterion_weights": args.criterion_weights,
        "method": args.method,
        "theta": args.theta,
        "threshold_fraction": args.threshold_fraction,
        "seed": args.seed,
        "final_filter_strict": args.final_filter_strict,
        "jobs": args.jobs,
        "dump_lcn": args.dump_lcn,
        "graphml": args.graphml,
        "dump_interactions": args.dump_interactions,
    }


def cmd_detect(args) -> int:
    _require(args, "input", "out")
    posts, malformed = _load_posts(args.input)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    criteria = Criterion.parse_list(args.criteria)
    multipliers = None
    if args.criterion_weights:
        multipliers = {Criterion(k): float(v) for k, v in
                       (item.split("=") for item in args.criterion_weights.split(","))}
    det = detect(
        posts, criteria, args.gamma, args.method, theta=args.theta,
        fraction=args.threshold_fraction, seed=args.seed, strict=args.final_filter_strict,
        max_group_size=args.max_group_size or None, multipliers=multipliers, jobs=args.jobs,
    )

    if args.dump_interactions:
        _dump_interactions(posts, args.dump_interactions)
    lcn_path = Path(args.dump_lcn) if args.dump_lcn else out / "lcn.tsv"
    det.merged.write_edge_list(lcn_path)
    outputs = [str(lcn_path), str(out / "links.tsv"), str(out / "hccs.csv"), str(out / "hccs.json")]
    if args.graphml:
        det.merged.write_graphml(lcn_path.with_suffix(".graphml"))
        outputs.append(str(lcn_path.with_suffix(".graphml")))
    write_links(det.links, out / "links.tsv")
    write_membership([h.members for h in det.hccs], out / "hccs.csv")
    write_json(out / "hccs.json", hcc_summary(det.hccs, det.merged))

    stats = corpus_stats(posts)
    stats["malformed_lines"] = len(malformed)
    write_json(out / "manifest.json", {
        "command": "detect",
        "version": __version__,
        "config": run_config(args),
        "corpus": stats,
        "counts": {
            "interactions": len(det.interactions),
            "links": len(det.links),
            "lcn_vertices": len(det.merged.vertices),
            "lcn_edges": len(det.merged),
            "hccs": len(det.hccs),
            "hcc_accounts": sum(len(h) for h in det.hccs),
        },
        "outputs": outputs,
    })
    log.info("%d links, %d LCN edges, %d HCCs", len(det.links), len(det.merged), len(det.hccs))
    return EXIT_OK


def cmd_analyze(args) -> int:
    _require(args, "run")
    run = Path(args.run)
    needed = [run / "manifest.json", run / "hccs.csv", run / "links.tsv"]
    missing = [str(p) for p in needed if not p.is_file()]
    if missing:
        raise UsageError(f"missing detect outputs: {', '.join(missing)}")
    manifest = json.loads((run / "manifest.json").read_text(encoding="utf-8"))
    posts, _ = _load_posts(manifest["config"]["input"])
    groups = read_membership(run / "hccs.csv")
    links = read_links(run / "links.tsv")
    buckets = [b.strip() for b in args.buckets.split(",") if b.strip()]
    for b in buckets:
        if b not in ("daily", "weekly"):
            raise UsageError(f"--buckets: unknown bucket {b!r}")

    out = Path(args.out) if args.out else run / "analysis"
    out.mkdir(parents=True, exist_ok=True)
    opts = dict(binary=args.binary_ngrams, normalize=args.normalize_text, buckets=buckets)
    summary = {"hcc": write_group_reports(out, "", groups, posts, links, **opts)}

    if args.random_baseline:
        from .analysis import InsufficientPoolError, random_baseline

        seed = args.seed if args.seed is not None else manifest["config"].get("seed", 0)
        try:
            baseline = random_baseline({p.account_id for p in posts}, groups, seed)
        except InsufficientPoolError as exc:
            raise DataError(str(exc)) from None
        baseline = [sorted(g) for g in baseline]
        write_membership(baseline, out / "random_groups.csv", "group_id")
        summary["random"] = write_group_reports(out, "random_", baseline, posts, links, **opts)
        summary["random"]["seed"] = seed
    write_json(out / "summary.json", summary)
    return EXIT_OK


def cmd_synth(args) -> int:
    _require(args, "config", "out")
    try:
        cfg = load_scenario(args.config)
    except OSError as exc:
        raise UsageError(f"--config: {exc}") from None
    if args.seed is not None:
        cfg.seed = args.seed
    try:
        posts, truth = generate(cfg)
    except ScenarioError as exc:
        raise UsageError(str(exc)) from None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_corpus(posts, out / "corpus.jsonl")
    write_truth(truth, out / "truth.csv")
    (out / "scenario.conf").write_text(scenario_to_kv(cfg), encoding="utf-8")
    log.info("%d posts, %d implanted accounts", len(posts), len(truth))
    return EXIT_OK


def cmd_score(args) -> int:
    _require(args, "truth", "hccs")
    for path in (args.truth, args.hccs):
        if not Path(path).is_file():
            raise UsageError(f"not found: {path}")
    score = score_detection(read_truth(args.truth), read_membership(args.hccs))
    data = {
        "precision": score.precision,
        "recall": score.recall,
        "f1": score.f1,
        "true_positive_pairs": score.true_positive_pairs,
        "predicted_pairs": score.predicted_pairs,
        "truth_pairs": score.truth_pairs,
    }
    if args.out:
        write_json(args.out, data)
    print(json.dumps(data, sort_keys=True))
    return EXIT_OK


COMMANDS = {
    "ingest": cmd_ingest,
    "detect": cmd_detect,
    "analyze": cmd_analyze,
    "synth": cmd_synth,
    "score": cmd_score,
}


def main(argv: list[str] | None = None) -> int:
    try:
        args = parse_args(argv)
    except (UsageError, ConfigFileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ConfigFileError, ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
