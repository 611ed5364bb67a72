"""Command-line pipeline: retrofit, evaluate, and neighborhood inspection.

Exit codes: 0 on success, 1 on any validation or parse error, 2 on a
numerical abort during training. Diagnostics go to stderr; data goes to
files or stdout.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

import emofit
from emofit.embedding_io import FORMATS, VectorSpace, load_embeddings, save_embeddings
from emofit.evaluation import (
    OPPOSITE_CATEGORY_PAIRS,
    EvaluationComparison,
    evaluate,
    load_taxonomy,
    relative_change,
    report_space,
    write_report_csv,
    write_report_json,
)
from emofit.geometry import (
    compute_neighborhoods,
    cosine_distance,
    load_neighbor_cache,
    save_neighbor_cache,
)
from emofit.lexicon import EmotionWheel, build_constraints, parse_nrc_lexicon
from emofit.trainer import (
    MODES,
    VSP_SCOPES,
    NumericalInstabilityError,
    TrainingConfig,
    train,
    write_epoch_log,
)

logger = logging.getLogger("emofit")


class CliError(Exception):
    """Argument or validation failure that should exit with status 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2; the contract wants 1
        raise CliError(message)


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(path, manifest: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def load_manifest(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def build_parser() -> _Parser:
    parser = _Parser(prog="emofit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"emofit {emofit.__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="progress messages on stderr")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("retrofit", help="fit emotional constraints into a vector space")
    p.add_argument("--input", required=True, help="embedding file to retrofit")
    p.add_argument("--format", choices=FORMATS, default="glove", help="embedding text format")
    p.add_argument("--lexicon", required=True, help="word-level emotion lexicon TSV")
    p.add_argument("--output", required=True, help="where to write the retrofitted vectors")
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--radius", type=float, default=0.2, help="neighborhood cosine-distance radius")
    p.add_argument("--lr", type=float, default=0.05, help="learning rate")
    p.add_argument("--seed", type=int, default=0, help="shuffle seed")
    p.add_argument("--freeze-anchors", action="store_true", help="keep emotion-token vectors fixed")
    p.add_argument("--vsp-scope", choices=VSP_SCOPES, default="constrained",
                   help="rows whose neighborhoods are preserved")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--mode", choices=MODES, default="sgd",
                   help="per-constraint updates or full-batch steps")
    p.add_argument("--pr-weight", type=float, default=1.0)
    p.add_argument("--nr-weight", type=float, default=1.0)
    p.add_argument("--vsp-weight", type=float, default=1.0)
    p.add_argument("--lowercase", action="store_true", help="lowercase tokens at load time")
    p.add_argument("--wheel", help="JSON override for the opposite-emotion pairs")
    p.add_argument("--cache", help="neighborhood cache file (created when absent)")
    p.add_argument("--checkpoint-every", type=int, default=0, metavar="K",
                   help="write intermediate vectors every K epochs")
    p.add_argument("--log", help="per-epoch objective CSV path")
    p.add_argument("--manifest", help="run manifest JSON path")
    p.set_defaults(func=cmd_retrofit)

    p = sub.add_parser("evaluate", help="emotional-similarity metrics, before vs. after")
    p.add_argument("--before", help="original embedding file")
    p.add_argument("--after", help="retrofitted embedding file")
    p.add_argument("--vectors", help="score a single space instead of a before/after pair")
    p.add_argument("--format", choices=FORMATS, default="glove")
    p.add_argument("--taxonomy", help="taxonomy JSON (default: built-in three-level grouping)")
    p.add_argument("--report", help="report JSON path")
    p.add_argument("--csv", help="flat metric table CSV path")
    p.add_argument("--model", default="model", help="model label for the CSV table")
    p.add_argument("--lowercase", action="store_true", help="lowercase tokens at load time")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("neighbors", help="inspect the epsilon-ball neighborhood graph")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=FORMATS, default="glove")
    p.add_argument("--radius", type=float, default=0.2)
    p.add_argument("--word", help="print this token's neighbors")
    p.add_argument("--stats", action="store_true", help="print graph statistics")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--lowercase", action="store_true")
    p.set_defaults(func=cmd_neighbors)
    return parser


def _timed(timings: dict, key: str, fn, *args, **kwargs):
    t0 = time.perf_counter()
    result = fn(*args, **kwargs)
    timings[key] = round(time.perf_counter() - t0, 4)
    return result


def _load_graph(args, space, config, scope, timings):
    if args.cache and Path(args.cache).exists():
        try:
            graph = _timed(timings, "neighborhoods_s", load_neighbor_cache,
                           args.cache, space, config.radius)
            logger.info("loaded neighborhood cache %s", args.cache)
            return graph
        except ValueError as exc:
            logger.info("recomputing neighborhoods: %s", exc)
    graph = _timed(timings, "neighborhoods_s", compute_neighborhoods,
                   space, config.radius, scope=scope, workers=config.threads)
    if args.cache:
        save_neighbor_cache(args.cache, graph, space)
    return graph


def cmd_retrofit(args) -> int:
    total0 = time.perf_counter()
    timings: dict[str, float] = {}
    config = TrainingConfig(
        epochs=args.epochs,
        learning_rate=args.lr,
        radius=args.radius,
        seed=args.seed,
        freeze_anchors=args.freeze_anchors,
        vsp_scope=args.vsp_scope,
        threads=args.threads,
        mode=args.mode,
        pr_weight=args.pr_weight,
        nr_weight=args.nr_weight,
        vsp_weight=args.vsp_weight,
    )
    if args.checkpoint_every < 0:
        raise CliError("--checkpoint-every must be non-negative")

    space = _timed(timings, "load_s", load_embeddings,
                   args.input, args.format, lowercase=args.lowercase)
    logger.info("loaded %d vectors of dimension %d", len(space), space.dim)
    wheel = EmotionWheel.from_json(args.wheel) if args.wheel else EmotionWheel.plutchik()
    entries = _timed(timings, "lexicon_s", parse_nrc_lexicon, args.lexicon)
    constraints = _timed(timings, "constraints_s", build_constraints, entries, wheel, space)
    st = constraints.stats
    logger.info("constraints: %d attract, %d repel (%d lexicon words out of vocabulary)",
                st.positive_pairs, st.negative_pairs, st.words_oov)

    scope = constraints.constrained_rows() if config.vsp_scope == "constrained" else None
    graph = _load_graph(args, space, config, scope, timings)
    logger.info("neighborhood graph: %d edges at radius %g", graph.edge_count, config.radius)

    def checkpoint(epoch: int, W: np.ndarray, _entry) -> None:
        if args.checkpoint_every and epoch % args.checkpoint_every == 0:
            ckpt = VectorSpace(space.tokens, W.astype(np.float32))
            save_embeddings(ckpt, f"{args.output}.epoch{epoch:03d}", args.format)

    t0 = time.perf_counter()
    retrofitted, log = train(space, constraints, graph, config,
                             epoch_callback=checkpoint if args.checkpoint_every else None)
    timings["train_s"] = round(time.perf_counter() - t0, 4)
    save_embeddings(retrofitted, args.output, args.format)
    if args.log:
        write_epoch_log(args.log, log)
    logger.info("objective %g -> %g over %d epochs",
                log[0].total if log else float("nan"), log[-1].total if log else float("nan"),
                len(log))

    if args.manifest:
        timings["total_s"] = round(time.perf_counter() - total0, 4)
        manifest = {
            "tool": "emofit",
            "version": emofit.__version__,
            "command": "retrofit",
            "config": {
                "input": args.input,
                "format": args.format,
                "lexicon": args.lexicon,
                "output": args.output,
                "epochs": config.epochs,
                "radius": config.radius,
                "lr": config.learning_rate,
                "seed": config.seed,
                "freeze_anchors": config.freeze_anchors,
                "vsp_scope": config.vsp_scope,
                "threads": config.threads,
                "mode": config.mode,
                "pr_weight": config.pr_weight,
                "nr_weight": config.nr_weight,
                "vsp_weight": config.vsp_weight,
                "lowercase": args.lowercase,
                "wheel": args.wheel,
                "log": args.log,
            },
            "inputs": {
                "input": {"path": args.input, "sha256": _sha256(args.input)},
                "lexicon": {"path": args.lexicon, "sha256": _sha256(args.lexicon)},
            },
            "stats": {
                "vocabulary": len(space),
                "dim": space.dim,
                "duplicate_lines_skipped": space.load_report.duplicates_skipped,
                "lexicon_records": st.records_seen,
                "lexicon_records_flagged": st.records_flagged,
                "attract_pairs": st.positive_pairs,
                "repel_pairs": st.negative_pairs,
                "lexicon_words_oov": st.words_oov,
                "emotion_anchors_missing": list(st.anchors_missing),
                "graph_edges": graph.edge_count,
                "scope_rows": int(len(scope)) if scope is not None else len(space),
                "length_normalized": False,
                "objective_first_epoch": log[0].total,
                "objective_last_epoch": log[-1].total,
            },
            "timings": timings,
        }
        write_manifest(args.manifest, manifest)
    return 0


def _print_comparison(comparison: EvaluationComparison) -> None:
    print(f"taxonomy: {comparison.taxonomy_source}")
    if comparison.dropped_words:
        print("dropped multiword entries: " + ", ".join(comparison.dropped_words))
    print(f"{'metric':<28}{'before':>10}{'after':>10}{'delta':>10}{'change':>9}")
    for key, (b, a) in comparison.metric_pairs().items():
        rel = relative_change(b, a)
        rel_s = "n/a" if rel is None else f"{rel:+.1f}%"
        print(f"{key:<28}{b:>10.4f}{a:>10.4f}{a - b:>+10.4f}{rel_s:>9}")


def cmd_evaluate(args) -> int:
    if args.vectors and (args.before or args.after):
        raise CliError("--vectors cannot be combined with --before/--after")
    if not args.vectors and not (args.before and args.after):
        raise CliError("provide --before and --after, or --vectors")
    taxonomy = load_taxonomy(args.taxonomy)

    if args.vectors:
        space = load_embeddings(args.vectors, args.format, lowercase=args.lowercase)
        report = report_space(space, taxonomy, label=args.model)
        print(f"taxonomy: {taxonomy.source}")
        print(f"{'category':<14}{'similarity':>12}{'pairs':>8}{'found':>8}{'missing':>9}")
        for name, value in report.in_category.per_category.items():
            found, missing = report.in_category.coverage[name]
            shown = "unscored" if value is None else f"{value:.4f}"
            print(f"{name:<14}{shown:>12}{report.in_category.pair_counts[name]:>8}"
                  f"{found:>8}{missing:>9}")
        print(f"{'pooled mean':<14}{report.in_category.pooled_mean:>12.4f}")
        print(f"{'category mean':<14}{report.in_category.category_mean:>12.4f}")
        for key, value in report.opposite.items():
            print(f"{key:<14}{value:>12.4f}")
        if args.report:
            with open(args.report, "w", encoding="utf-8", newline="\n") as fh:
                json.dump({"taxonomy": taxonomy.source,
                           "dropped_multiword": list(taxonomy.dropped),
                           "space": report.to_dict()}, fh, indent=2)
                fh.write("\n")
        return 0

    before = load_embeddings(args.before, args.format, lowercase=args.lowercase)
    after = load_embeddings(args.after, args.format, lowercase=args.lowercase)
    comparison = evaluate(before, after, taxonomy, OPPOSITE_CATEGORY_PAIRS)
    _print_comparison(comparison)
    if args.report:
        write_report_json(args.report, comparison)
    if args.csv:
        write_report_csv(args.csv, comparison, model=args.model)
    return 0


def cmd_neighbors(args) -> int:
    if not 0.0 < args.radius <= 2.0:
        raise CliError(f"--radius must be in (0, 2], got {args.radius}")
    if not args.word and not args.stats:
        raise CliError("provide --word or --stats")
    space = load_embeddings(args.input, args.format, lowercase=args.lowercase)
    if args.word is not None and args.word not in space:
        raise CliError(f"unknown token {args.word!r}")
    graph = compute_neighborhoods(space, args.radius, workers=args.threads)
    if args.word is not None:
        row = space.row(args.word)
        vec = space.matrix[row]
        listed = sorted(
            ((cosine_distance(vec, space.matrix[j]), space.tokens[j])
             for j in graph.neighbors[row]),
        )
        for dist, token in listed:
            print(f"{token}\t{dist:.6f}")
        if not listed:
            logger.info("%r has no neighbors at radius %g", args.word, args.radius)
    if args.stats:
        degrees = graph.degrees()
        print(f"nodes: {len(graph)}")
        print(f"edges: {graph.edge_count}")
        print("degree histogram:")
        for degree, count in zip(*np.unique(degrees, return_counts=True)):
            print(f"  {int(degree)}: {int(count)}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(
            stream=sys.stderr,
            level=logging.INFO if args.verbose else logging.WARNING,
            format="%(message)s",
        )
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalInstabilityError as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, KeyError) as exc:
        message = str(exc).replace("\n", " ")
        print(f"error: {message}", file=sys.stderr)
        return 1


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
