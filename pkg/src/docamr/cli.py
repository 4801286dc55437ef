"""Command line entry point: ``docamr <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from . import __version__
from .builder import MODES, BuildError, build
from .docgraph import docgraph_from_amr
from .document import Document, IngestionError, chain_statistics, load_annotation, load_document
from .errors import UsageError
from .injector import inject, load_mentions
from .penman_io import PenmanError, print_penman, read_penman
from .smatch import SearchConfig
from .smatch.corpus import default_threads, dumps_fixed, report_dict, score_corpus

log = logging.getLogger("docamr")

EXIT_DATA = 1
EXIT_USAGE = 2
EXIT_BENCH = 3


class StageError(Exception):
    """An error raised inside one stage of ``pipeline``."""

    def __init__(self, stage: str, exc: Exception):
        super().__init__(f"{stage}: {exc}")
        self.stage = stage
        self.cause = exc


@dataclass
class RunManifest:
    subcommand: str
    inputs: dict
    mode: Optional[str] = None
    seed: Optional[int] = None
    version: str = __version__
    elapsed_ms: Optional[float] = None
    extra: dict = field(default_factory=dict)

    def to_json(self) -> str:
        data = asdict(self)
        data.update(data.pop("extra"))
        return json.dumps(data, sort_keys=True)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # one line, machine parseable
        sys.stderr.write(f"docamr: error: usage: {message}\n")
        sys.exit(EXIT_USAGE)


def _emit(args, payload, text: str) -> None:
    if args.json:
        sys.stdout.write(payload if isinstance(payload, str) else json.dumps(payload, indent=2, sort_keys=True))
        sys.stdout.write("\n")
    elif not args.quiet:
        sys.stdout.write(text.rstrip("\n") + "\n")


def _read_docgraphs(path: str):
    return [docgraph_from_amr(g) for g in read_penman(path)]


def _doc_id(annotation_id: str, amr_path: str) -> str:
    return annotation_id or Path(amr_path).stem


# ---------------------------------------------------------------------------
# subcommands


def cmd_build(args) -> dict:
    doc = load_document(args.amr, args.coref, args.doc_id)
    graph = build(doc, mode=args.mode)
    text = print_penman(graph)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    result = {"doc_id": graph.doc_id, "mode": args.mode, "variables": len(graph.instances),
              "relations": len(graph.relations), "attributes": len(graph.attributes), "out": args.out}
    _emit(args, result, f"wrote {args.out}" if args.out else text)
    return {"inputs": {"amr": args.amr, "coref": args.coref}, "mode": args.mode}


def cmd_stats(args) -> dict:
    doc = load_document(args.amr, args.coref, args.doc_id)
    report = chain_statistics(doc, build(doc, mode="docamr"))
    data = report.to_json()
    lines = [f"{k}: {v}" for k, v in data.items() if not isinstance(v, dict)]
    lines += [f"pronouns_merged_into.{k}: {v}" for k, v in data["pronouns_merged_into"].items()]
    _emit(args, {"doc_id": doc.doc_id, **data}, "\n".join(lines))
    return {"inputs": {"amr": args.amr, "coref": args.coref}}


def _search_config(args) -> SearchConfig:
    return SearchConfig(restarts=args.restarts, seed=args.seed, constrained=args.constrained)


def _evaluate(gold_graphs, pred_graphs, args):
    cfg = _search_config(args)
    t0 = time.perf_counter()
    result = score_corpus(gold_graphs, pred_graphs, cfg, threads=args.threads, exact_max=args.exact_max)
    elapsed = (time.perf_counter() - t0) * 1000.0
    return cfg, result, elapsed


def _print_scores(args, cfg, result, elapsed) -> None:
    report = report_dict(result, cfg, elapsed if args.timing else None)
    t = result.total
    text = (f"Smatch P {t.precision:.4f} R {t.recall:.4f} F1 {t.f1:.4f}\n"
            f"Coref  P {t.coref_precision:.4f} R {t.coref_recall:.4f} F1 {t.coref_f1:.4f}")
    _emit(args, dumps_fixed(report), text)


def cmd_evaluate(args) -> dict:
    gold, pred = _read_docgraphs(args.gold), _read_docgraphs(args.pred)
    cfg, result, elapsed = _evaluate(gold, pred, args)
    _print_scores(args, cfg, result, elapsed)
    return {"inputs": {"gold": args.gold, "pred": args.pred}, "seed": cfg.seed,
            "extra": {"constrained": cfg.constrained, "restarts": cfg.restarts}, "elapsed_ms": elapsed}


def _inject(amr: str, mentions: str, doc_id: Optional[str]):
    sentences = read_penman(amr)
    mention_doc, clusters = load_mentions(mentions)
    doc_id = doc_id or _doc_id(mention_doc, amr)
    annotation, report = inject(sentences, clusters, doc_id)
    return Document(doc_id, sentences, annotation), report


def cmd_inject(args) -> dict:
    doc, report = _inject(args.amr, args.mentions, args.doc_id)
    data = doc.annotation.to_json()
    text = json.dumps(data, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    summary = {"doc_id": doc.doc_id, "chains": len(doc.annotation.chains), "mentions": report.total_mentions,
               "assigned": report.assigned, "dropped": len(report.dropped),
               "discarded_clusters": report.discarded_clusters, "out": args.out}
    _emit(args, summary, f"wrote {args.out}" if args.out else text)
    return {"inputs": {"amr": args.amr, "mentions": args.mentions}}


def cmd_pipeline(args) -> dict:
    try:
        doc, _ = _inject(args.amr, args.mentions, args.doc_id)
    except Exception as exc:
        raise StageError("inject-coref", exc) from exc
    try:
        pred = build(doc, mode=args.mode)
    except Exception as exc:
        raise StageError("build", exc) from exc
    try:
        gold = _read_docgraphs(args.gold)
        # printing and re-reading keeps the prediction identical to the chained commands
        pred_graph = docgraph_from_amr(_reparse(pred))
        cfg, result, elapsed = _evaluate(gold, [pred_graph], args)
    except Exception as exc:
        raise StageError("evaluate", exc) from exc
    _print_scores(args, cfg, result, elapsed)
    return {"inputs": {"amr": args.amr, "mentions": args.mentions, "gold": args.gold},
            "mode": args.mode, "seed": cfg.seed, "elapsed_ms": elapsed}


def _reparse(graph):
    from .penman_io import parse_penman

    return parse_penman(print_penman(graph))[0]


def cmd_bench(args) -> dict:
    from .bench import compare_backends, compare_modes

    corpus = None
    if args.gold or args.pred:
        if not (args.gold and args.pred):
            raise UsageError("bench needs both --gold and --pred to use a supplied corpus")
        corpus = (_read_docgraphs(args.gold), _read_docgraphs(args.pred))
    sizes = [int(x) for x in args.sizes.split(",") if x.strip()]
    rows = compare_modes(sizes, docs=args.docs, seed=args.seed, restarts=args.restarts, corpus=corpus)
    data = {"rows": [r.to_json() for r in rows], "reference_speedup": 20.0}
    lines = [f"{'sentences':>9} {'docs':>4} {'unconstr_s':>10} {'constr_s':>9} {'speedup':>8} violations"]
    for r in rows:
        lines.append(f"{r.sentences:>9} {r.docs:>4} {r.unconstrained_s:>10.3f} {r.constrained_s:>9.3f} "
                     f"{r.speedup:>8.1f} {len(r.violations)}")
    if args.backends:
        data["backends"] = compare_backends(max(sizes), docs=args.docs, seed=args.seed, restarts=args.restarts)
        b = data["backends"]
        lines.append(f"numba {b['numba']['seconds']:.3f}s numpy {b['numpy']['seconds']:.3f}s "
                     f"ratio {b['speedup']:.1f} identical={b['identical']}")
    _emit(args, data, "\n".join(lines))
    bad = [d for r in rows for d in r.violations]
    if bad:
        raise BenchFailure(f"constrained f1 below unconstrained on {len(bad)} document(s): {', '.join(bad)}")
    return {"inputs": {"gold": args.gold, "pred": args.pred}, "seed": args.seed}


class BenchFailure(Exception):
    pass


# ---------------------------------------------------------------------------


def make_parser() -> argparse.ArgumentParser:
    def global_flags(parser, default):
        parser.add_argument("--json", action="store_true", default=default(False),
                            help="machine-readable output on stdout")
        parser.add_argument("--threads", type=int, default=default(None), help="worker threads for corpus scoring")
        parser.add_argument("--quiet", action="store_true", default=default(False),
                            help="suppress non-error output")

    # accepted before or after the subcommand; the subcommand copy must not
    # overwrite a value given before it
    common = argparse.ArgumentParser(add_help=False)
    global_flags(common, lambda v: argparse.SUPPRESS)

    p = _Parser(prog="docamr", description=__doc__)
    global_flags(p, lambda v: v)
    p.add_argument("--version", action="version", version=f"docamr {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_, parents=[common])
        sp.set_defaults(func=fn)
        return sp

    def search_flags(sp):
        sp.add_argument("--constrained", action="store_true", help="restrict candidates by sentence provenance")
        sp.add_argument("--restarts", type=int, default=4)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--exact-max", type=int, default=0, dest="exact_max",
                        help="score documents with at most N variables exactly")
        sp.add_argument("--timing", action="store_true", help="record elapsed_ms in the JSON report")

    sp = add("build", cmd_build, "build a document graph from sentence graphs and chains")
    sp.add_argument("--amr", required=True)
    sp.add_argument("--coref", required=True)
    sp.add_argument("--mode", choices=MODES, default="docamr")
    sp.add_argument("--out")
    sp.add_argument("--doc-id", dest="doc_id")

    sp = add("stats", cmd_stats, "chain merge statistics")
    sp.add_argument("--amr", required=True)
    sp.add_argument("--coref", required=True)
    sp.add_argument("--doc-id", dest="doc_id")

    sp = add("evaluate", cmd_evaluate, "Smatch and coreference subscore")
    sp.add_argument("--gold", required=True)
    sp.add_argument("--pred", required=True)
    search_flags(sp)

    sp = add("inject-coref", cmd_inject, "attach mention clusters to sentence graph nodes")
    sp.add_argument("--amr", required=True)
    sp.add_argument("--mentions", required=True)
    sp.add_argument("--out")
    sp.add_argument("--doc-id", dest="doc_id")

    sp = add("pipeline", cmd_pipeline, "inject-coref, build and evaluate in one run")
    sp.add_argument("--amr", required=True)
    sp.add_argument("--mentions", required=True)
    sp.add_argument("--gold", required=True)
    sp.add_argument("--mode", choices=MODES, default="docamr")
    sp.add_argument("--doc-id", dest="doc_id")
    search_flags(sp)

    sp = add("bench", cmd_bench, "time constrained vs unconstrained scoring")
    sp.add_argument("--sizes", default="2,10,20,30", help="comma-separated sentence counts")
    sp.add_argument("--docs", type=int, default=5)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--restarts", type=int, default=4)
    sp.add_argument("--gold", help="benchmark a supplied corpus instead of synthetic documents")
    sp.add_argument("--pred")
    sp.add_argument("--backends", action="store_true", help="also compare numba and numpy kernels")
    return p


def _fail(code: int, kind: str, message: str) -> int:
    message = " ".join(str(message).split())
    sys.stderr.write(f"docamr: error: {kind}: {message}\n")
    return code


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.WARNING,
                        format="docamr: warning: %(message)s")
    if args.threads is None:
        args.threads = default_threads()
    elif args.threads < 1:
        return _fail(EXIT_USAGE, "usage", "--threads must be at least 1")
    t0 = time.perf_counter()
    try:
        info = args.func(args)
    except StageError as exc:
        code = EXIT_USAGE if isinstance(exc.cause, UsageError) else EXIT_DATA
        return _fail(code, f"pipeline.{exc.stage}", exc.cause)
    except UsageError as exc:
        return _fail(EXIT_USAGE, "usage", exc)
    except PenmanError as exc:
        return _fail(EXIT_DATA, "penman", exc)
    except (IngestionError, BuildError) as exc:
        return _fail(EXIT_DATA, "annotation", exc)
    except BenchFailure as exc:
        return _fail(EXIT_BENCH, "bench", exc)
    except OSError as exc:
        return _fail(EXIT_DATA, "io", f"{exc.filename or ''} {exc.strerror or exc}")
    except ValueError as exc:
        return _fail(EXIT_DATA, "data", exc)
    if args.json:
        info = dict(info)
        extra = info.pop("extra", {})
        info.setdefault("elapsed_ms", (time.perf_counter() - t0) * 1000.0)
        manifest = RunManifest(args.command, extra=extra, **info)
        sys.stderr.write(manifest.to_json() + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
