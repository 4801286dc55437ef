"""Corpus scoring (micro-averaged) and the JSON report."""
from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

from ..errors import UsageError
from .search import SearchConfig, SmatchResult, exact_match, hill_climb
from .subscore import prf
from .triples import TripleSet, extract_triples

REPORT_SCHEMA = "docamr.evaluate/1"


@dataclass
class CorpusResult:
    total: SmatchResult
    per_doc: list[SmatchResult]

    @property
    def f1(self) -> float:
        return self.total.f1


def _sum(results: Sequence[SmatchResult], restarts: int) -> SmatchResult:
    return SmatchResult(
        matched=sum(r.matched for r in results),
        source_total=sum(r.source_total for r in results),
        target_total=sum(r.target_total for r in results),
        coref_matched=sum(r.coref_matched for r in results),
        coref_source=sum(r.coref_source for r in results),
        coref_target=sum(r.coref_target for r in results),
        restarts=restarts,
        elapsed=sum(r.elapsed for r in results),
        doc_id="",
    )


def default_threads() -> int:
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


def score_corpus(gold: Sequence, pred: Sequence, cfg: SearchConfig = SearchConfig(),
                 threads: Optional[int] = None, exact_max: int = 0) -> CorpusResult:
    """Score predicted graphs against gold, document by document.

    Lists must be aligned by document id. Counts are summed over documents
    before P/R/F1 are computed. Each document gets the same seed, so the
    result does not depend on ``threads``. Documents whose smaller graph has
    at most ``exact_max`` variables are scored by exact search instead.
    """
    if len(gold) != len(pred):
        raise UsageError(f"gold has {len(gold)} documents, prediction has {len(pred)}")
    pairs = []
    for g, p in zip(gold, pred):
        gt = g if isinstance(g, TripleSet) else extract_triples(g)
        pt = p if isinstance(p, TripleSet) else extract_triples(p)
        if gt.doc_id != pt.doc_id:
            raise UsageError(f"document id mismatch: gold {gt.doc_id!r} vs prediction {pt.doc_id!r}")
        pairs.append((pt, gt))

    def one(pair):
        src, tgt = pair
        if min(len(src.concepts), len(tgt.concepts)) <= exact_max:
            return exact_match(src, tgt, cfg.constrained, max_nodes=exact_max)[1]
        return hill_climb(src, tgt, cfg)[1]

    threads = threads or default_threads()
    if threads <= 1 or len(pairs) <= 1:
        per_doc = [one(p) for p in pairs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            per_doc = list(ex.map(one, pairs))
    return CorpusResult(_sum(per_doc, cfg.restarts), per_doc)


# ---------------------------------------------------------------------------
# report


def _encode(obj) -> str:
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return f"{obj:.4f}"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps_fixed(obj, indent: bool = True) -> str:
    """JSON with every float written as a fixed 4-decimal number."""
    return _pretty(obj, 0) if indent else _encode(obj)


def _pretty(obj, level: int) -> str:
    pad = "  " * (level + 1)
    end = "  " * level
    if isinstance(obj, dict) and obj:
        items = [f"{pad}{json.dumps(k)}: {_pretty(v, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)) and obj:
        items = [pad + _pretty(v, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    return _encode(obj)


def _scores(r: SmatchResult) -> dict:
    return {
        "precision": r.precision,
        "recall": r.recall,
        "f1": r.f1,
        "coref": {"precision": r.coref_precision, "recall": r.coref_recall, "f1": r.coref_f1},
    }


def report_dict(result: CorpusResult, cfg: SearchConfig, elapsed_ms: Optional[float] = None) -> dict:
    """Report payload; ``elapsed_ms`` is null unless timing was requested."""
    per_doc = []
    for r in result.per_doc:
        per_doc.append({
            "doc_id": r.doc_id,
            **_scores(r),
            "matched": r.matched,
            "pred_triples": r.source_total,
            "gold_triples": r.target_total,
        })
    total = result.total
    return {
        "schema": REPORT_SCHEMA,
        **_scores(total),
        "matched": total.matched,
        "pred_triples": total.source_total,
        "gold_triples": total.target_total,
        "per_doc": per_doc,
        "seed": cfg.seed,
        "restarts": cfg.restarts,
        "constrained": cfg.constrained,
        "elapsed_ms": elapsed_ms,
    }


__all__ = ["CorpusResult", "REPORT_SCHEMA", "dumps_fixed", "prf", "report_dict", "score_corpus"]
