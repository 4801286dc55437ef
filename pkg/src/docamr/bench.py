"""Timing harness: constrained vs unconstrained search, numba vs numpy."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .smatch import SearchConfig, extract_triples, hill_climb
from .synth import benchmark_corpus

F1_TOLERANCE = 1e-9


@dataclass
class SizeRow:
    sentences: int
    docs: int
    unconstrained_s: float
    constrained_s: float
    f1_unconstrained: list[float] = field(default_factory=list)
    f1_constrained: list[float] = field(default_factory=list)
    doc_ids: list[str] = field(default_factory=list)

    @property
    def speedup(self) -> float:
        return self.unconstrained_s / self.constrained_s if self.constrained_s > 0 else float("inf")

    @property
    def violations(self) -> list[str]:
        """Documents where constrained search scored below unconstrained."""
        return [d for d, u, c in zip(self.doc_ids, self.f1_unconstrained, self.f1_constrained)
                if c < u - F1_TOLERANCE]

    def to_json(self) -> dict:
        return {
            "sentences": self.sentences,
            "docs": self.docs,
            "unconstrained_s": self.unconstrained_s,
            "constrained_s": self.constrained_s,
            "speedup": self.speedup,
            "violations": self.violations,
        }


def warm_up(backend: Optional[str] = None) -> None:
    """Compile the kernels so timings exclude JIT cost."""
    gold, pred = benchmark_corpus(0, 1, 2)
    s, t = extract_triples(pred[0]), extract_triples(gold[0])
    hill_climb(s, t, SearchConfig(restarts=1, backend=backend))


def time_pairs(pairs, cfg: SearchConfig) -> tuple[float, list[float]]:
    f1s = []
    t0 = time.perf_counter()
    for s, t in pairs:
        f1s.append(hill_climb(s, t, cfg)[1].f1)
    return time.perf_counter() - t0, f1s


def compare_modes(sizes: Sequence[int], docs: int = 5, seed: int = 0, restarts: int = 4,
                  backend: Optional[str] = None, corpus=None) -> list[SizeRow]:
    """Time both candidate pools on synthetic documents of each size.

    ``corpus`` may supply ``(gold, pred)`` DocGraph lists instead; it is
    then reported as a single row keyed by its largest sentence count.
    """
    warm_up(backend)
    rows = []
    batches = []
    if corpus is not None:
        gold, pred = corpus
        batches.append((max((g.n_sentences for g in gold), default=0), gold, pred))
    else:
        for n in sizes:
            gold, pred = benchmark_corpus(seed + n, docs, n)
            batches.append((n, gold, pred))
    for n, gold, pred in batches:
        pairs = [(extract_triples(p), extract_triples(g)) for g, p in zip(gold, pred)]
        tu, fu = time_pairs(pairs, SearchConfig(restarts=restarts, seed=seed, backend=backend))
        tc, fc = time_pairs(pairs, SearchConfig(restarts=restarts, seed=seed, constrained=True, backend=backend))
        rows.append(SizeRow(n, len(pairs), tu, tc, fu, fc, [g.doc_id for g in gold]))
    return rows


def compare_backends(n_sentences: int = 30, docs: int = 5, seed: int = 0, restarts: int = 4,
                     constrained: bool = False) -> dict:
    """Wall time of the numba and numpy kernels on the same pairs."""
    gold, pred = benchmark_corpus(seed + n_sentences, docs, n_sentences)
    pairs = [(extract_triples(p), extract_triples(g)) for g, p in zip(gold, pred)]
    out = {}
    for backend in ("numba", "numpy"):
        warm_up(backend)
        cfg = SearchConfig(restarts=restarts, seed=seed, constrained=constrained, backend=backend)
        secs, f1s = time_pairs(pairs, cfg)
        out[backend] = {"seconds": secs, "f1": f1s}
    out["identical"] = out["numba"]["f1"] == out["numpy"]["f1"]
    out["speedup"] = out["numpy"]["seconds"] / out["numba"]["seconds"] if out["numba"]["seconds"] else float("inf")
    return out
