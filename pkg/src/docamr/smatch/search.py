"""Node alignment search: hill climbing with restarts, and an exact oracle."""
from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from ..errors import UsageError
from . import _kernels
from .pool import candidate_pool, unary_weights
from .subscore import coref_counts, prf
from .triples import TripleSet


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 4
    seed: int = 0
    constrained: bool = False
    max_exact_nodes: int = 10
    backend: Optional[str] = None  # None: pick from DOCAMR_NO_NUMBA

    def __post_init__(self):
        if self.restarts < 1:
            raise UsageError("restarts must be at least 1")


@dataclass
class SmatchResult:
    matched: int
    source_total: int
    target_total: int
    coref_matched: int = 0
    coref_source: int = 0
    coref_target: int = 0
    restarts: int = 0
    elapsed: float = 0.0
    doc_id: str = ""
    mapping: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def precision(self) -> float:
        return prf(self.matched, self.source_total, self.target_total)[0]

    @property
    def recall(self) -> float:
        return prf(self.matched, self.source_total, self.target_total)[1]

    @property
    def f1(self) -> float:
        return prf(self.matched, self.source_total, self.target_total)[2]

    @property
    def f1_exact(self) -> Fraction:
        total = self.source_total + self.target_total
        return Fraction(2 * self.matched, total) if total else Fraction(0)

    @property
    def coref_precision(self) -> float:
        return prf(self.coref_matched, self.coref_source, self.coref_target)[0]

    @property
    def coref_recall(self) -> float:
        return prf(self.coref_matched, self.coref_source, self.coref_target)[1]

    @property
    def coref_f1(self) -> float:
        return prf(self.coref_matched, self.coref_source, self.coref_target)[2]


def _label_ids(source: TripleSet, target: TripleSet):
    labels: dict[str, int] = {}
    src = [(a, labels.setdefault(r, len(labels)), b) for a, r, b in source.relations]
    tgt = [(c, labels.setdefault(r, len(labels)), d) for c, r, d in target.relations]
    return src, tgt


def build_problem(source: TripleSet, target: TripleSet, pool: list[list[int]]) -> _kernels.Problem:
    src, tgt = _label_ids(source, target)
    return _kernels.make_problem(unary_weights(source, target), pool, src, tgt, len(target.concepts))


def _role_profile(ts: TripleSet) -> tuple[list[Counter], list[Counter]]:
    """Incident role labels per var, and the same keyed by neighbour concept."""
    roles = [Counter() for _ in ts.concepts]
    typed = [Counter() for _ in ts.concepts]
    for a, r, b in ts.relations:
        roles[a]["out" + r] += 1
        roles[b]["in" + r] += 1
        typed[a][("out", r, ts.concepts[b])] += 1
        typed[b][("in", r, ts.concepts[a])] += 1
    for i, r, c in ts.attributes:
        roles[i]["attr" + r] += 1
        typed[i][("attr", r, c)] += 1
    return roles, typed


def smart_init(source: TripleSet, target: TripleSet, pool: list[list[int]]) -> np.ndarray:
    """Map equal-concept pairs, most similar incident roles first.

    Candidate pairs are taken greedily over the whole graph in order of
    role-label overlap, then overlap of (role, neighbour concept), then
    lowest source and target index. Vars left without a partner stay
    unmapped.
    """
    (sr, st), (tr, tt) = _role_profile(source), _role_profile(target)
    pairs = []
    for i, cands in enumerate(pool):
        for j in cands:
            if source.concepts[i] == target.concepts[j]:
                pairs.append((-sum((sr[i] & tr[j]).values()), -sum((st[i] & tt[j]).values()), i, j))
    pairs.sort()
    used: set[int] = set()
    m = np.full(len(source.concepts), -1, dtype=np.int64)
    for _, _, i, j in pairs:
        if m[i] < 0 and j not in used:
            m[i] = j
            used.add(j)
    return m


def random_init(pool: list[list[int]], rng: np.random.Generator) -> np.ndarray:
    used: set[int] = set()
    m = np.full(len(pool), -1, dtype=np.int64)
    for i, cands in enumerate(pool):
        if not cands:
            continue
        for j in rng.permutation(len(cands)):
            c = cands[j]
            if c not in used:
                m[i] = c
                used.add(c)
                break
    return m


def _result(source, target, mapping, matched, restarts, elapsed) -> SmatchResult:
    c, cs, ct = coref_counts(source, target, mapping)
    names = {source.variables[i]: target.variables[j] for i, j in enumerate(mapping) if j >= 0}
    return SmatchResult(
        matched=int(matched),
        source_total=len(source),
        target_total=len(target),
        coref_matched=c,
        coref_source=cs,
        coref_target=ct,
        restarts=restarts,
        elapsed=elapsed,
        doc_id=target.doc_id or source.doc_id,
        mapping=names,
    )


def hill_climb(source: TripleSet, target: TripleSet, cfg: SearchConfig = SearchConfig(),
               pool: Optional[list[list[int]]] = None) -> tuple[dict, SmatchResult]:
    """Best mapping found over ``cfg.restarts`` greedy runs.

    Run 0 starts from :func:`smart_init`; run ``r`` > 0 from a random mapping
    drawn with seed ``cfg.seed + r``. Earlier runs win ties.
    """
    t0 = time.perf_counter()
    if pool is None:
        pool = candidate_pool(source, target, cfg.constrained)
    problem = build_problem(source, target, pool)
    best_m, best = None, -1
    for r in range(cfg.restarts):
        if r == 0:
            m = smart_init(source, target, pool)
        else:
            m = random_init(pool, np.random.default_rng(cfg.seed + r))
        score = _kernels.climb(problem, m, cfg.backend)
        if score > best:
            best, best_m = score, m.copy()
    res = _result(source, target, best_m, best, cfg.restarts, time.perf_counter() - t0)
    return res.mapping, res


def match_count(source: TripleSet, target: TripleSet, mapping) -> int:
    """Matched triples under a full mapping; plain set arithmetic."""
    tri = set((j, ":instance", c) for j, c in enumerate(target.concepts))
    tri.update(target.attributes)
    rel = set(target.relations)
    n = 0
    for i, c in enumerate(source.concepts):
        if mapping[i] >= 0 and (mapping[i], ":instance", c) in tri:
            n += 1
    for i, r, c in source.attributes:
        if mapping[i] >= 0 and (mapping[i], r, c) in tri:
            n += 1
    for a, r, b in source.relations:
        if mapping[a] >= 0 and mapping[b] >= 0 and (mapping[a], r, mapping[b]) in rel:
            n += 1
    return n


def _branch_and_bound(source: TripleSet, target: TripleSet, pool: list[list[int]]) -> tuple[list[int], int]:
    n = len(source.concepts)
    w = unary_weights(source, target)
    tgt_rel = set(target.relations)
    tgt_labels = {r for _, r, _ in target.relations}
    live = [(a, r, b) for a, r, b in source.relations if r in tgt_labels]
    degree = Counter()
    for a, _, b in live:
        degree[a] += 1
        degree[b] += 1
    order = sorted(range(n), key=lambda i: (-degree[i], -len(pool[i]), i))
    pos = {v: k for k, v in enumerate(order)}
    # relations become decidable once both endpoints are placed
    closes: list[list[tuple[int, str, int]]] = [[] for _ in range(n)]
    for a, r, b in live:
        closes[max(pos[a], pos[b])].append((a, r, b))
    best_unary = [max((int(w[i, j]) for j in pool[i]), default=0) for i in order]
    suffix_unary = [0] * (n + 1)
    open_rels = [0] * (n + 1)
    for k in range(n - 1, -1, -1):
        suffix_unary[k] = suffix_unary[k + 1] + best_unary[k]
        open_rels[k] = open_rels[k + 1] + len(closes[k])

    mapping = [-1] * n
    used = set()
    best = [-1, None]

    def dfs(k: int, score: int) -> None:
        if score + suffix_unary[k] + open_rels[k] <= best[0]:
            return
        if k == n:
            best[0], best[1] = score, list(mapping)
            return
        i = order[k]
        options = [(int(w[i, j]), j) for j in pool[i] if j not in used]
        options.sort(key=lambda x: (-x[0], x[1]))
        for u, j in options + [(0, -1)]:
            mapping[i] = j
            gain = u
            if j >= 0:
                for a, r, b in closes[k]:
                    if mapping[a] >= 0 and mapping[b] >= 0 and (mapping[a], r, mapping[b]) in tgt_rel:
                        gain += 1
                used.add(j)
            dfs(k + 1, score + gain)
            if j >= 0:
                used.discard(j)
            mapping[i] = -1

    dfs(0, 0)
    return best[1], best[0]


def _swap(ts_pool_owner: TripleSet, other: TripleSet, pool: list[list[int]]) -> list[list[int]]:
    inv: list[list[int]] = [[] for _ in other.concepts]
    for i, cands in enumerate(pool):
        for j in cands:
            inv[j].append(i)
    return inv


def exact_match(source: TripleSet, target: TripleSet, constrained: bool = False,
                max_nodes: int = 10, pool: Optional[list[list[int]]] = None) -> tuple[dict, SmatchResult]:
    """Globally optimal mapping by branch and bound (small graphs only)."""
    t0 = time.perf_counter()
    ns, nt = len(source.concepts), len(target.concepts)
    if min(ns, nt) > max_nodes:
        raise UsageError(f"exact search limited to {max_nodes} nodes, graphs have {ns} and {nt}")
    if pool is None:
        pool = candidate_pool(source, target, constrained)
    if ns <= nt:
        mapping, score = _branch_and_bound(source, target, pool)
    else:
        rev_pool = _swap(source, target, pool)
        rev, score = _branch_and_bound(target, source, rev_pool)
        mapping = [-1] * ns
        for j, i in enumerate(rev):
            if i >= 0:
                mapping[i] = j
    res = _result(source, target, np.asarray(mapping, dtype=np.int64), score, 0, time.perf_counter() - t0)
    return res.mapping, res
