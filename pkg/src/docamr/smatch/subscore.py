"""Coreference subscore: Smatch restricted to cross-sentence items."""
from __future__ import annotations

from typing import Sequence

from .triples import TripleSet

COREF_CONCEPT = "coref-entity"
BRIDGING_RELATIONS = frozenset({":part", ":subset"})


def coref_relations(ts: TripleSet, bridging: frozenset = BRIDGING_RELATIONS) -> list[bool]:
    """Flag relations that count toward the subscore.

    An edge counts when it enters a node connected to two or more sentences
    (the document root and its ``:snt`` edges never count), or when it is a
    bridging edge.
    """
    flags = []
    for rel in ts.relations:
        a, r, b = rel
        if r in bridging:
            flags.append(True)
        elif ts.is_doc_edge(rel) or b == ts.root:
            flags.append(False)
        else:
            flags.append(len(ts.provenance[b]) >= 2)
    return flags


def coref_instances(ts: TripleSet) -> list[bool]:
    return [c == COREF_CONCEPT for c in ts.concepts]


def coref_counts(source: TripleSet, target: TripleSet, mapping: Sequence[int],
                 bridging: frozenset = BRIDGING_RELATIONS) -> tuple[int, int, int]:
    """Return ``(correct, source_items, target_items)`` under ``mapping``.

    ``mapping[i]`` is the target index of source var ``i`` or -1. An item is
    correct when its image is a target triple that is itself a coref item.
    """
    s_rel = coref_relations(source, bridging)
    t_rel = coref_relations(target, bridging)
    s_inst = coref_instances(source)
    t_inst = coref_instances(target)
    t_lookup = {rel: flag for rel, flag in zip(target.relations, t_rel)}
    correct = 0
    for rel, flag in zip(source.relations, s_rel):
        if not flag:
            continue
        a, r, b = rel
        x, y = mapping[a], mapping[b]
        if x >= 0 and y >= 0 and t_lookup.get((x, r, y), False):
            correct += 1
    for i, flag in enumerate(s_inst):
        j = mapping[i]
        if flag and j >= 0 and t_inst[j]:
            correct += 1
    return correct, sum(s_rel) + sum(s_inst), sum(t_rel) + sum(t_inst)


def prf(matched: int, source_total: int, target_total: int) -> tuple[float, float, float]:
    """Precision over the source (prediction), recall over the target (gold)."""
    p = matched / source_total if source_total else 0.0
    r = matched / target_total if target_total else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


def coref_subscore(source: TripleSet, target: TripleSet, mapping: Sequence[int]) -> tuple[float, float, float]:
    correct, n_src, n_tgt = coref_counts(source, target, mapping)
    return prf(correct, n_src, n_tgt)
