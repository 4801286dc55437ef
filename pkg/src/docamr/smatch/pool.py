"""Candidate mapping pools and per-pair unary weights."""
from __future__ import annotations

from collections import defaultdict

import numpy as np

from ..errors import UsageError
from .triples import TripleSet


def unary_weights(source: TripleSet, target: TripleSet) -> np.ndarray:
    """``w[i, j]`` = instance and attribute triples matched by mapping i to j."""
    w = np.zeros((len(source.concepts), len(target.concepts)), dtype=np.int32)
    by_concept = defaultdict(list)
    for j, c in enumerate(target.concepts):
        by_concept[c].append(j)
    for i, c in enumerate(source.concepts):
        for j in by_concept.get(c, ()):
            w[i, j] += 1
    by_attr = defaultdict(list)
    for j, r, c in target.attributes:
        by_attr[(r, c)].append(j)
    for i, r, c in source.attributes:
        for j in by_attr.get((r, c), ()):
            w[i, j] += 1
    return w


def candidate_pool(source: TripleSet, target: TripleSet, constrained: bool = False) -> list[list[int]]:
    """Target candidates for every source variable, as sorted index lists.

    A pair enters the pool when mapping it could match some triple: equal
    concepts, a shared attribute, or endpoints of relations with the same
    label. In constrained mode a source node tied to exactly one sentence may
    only map to target nodes connected to that same sentence.
    """
    if constrained and source.n_sentences != target.n_sentences:
        raise UsageError(
            f"constrained scoring needs equal sentence counts, got "
            f"{source.n_sentences} and {target.n_sentences}"
        )
    pool: list[set[int]] = [set() for _ in source.concepts]
    by_concept = defaultdict(list)
    for j, c in enumerate(target.concepts):
        by_concept[c].append(j)
    for i, c in enumerate(source.concepts):
        pool[i].update(by_concept.get(c, ()))
    by_attr = defaultdict(list)
    for j, r, c in target.attributes:
        by_attr[(r, c)].append(j)
    for i, r, c in source.attributes:
        pool[i].update(by_attr.get((r, c), ()))
    by_label = defaultdict(list)
    for c, r, d in target.relations:
        by_label[r].append((c, d))
    for a, r, b in source.relations:
        for c, d in by_label.get(r, ()):
            pool[a].add(c)
            pool[b].add(d)
    if constrained:
        tprov = target.provenance
        for i, cands in enumerate(pool):
            prov = source.provenance[i]
            if len(prov) == 1:
                (k,) = prov
                pool[i] = {j for j in cands if k in tprov[j]}
    return [sorted(p) for p in pool]


def pool_by_name(source: TripleSet, target: TripleSet, pool: list[list[int]]) -> dict[str, set[str]]:
    return {source.variables[i]: {target.variables[j] for j in cands} for i, cands in enumerate(pool)}
