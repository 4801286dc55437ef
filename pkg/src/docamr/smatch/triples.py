"""Smatch view of a graph: instance, attribute and relation triples."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

from ..docgraph import DocGraph
from ..penman_io import AmrGraph

_SNT_RE = re.compile(r"^:snt\d+$")


def normalize_value(value: str) -> str:
    if len(value) >= 2 and value[0] == '"' and value[-1] == '"':
        return value[1:-1]
    return value


@dataclass
class TripleSet:
    """Triples over integer variable indices.

    There is one instance triple per variable (``concepts[i]``).
    ``provenance[i]`` holds 1-based sentence indices.
    """

    doc_id: str
    variables: list[str]
    concepts: list[str]
    attributes: list[tuple[int, str, str]]
    relations: list[tuple[int, str, int]]
    provenance: list[frozenset]
    n_sentences: int
    root: int = 0
    index: dict[str, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.concepts) + len(self.attributes) + len(self.relations)

    def instance_triples(self) -> list[tuple[str, str, str]]:
        return [(v, ":instance", c) for v, c in zip(self.variables, self.concepts)]

    def attribute_triples(self) -> list[tuple[str, str, str]]:
        return [(self.variables[i], r, c) for i, r, c in self.attributes]

    def relation_triples(self) -> list[tuple[str, str, str]]:
        return [(self.variables[a], r, self.variables[b]) for a, r, b in self.relations]

    def is_doc_edge(self, rel: tuple[int, str, int]) -> bool:
        return rel[0] == self.root and bool(_SNT_RE.match(rel[1]))


def extract_triples(graph: Union[DocGraph, AmrGraph]) -> TripleSet:
    variables = list(graph.instances)
    index = {v: i for i, v in enumerate(variables)}
    concepts = [normalize_value(graph.instances[v]) for v in variables]
    attributes = list(dict.fromkeys((index[v], r, normalize_value(c)) for v, r, c in graph.attributes))
    relations = list(dict.fromkeys((index[s], r, index[t]) for s, r, t in graph.relations))
    prov_map = getattr(graph, "provenance", None)
    n = getattr(graph, "n_sentences", 1) if prov_map else 1
    if prov_map:
        provenance = [frozenset(prov_map.get(v, ())) for v in variables]
    else:
        provenance = [frozenset({1}) for _ in variables]
    return TripleSet(
        doc_id=getattr(graph, "doc_id", None) or getattr(graph, "id", ""),
        variables=variables,
        concepts=concepts,
        attributes=attributes,
        relations=relations,
        provenance=provenance,
        n_sentences=n,
        root=index[graph.root],
        index=index,
    )
