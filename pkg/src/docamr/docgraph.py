"""The document-level graph and sentence provenance of its nodes."""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .penman_io import AmrGraph, PenmanError

DOC_CONCEPT = "document"
DOC_VAR = "doc"
_SNT_RE = re.compile(r"^:snt(\d+)$")
_HOME_RE = re.compile(r"^s(\d+)\.")
_MERGED_RE = re.compile(r"^#\s*::merged\s+(.*)$")


@dataclass
class DocGraph:
    """A single graph for a whole document.

    ``provenance`` maps each variable to the 1-based indices of the sentences
    it is connected to. ``merge_map`` records where each original sentence
    node ended up (only for graphs built from a Document). ``origins`` lists
    the sentences a node was merged from, for nodes where that says more
    than the home sentence; it survives printing as a ``# ::merged``
    metadata line.
    """

    doc_id: str
    root: str
    instances: dict[str, str]
    attributes: list[tuple[str, str, str]] = field(default_factory=list)
    relations: list[tuple[str, str, str]] = field(default_factory=list)
    provenance: dict[str, frozenset] = field(default_factory=dict)
    merge_map: dict = field(default_factory=dict)
    n_sentences: int = 0
    mode: Optional[str] = None
    inverted: set[int] = field(default_factory=set)
    metadata: list[str] = field(default_factory=list)
    alignments: dict = field(default_factory=dict)
    origins: dict[str, frozenset] = field(default_factory=dict)

    def sentence_roots(self) -> dict[int, str]:
        out = {}
        for s, r, t in self.relations:
            m = _SNT_RE.match(r)
            if s == self.root and m:
                out[int(m.group(1))] = t
        return out

    def check(self) -> None:
        """Raise ValueError when a DocGraph invariant does not hold."""
        if self.instances.get(self.root) != DOC_CONCEPT:
            raise ValueError("document root must have concept 'document'")
        roots = [int(m.group(1)) for s, r, _ in self.relations
                 if s == self.root and (m := _SNT_RE.match(r))]
        if sorted(roots) != list(range(1, self.n_sentences + 1)):
            raise ValueError(f"document root has :snt edges {sorted(roots)} for {self.n_sentences} sentences")
        for s, r, t in self.relations:
            if s not in self.instances or t not in self.instances:
                raise ValueError(f"dangling relation {s} {r} {t}")
        incoming: dict[str, int] = {}
        for s, r, t in self.relations:
            if r == ":coref":
                incoming[t] = incoming.get(t, 0) + 1
        for v, c in self.instances.items():
            if c == "coref-entity" and incoming.get(v, 0) < 2:
                raise ValueError(f"coref-entity {v} has {incoming.get(v, 0)} :coref edges")
        amr = AmrGraph(self.doc_id, self.root, self.instances, self.attributes, self.relations)
        amr.check()


def compute_provenance(root: str, instances: dict, relations: list, n_sentences: int,
                       origins: Optional[dict] = None) -> dict[str, frozenset]:
    """Sentences each node is connected to.

    A node's home sentence comes from the ``s<i>.`` variable prefix written by
    the builder; graphs without that convention fall back to the sentence
    whose root reaches the node in the fewest forward steps. A node is
    connected to its home sentence, to every sentence whose root it is, to
    the home sentence of every node with an edge into it, and to every
    sentence it was merged from (``origins``). Nodes with no home
    (document-level nodes) take on the sentences of their parents.
    """
    prefixed = any(_HOME_RE.match(v) for v in instances if v != root)
    home: dict[str, Optional[int]] = {}
    if prefixed:
        for v in instances:
            m = _HOME_RE.match(v)
            i = int(m.group(1)) if m else None
            home[v] = i if i is not None and 1 <= i <= n_sentences else None
    else:
        home = _home_by_distance(root, instances, relations)
    home[root] = None

    base: dict[str, set] = {v: ({home[v]} if home[v] is not None else set()) for v in instances}
    for v, idx in (origins or {}).items():
        if v in base and v != root:
            base[v].update(i for i in idx if 1 <= i <= n_sentences)
    parents: dict[str, list[str]] = {v: [] for v in instances}
    for s, r, t in relations:
        if s == root:
            m = _SNT_RE.match(r)
            if m:
                base[t].add(int(m.group(1)))
            continue
        parents[t].append(s)
        if home[s] is not None:
            base[t].add(home[s])
    prov = {}
    for v in instances:
        if v == root:
            prov[v] = frozenset(range(1, n_sentences + 1))
            continue
        p = set(base[v])
        if home[v] is None:
            for u in parents[v]:
                p |= base[u]
        prov[v] = frozenset(p)
    return prov


def _home_by_distance(root, instances, relations) -> dict[str, Optional[int]]:
    children: dict[str, list[str]] = {v: [] for v in instances}
    starts = {}
    for s, r, t in relations:
        m = _SNT_RE.match(r)
        if s == root and m:
            starts[int(m.group(1))] = t
        elif s != root:
            children[s].append(t)
    best: dict[str, tuple[int, int]] = {}
    for i in sorted(starts):
        dist = {starts[i]: 0}
        queue = deque([starts[i]])
        while queue:
            v = queue.popleft()
            for c in children[v]:
                if c not in dist:
                    dist[c] = dist[v] + 1
                    queue.append(c)
        for v, d in dist.items():
            if v not in best or (d, i) < best[v]:
                best[v] = (d, i)
    return {v: (best[v][1] if v in best else None) for v in instances}


def home_sentence(var: str) -> Optional[int]:
    m = _HOME_RE.match(var)
    return int(m.group(1)) if m else None


def informative_origins(origins: dict) -> dict[str, frozenset]:
    """Drop origin sets that only repeat a variable's home sentence."""
    return {v: frozenset(idx) for v, idx in origins.items() if set(idx) != {home_sentence(v)}}


def parse_origins(metadata: list[str], instances: dict) -> tuple[dict[str, frozenset], list[str]]:
    """Pull ``# ::merged var:i,j`` lines out of ``metadata``."""
    origins: dict[str, frozenset] = {}
    rest = []
    for line in metadata:
        m = _MERGED_RE.match(line)
        if not m:
            rest.append(line)
            continue
        for item in m.group(1).split():
            var, _, idx = item.rpartition(":")
            if var not in instances:
                raise PenmanError(f"::merged names unknown variable {var!r}")
            try:
                origins[var] = frozenset(int(x) for x in idx.split(","))
            except ValueError:
                raise PenmanError(f"bad ::merged entry {item!r}") from None
    return origins, rest


def docgraph_from_amr(graph: AmrGraph) -> DocGraph:
    """Interpret a parsed PENMAN graph as a document graph.

    A graph whose root is not a ``document`` node is treated as a
    one-sentence document.
    """
    origins, metadata = parse_origins(graph.metadata, graph.instances)
    if graph.instances.get(graph.root) == DOC_CONCEPT:
        idx = [int(m.group(1)) for s, r, _ in graph.relations
               if s == graph.root and (m := _SNT_RE.match(r))]
        n = max(idx, default=0)
        if sorted(idx) != list(range(1, n + 1)):
            raise PenmanError(f"document {graph.id}: :snt edges {sorted(idx)} are not 1..{n}")
        prov = compute_provenance(graph.root, graph.instances, graph.relations, n, origins)
    else:
        n = 1
        prov = {v: frozenset({1}) for v in graph.instances}
    return DocGraph(
        doc_id=graph.id,
        root=graph.root,
        instances=dict(graph.instances),
        attributes=list(graph.attributes),
        relations=list(graph.relations),
        provenance=prov,
        n_sentences=n,
        inverted=set(graph.inverted),
        metadata=metadata,
        origins=origins,
    )
