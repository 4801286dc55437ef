"""Attach text-level coreference clusters to sentence graph nodes.

Node-to-token alignments become node-to-span alignments over a spanning
tree of each sentence graph; every mention goes to the node with the
shortest span containing it.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

from .document import DocumentAnnotation, IdentityChain, NodeRef
from .errors import UsageError
from .penman_io import AmrGraph

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class NodeSpan:
    variable: str
    start: int
    end: int  # inclusive
    height: int

    @property
    def length(self) -> int:
        return self.end - self.start + 1

    def contains(self, start: int, end: int) -> bool:
        return self.start <= start and end <= self.end


@dataclass(frozen=True)
class Mention:
    sentence_id: str
    start: int
    end: int  # inclusive


@dataclass(frozen=True)
class MentionCluster:
    cluster_id: str
    mentions: tuple[Mention, ...]


@dataclass
class InjectionReport:
    total_mentions: int = 0
    assigned: int = 0
    dropped: list[tuple[Mention, str]] = field(default_factory=list)
    discarded_clusters: list[str] = field(default_factory=list)

    def reconciles(self) -> bool:
        return self.assigned + len(self.dropped) == self.total_mentions


def node_spans(graph: AmrGraph) -> list[NodeSpan]:
    """Token span and height of every node whose subtree has aligned tokens.

    A constant's alignment counts for the node that owns it, and constants
    count as one level of height.
    """
    if not graph.tokens:
        raise UsageError(f"sentence {graph.id}: node spans need ::tok metadata")
    tree = spanning_tree(graph)
    own: dict[str, set[int]] = {v: set(graph.alignments.get(v, ())) for v in graph.instances}
    has_attr = {v: False for v in graph.instances}
    for k, (v, _, _) in enumerate(graph.attributes):
        has_attr[v] = True
        own[v].update(graph.attribute_alignments.get(k, ()))
    spans: dict[str, NodeSpan] = {}
    tokens: dict[str, set[int]] = {}
    height: dict[str, int] = {}
    for v in reversed(_preorder(graph.root, tree)):
        toks = set(own[v])
        h = 1 if has_attr[v] else 0
        for c in tree[v]:
            toks |= tokens[c]
            h = max(h, height[c] + 1)
        tokens[v], height[v] = toks, h
        if toks:
            lo, hi = min(toks), max(toks)
            if lo < 0 or hi >= len(graph.tokens):
                raise UsageError(f"sentence {graph.id}: alignment {hi} outside {len(graph.tokens)} tokens")
            spans[v] = NodeSpan(v, lo, hi, h)
    return [spans[v] for v in _preorder(graph.root, tree) if v in spans]


def spanning_tree(graph: AmrGraph) -> dict[str, list[str]]:
    """Children of each node once re-entrant edges are removed.

    Edges are walked depth-first from the root in the order they are
    written; the first edge that reaches a node is kept and any later edge
    into it is dropped.
    """
    written: dict[str, list[str]] = {v: [] for v in graph.instances}
    for k, (s, _, t) in enumerate(graph.relations):
        parent, child = (t, s) if k in graph.inverted else (s, t)
        written[parent].append(child)
    tree: dict[str, list[str]] = {v: [] for v in graph.instances}
    seen = {graph.root}

    def visit(v: str) -> None:
        for c in written[v]:
            if c not in seen:
                seen.add(c)
                tree[v].append(c)
                visit(c)

    visit(graph.root)
    return tree


def _preorder(root: str, tree: dict[str, list[str]]) -> list[str]:
    out, stack = [], [root]
    while stack:
        v = stack.pop()
        out.append(v)
        stack.extend(reversed(tree[v]))
    return out


def best_node(spans: Sequence[NodeSpan], start: int, end: int):
    """Shortest span containing ``[start, end]``; ties go to the tallest
    node, then to the earliest in traversal order. None if nothing fits."""
    best = None
    for s in spans:
        if not s.contains(start, end):
            continue
        if best is None or (s.length, -s.height) < (best.length, -best.height):
            best = s
    return best


def assign_mentions(spans: dict[str, list[NodeSpan]], clusters: Sequence[MentionCluster],
                    order: Sequence[str], doc_id: str = "") -> tuple[DocumentAnnotation, InjectionReport]:
    """Turn mention clusters into identity chains over graph nodes.

    ``spans`` maps sentence id to its node spans; ``order`` lists sentence
    ids in document order. Clusters whose nodes all sit in one sentence are
    discarded. A node already claimed by an earlier cluster stays there.
    """
    position = {sid: i for i, sid in enumerate(order)}
    report = InjectionReport()
    claimed: set[NodeRef] = set()
    kept: list[tuple[tuple, list[NodeRef]]] = []
    for cluster in clusters:
        members: list[NodeRef] = []
        first = None
        for m in cluster.mentions:
            report.total_mentions += 1
            node = best_node(spans.get(m.sentence_id, ()), m.start, m.end)
            if node is None:
                log.warning("mention %s[%d:%d] of cluster %s matches no node; dropped",
                            m.sentence_id, m.start, m.end, cluster.cluster_id)
                report.dropped.append((m, "no containing node"))
                continue
            ref = NodeRef(m.sentence_id, node.variable)
            if ref in claimed and ref not in members:
                log.warning("mention %s[%d:%d] of cluster %s lands on %s, already in another chain; dropped",
                            m.sentence_id, m.start, m.end, cluster.cluster_id, node.variable)
                report.dropped.append((m, "node in another chain"))
                continue
            report.assigned += 1
            key = (position[m.sentence_id], m.start, m.end)
            first = key if first is None else min(first, key)
            if ref not in members:
                members.append(ref)
        if len({r.sentence_id for r in members}) < 2:
            report.discarded_clusters.append(cluster.cluster_id)
            continue
        claimed.update(members)
        kept.append((first, members))
    kept.sort(key=lambda x: x[0])
    chains = [IdentityChain(f"c{k}", tuple(members)) for k, (_, members) in enumerate(kept)]
    return DocumentAnnotation(doc_id, chains), report


def inject(sentences: Sequence[AmrGraph], clusters: Sequence[MentionCluster],
           doc_id: str = "") -> tuple[DocumentAnnotation, InjectionReport]:
    by_id = {g.id: g for g in sentences}
    for c in clusters:
        for m in c.mentions:
            g = by_id.get(m.sentence_id)
            if g is None:
                raise UsageError(f"cluster {c.cluster_id}: unknown sentence {m.sentence_id!r}")
            n = len(g.tokens or ())
            if not 0 <= m.start <= m.end < n:
                raise UsageError(f"cluster {c.cluster_id}: span [{m.start}, {m.end}] outside "
                                 f"{n} tokens of {m.sentence_id}")
    needed = {m.sentence_id for c in clusters for m in c.mentions}
    spans = {g.id: node_spans(g) for g in sentences if g.id in needed}
    return assign_mentions(spans, clusters, [g.id for g in sentences], doc_id)


def load_mentions(path: Union[str, Path]) -> tuple[str, list[MentionCluster]]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        clusters = [
            MentionCluster(str(c["id"]), tuple(
                Mention(str(m["sent"]), int(m["start"]), int(m["end"])) for m in c["mentions"]))
            for c in data.get("clusters", [])
        ]
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON: {exc.msg} at line {exc.lineno}") from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{path}: malformed mention file ({exc})") from exc
    return str(data.get("doc_id", "")), clusters


def mentions_json(doc_id: str, clusters: Sequence[MentionCluster]) -> dict:
    return {
        "doc_id": doc_id,
        "clusters": [
            {"id": c.cluster_id,
             "mentions": [{"sent": m.sentence_id, "start": m.start, "end": m.end} for m in c.mentions]}
            for c in clusters
        ],
    }
