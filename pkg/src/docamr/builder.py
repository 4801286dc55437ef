"""Build one document graph from sentence graphs and coreference chains.

Modes:

``docamr``
    chains get a ``coref-entity`` node linked from every content member by
    ``:coref``; named entities in a chain merge into one node; pronouns with
    a content antecedent are dropped; coref-entities left with a single
    member are collapsed onto it.
``merge-all``
    every chain merges into its first member, which inherits all edges; the
    other distinct concepts hang off it as ``:coref-instance`` attributes.
``no-merge``
    every chain gets a coref-entity, nothing is merged or dropped.
``no-coref``
    annotations are ignored.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .docgraph import DOC_CONCEPT, DOC_VAR, DocGraph, compute_provenance, informative_origins
from .document import Document, IdentityChain, NodeRef
from .lexicon import EntityTypeOntology, PronounLexicon, default_lexicon, default_ontology
from .penman_io import AmrGraph

MODES = ("docamr", "merge-all", "no-coref", "no-merge")
COREF_ENTITY = "coref-entity"
INTERLOCUTOR_ENTITY = "interlocutor-entity"
BRIDGING_LABELS = {"part-whole": ":part", "set-member": ":subset"}


class BuildError(ValueError):
    pass


def is_named_entity(graph: AmrGraph, var: str) -> bool:
    return any(s == var and r == ":name" for s, r, _ in graph.relations)


def doc_var(index: int, var: str) -> str:
    return f"s{index}.{var}"


@dataclass(frozen=True)
class PronounPlan:
    """What happens to the pronominal members of one chain.

    ``action`` is ``drop`` (a content antecedent exists), ``merge`` (pronoun
    only chain folded into one node labelled ``concept``), ``interlocutor``
    (dialogue participants folded into an ``interlocutor-entity``) or
    ``none`` (no pronouns in the chain).
    """

    action: str
    pronouns: tuple
    concept: Optional[str] = None


def _classify(doc: Document, ref: NodeRef, lexicon: PronounLexicon) -> str:
    g = doc.sentence(ref.sentence_id)
    if is_named_entity(g, ref.variable):
        return "ne"
    if g.instances[ref.variable] in lexicon:
        return "pronoun"
    return "content"


def resolve_pronouns(doc: Document, chain: IdentityChain, lexicon: Optional[PronounLexicon] = None) -> PronounPlan:
    lexicon = lexicon or default_lexicon()
    members = sorted(chain.members, key=doc.member_order)
    pronouns = tuple(m for m in members if _classify(doc, m, lexicon) == "pronoun")
    if not pronouns:
        return PronounPlan("none", ())
    if len(pronouns) < len(members):
        return PronounPlan("drop", pronouns)
    concepts = [doc.sentence(m.sentence_id).instances[m.variable] for m in pronouns]
    distinct = set(concepts)
    if len(distinct) > 1 and distinct & lexicon.interlocutors:
        return PronounPlan("interlocutor", pronouns, INTERLOCUTOR_ENTITY)
    return PronounPlan("merge", pronouns, lexicon.most_specific(concepts))


class _Work:
    """Mutable graph under construction; merged variables are redirected."""

    def __init__(self, doc: Document):
        self.doc = doc
        self.instances: dict[str, str] = {DOC_VAR: DOC_CONCEPT}
        self.attributes: list[tuple[str, str, str]] = []
        self.relations: list[tuple[str, str, str]] = []
        self.inverted: set[int] = set()
        self.redirect: dict[str, str] = {}
        self.merge_map: dict[NodeRef, str] = {}
        self.counters = {"ce": 0, "ie": 0, "at": 0}
        for i, g in enumerate(doc.sentences, 1):
            for v, c in g.instances.items():
                dv = doc_var(i, v)
                self.instances[dv] = c
                self.merge_map[NodeRef(g.id, v)] = dv
            for v, r, c in g.attributes:
                self.attributes.append((doc_var(i, v), r, c))
            offset = len(self.relations)
            for s, r, t in g.relations:
                self.relations.append((doc_var(i, s), r, doc_var(i, t)))
            self.inverted.update(offset + k for k in g.inverted)
        for i, g in enumerate(doc.sentences, 1):
            self.relations.append((DOC_VAR, f":snt{i}", doc_var(i, g.root)))

    def find(self, v: str) -> str:
        while v in self.redirect:
            v = self.redirect[v]
        return v

    def var(self, ref: NodeRef) -> str:
        return self.find(self.merge_map[ref])

    def new_node(self, prefix: str, concept: str) -> str:
        v = f"{prefix}{self.counters[prefix]}"
        self.counters[prefix] += 1
        self.instances[v] = concept
        return v

    def merge(self, src: str, dst: str) -> None:
        src, dst = self.find(src), self.find(dst)
        if src != dst:
            self.redirect[src] = dst
            del self.instances[src]

    def add_relation(self, s: str, r: str, t: str) -> None:
        self.relations.append((s, r, t))

    def out_edges(self, v: str, role: str) -> list[str]:
        v = self.find(v)
        return [self.find(t) for s, r, t in self.relations if r == role and self.find(s) == v]

    def attrs(self, v: str) -> list[tuple[str, str]]:
        v = self.find(v)
        return [(r, c) for s, r, c in self.attributes if self.find(s) == v]

    def finish(self, mode: str) -> DocGraph:
        relations: list[tuple[str, str, str]] = []
        inverted: set[int] = set()
        seen: set[tuple[str, str, str]] = set()
        for k, (s, r, t) in enumerate(self.relations):
            triple = (self.find(s), r, self.find(t))
            if triple in seen:
                continue
            seen.add(triple)
            if k in self.inverted:
                inverted.add(len(relations))
            relations.append(triple)
        attributes = []
        seen_attr = set()
        for v, r, c in self.attributes:
            triple = (self.find(v), r, c)
            if triple not in seen_attr:
                seen_attr.add(triple)
                attributes.append(triple)
        merge_map = {ref: self.find(v) for ref, v in self.merge_map.items()}
        n = len(self.doc.sentences)
        origins: dict[str, set] = {}
        for ref, v in merge_map.items():
            origins.setdefault(v, set()).add(self.doc.sentence_index(ref.sentence_id))
        graph = DocGraph(
            doc_id=self.doc.doc_id,
            root=DOC_VAR,
            instances=dict(self.instances),
            attributes=attributes,
            relations=relations,
            merge_map=merge_map,
            n_sentences=n,
            mode=mode,
            inverted=inverted,
            origins={v: frozenset(s) for v, s in origins.items()},
        )
        graph.provenance = compute_provenance(graph.root, graph.instances, graph.relations, n, graph.origins)
        return graph


def _name_form(work: _Work, name_var: str) -> tuple:
    return tuple(sorted(work.attrs(name_var)))


def merge_named_entities(work: _Work, nes: list[NodeRef], ontology: EntityTypeOntology) -> str:
    """Fold coreferent named entities into the first one; return its variable.

    The most specific type becomes the concept, other distinct types hang
    off ``:additional-type`` nodes, name nodes with identical forms collapse
    and all other edges (wiki, modifiers, parents) move to the merged node.
    """
    vars_ = [work.var(r) for r in nes]
    keeper = vars_[0]
    types = [work.instances[v] for v in vars_]
    root_type = ontology.most_specific(types)
    forms: dict[tuple, str] = {}
    for v in vars_:
        for name_var in work.out_edges(v, ":name"):
            form = _name_form(work, name_var)
            if form in forms:
                work.merge(name_var, forms[form])
            else:
                forms[form] = name_var
    for v in vars_[1:]:
        work.merge(v, keeper)
    work.instances[keeper] = root_type
    extra = []
    for t in types:
        if t != root_type and t not in extra:
            extra.append(t)
    for t in extra:
        tv = work.new_node("at", t)
        work.add_relation(keeper, ":additional-type", tv)
    return keeper


def collapse_singletons(graph: DocGraph) -> DocGraph:
    """Replace coref-entity nodes that have a single ``:coref`` member by that member."""
    members: dict[str, list[int]] = {}
    for k, (s, r, t) in enumerate(graph.relations):
        if r == ":coref" and graph.instances.get(t) == COREF_ENTITY:
            members.setdefault(t, []).append(k)
    redirect = {}
    drop = set()
    for v, c in graph.instances.items():
        if c != COREF_ENTITY:
            continue
        ks = members.get(v, [])
        if len(ks) == 1:
            redirect[v] = graph.relations[ks[0]][0]
            drop.add(ks[0])
    if not redirect:
        return graph

    def find(v):
        while v in redirect:
            v = redirect[v]
        return v

    relations, inverted, seen = [], set(), set()
    for k, (s, r, t) in enumerate(graph.relations):
        if k in drop:
            continue
        triple = (find(s), r, find(t))
        if triple in seen:
            continue
        seen.add(triple)
        if k in graph.inverted:
            inverted.add(len(relations))
        relations.append(triple)
    attributes = list(dict.fromkeys((find(v), r, c) for v, r, c in graph.attributes))
    instances = {v: c for v, c in graph.instances.items() if v not in redirect}
    origins: dict[str, frozenset] = {}
    for v, idx in graph.origins.items():
        origins[find(v)] = origins.get(find(v), frozenset()) | idx
    out = DocGraph(
        doc_id=graph.doc_id,
        root=graph.root,
        instances=instances,
        attributes=attributes,
        relations=relations,
        merge_map={ref: find(v) for ref, v in graph.merge_map.items()},
        n_sentences=graph.n_sentences,
        mode=graph.mode,
        inverted=inverted,
        metadata=list(graph.metadata),
        origins=origins,
    )
    out.provenance = compute_provenance(out.root, out.instances, out.relations, out.n_sentences, out.origins)
    return out


def _target_var(work: _Work, reps: dict[str, str], target: Union[str, NodeRef]) -> str:
    if isinstance(target, str):
        return work.find(reps[target])
    return work.var(target)


def _docamr_chain(work: _Work, chain: IdentityChain, lexicon, ontology) -> str:
    doc = work.doc
    members = sorted(chain.members, key=doc.member_order)
    plan = resolve_pronouns(doc, chain, lexicon)
    if plan.action in ("merge", "interlocutor"):
        if plan.action == "interlocutor":
            keeper = work.new_node("ie", INTERLOCUTOR_ENTITY)
        else:
            keeper = next(work.var(m) for m in members if work.instances[work.var(m)] == plan.concept)
        for m in members:
            work.merge(work.var(m), keeper)
        return work.find(keeper)

    nes = [m for m in members if _classify(doc, m, lexicon) == "ne"]
    content = []
    if len(nes) > 1:
        content.append(merge_named_entities(work, nes, ontology))
    for m in members:
        if m in plan.pronouns:
            continue
        v = work.var(m)
        if v not in content:
            content.append(v)
    if len(content) == 1 and len(members) == 1:
        return content[0]
    ce = work.new_node("ce", COREF_ENTITY)
    for v in content:
        work.add_relation(v, ":coref", ce)
    for m in plan.pronouns:
        work.merge(work.var(m), ce)
    return ce


def build(doc: Document, mode: str = "docamr", lexicon: Optional[PronounLexicon] = None,
          ontology: Optional[EntityTypeOntology] = None,
          bridging_labels: Optional[dict[str, str]] = None) -> DocGraph:
    """Construct the document graph for ``doc`` in the given representation mode."""
    if mode not in MODES:
        raise BuildError(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}")
    lexicon = lexicon or default_lexicon()
    ontology = ontology or default_ontology()
    labels = {**BRIDGING_LABELS, **(bridging_labels or {})}
    work = _Work(doc)
    ann = doc.annotation
    if mode == "no-coref":
        graph = work.finish(mode)
        graph.origins = informative_origins(graph.origins)
        return graph

    reps: dict[str, str] = {}
    for chain in ann.chains:
        members = sorted(chain.members, key=doc.member_order)
        if mode == "docamr":
            reps[chain.chain_id] = _docamr_chain(work, chain, lexicon, ontology)
        elif mode == "no-merge":
            if len(members) == 1:
                reps[chain.chain_id] = work.var(members[0])
            else:
                ce = work.new_node("ce", COREF_ENTITY)
                for m in members:
                    work.add_relation(work.var(m), ":coref", ce)
                reps[chain.chain_id] = ce
        else:  # merge-all
            keeper = work.var(members[0])
            concepts = []
            for m in members[1:]:
                v = work.var(m)
                c = work.instances.get(v)
                if v != keeper and c is not None:
                    if c != work.instances[keeper] and c not in concepts:
                        concepts.append(c)
                    work.merge(v, keeper)
            for c in concepts:
                work.attributes.append((keeper, ":coref-instance", c))
            reps[chain.chain_id] = keeper

    for role in ann.implicit_roles:
        work.add_relation(work.var(role.predicate), role.role, _target_var(work, reps, role.target))
    for b in ann.bridging:
        work.add_relation(_target_var(work, reps, b.parent), labels[b.kind],
                          _target_var(work, reps, b.child))
    graph = work.finish(mode)
    if mode in ("docamr", "no-merge"):
        graph = collapse_singletons(graph)
    graph.origins = informative_origins(graph.origins)
    return graph
