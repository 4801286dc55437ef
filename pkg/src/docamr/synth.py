"""Random documents and graph pairs for property tests and benchmarks."""
from __future__ import annotations

import copy
import random
from functools import lru_cache
from typing import Optional

from .builder import build
from .document import BridgingRelation, Document, DocumentAnnotation, IdentityChain, ImplicitRole, NodeRef
from .docgraph import DocGraph
from .lexicon import data_dir
from .penman_io import AmrGraph, read_penman

PREDICATES = ["want-01", "go-02", "give-01", "say-01", "see-01", "help-01", "leave-11",
              "like-01", "hate-01", "arrive-01", "buy-01", "know-01"]
NOUNS = ["boy", "girl", "city", "house", "book", "car", "dog", "favor", "lift", "door", "money"]
PRONOUNS = ["he", "she", "it", "they", "i", "you", "this", "we"]
NE_TYPES = ["person", "city", "country", "organization", "company", "government-organization"]
NAMES = ["Bill", "Mary", "Paris", "France", "Acme", "Lux", "Ann", "Rome"]
ROLES = [":ARG0", ":ARG1", ":ARG2", ":ARG1", ":mod", ":time", ":location", ":manner"]


class _Namer:
    def __init__(self):
        self.used: set[str] = set()

    def __call__(self, concept: str) -> str:
        letter = concept[0] if concept[0].isalpha() and concept[0].islower() else "x"
        v, k = letter, 2
        while v in self.used:
            v, k = f"{letter}{k}", k + 1
        self.used.add(v)
        return v


def random_sentence(rng: random.Random, sid: str, max_nodes: int = 7, reentrancy: float = 0.15,
                    ne_rate: float = 0.2, pronoun_rate: float = 0.25) -> AmrGraph:
    """A connected sentence graph with at most ``max_nodes`` concept nodes.

    Tokens are the concepts in creation order and every non-name node is
    aligned to its own token; names align their constant.
    """
    name = _Namer()
    instances: dict[str, str] = {}
    attributes: list[tuple[str, str, str]] = []
    relations: list[tuple[str, str, str]] = []
    predicates: list[str] = []
    tokens: list[str] = []
    alignments: dict[str, set[int]] = {}
    attr_align: dict[int, set[int]] = {}

    def node(concept: str) -> str:
        v = name(concept)
        instances[v] = concept
        if concept != "name":
            alignments[v] = {len(tokens)}
            tokens.append(concept.split("-")[0])
        return v

    root = node(rng.choice(PREDICATES))
    predicates.append(root)
    budget = rng.randint(1, max(1, max_nodes - 1))
    while len(instances) < budget + 1 and len(instances) < max_nodes:
        parent = rng.choice(predicates)
        role = rng.choice(ROLES)
        roll = rng.random()
        if roll < ne_rate and len(instances) + 2 <= max_nodes:
            child = node(rng.choice(NE_TYPES))
            n = node("name")
            relations.append((child, ":name", n))
            attr_align[len(attributes)] = {len(tokens)}
            label = rng.choice(NAMES)
            tokens.append(label)
            attributes.append((n, ":op1", f'"{label}"'))
            if rng.random() < 0.5:
                attributes.append((child, ":wiki", f'"{label}"'))
        elif roll < ne_rate + pronoun_rate:
            child = node(rng.choice(PRONOUNS))
        elif roll < ne_rate + pronoun_rate + 0.25:
            child = node(rng.choice(PREDICATES))
            predicates.append(child)
        else:
            child = node(rng.choice(NOUNS))
        relations.append((parent, role, child))
        if rng.random() < 0.1:
            attributes.append((child, ":polarity", "-"))
    if rng.random() < 0.2:
        attributes.append((root, ":polarity", "-"))
    # re-entrancies: an extra edge from a predicate to an existing node
    for _ in range(len(instances)):
        if rng.random() >= reentrancy:
            continue
        s = rng.choice(predicates)
        t = rng.choice([v for v in instances if instances[v] != "name"])
        rel = (s, rng.choice([":ARG0", ":ARG1", ":ARG2"]), t)
        if s != t and t != root and all((a, b) != (s, t) for a, _, b in relations):
            relations.append(rel)
    return AmrGraph(sid, root, instances, attributes, relations, alignments=alignments, tokens=tokens,
                    attribute_alignments=attr_align)


def _candidates(g: AmrGraph) -> list[str]:
    return [v for v, c in g.instances.items() if c != "name"]


def random_annotation(rng: random.Random, doc_id: str, sentences: list[AmrGraph],
                      max_chains: int = 4, extras: bool = True) -> DocumentAnnotation:
    """Random chains over distinct nodes, plus occasional implicit roles and bridging."""
    pool = [NodeRef(g.id, v) for g in sentences for v in _candidates(g)]
    rng.shuffle(pool)
    chains: list[IdentityChain] = []
    for k in range(rng.randint(0, max_chains)):
        size = rng.randint(2, 4)
        members, pool = pool[:size], pool[size:]
        if len(members) < 2:
            break
        chains.append(IdentityChain(f"c{k}", tuple(members)))
    roles, bridging = [], []
    if extras and chains:
        preds = [NodeRef(g.id, v) for g in sentences for v, c in g.instances.items() if c in PREDICATES]
        if preds and rng.random() < 0.4:
            roles.append(ImplicitRole(rng.choice(preds), ":ARG4", rng.choice(chains).chain_id))
        if len(chains) >= 2 and rng.random() < 0.4:
            a, b = rng.sample(chains, 2)
            bridging.append(BridgingRelation(rng.choice(["part-whole", "set-member"]), a.chain_id, b.chain_id))
    return DocumentAnnotation(doc_id, chains, roles, bridging)


def random_document(rng: random.Random, doc_id: str = "d0", n_sentences: tuple[int, int] = (2, 8),
                    max_nodes: int = 7, max_chains: int = 4, extras: bool = True) -> Document:
    n = rng.randint(*n_sentences)
    sentences = [random_sentence(rng, f"{doc_id}.{i}", max_nodes) for i in range(1, n + 1)]
    return Document(doc_id, sentences, random_annotation(rng, doc_id, sentences, max_chains, extras))


# ---------------------------------------------------------------------------
# predictions


def perturb_sentence(rng: random.Random, g: AmrGraph, rate: float = 0.2,
                     vocabulary: Optional[list[str]] = None) -> AmrGraph:
    """Delete or relabel edges, attributes and concepts at roughly ``rate``.

    Deleted edges never disconnect the graph: an edge is only removed when
    its target stays reachable.
    """
    out = copy.deepcopy(g)
    vocabulary = vocabulary or PREDICATES + NOUNS
    for v in list(out.instances):
        if out.instances[v] != "name" and rng.random() < rate / 2:
            out.instances[v] = rng.choice(vocabulary)
    rels = []
    for k, (s, r, t) in enumerate(out.relations):
        roll = rng.random()
        if roll < rate / 2:
            rels.append((s, rng.choice(ROLES), t))
        elif roll < rate:
            rest = rels + out.relations[k + 1:]
            probe = AmrGraph(out.id, out.root, out.instances, [], rest)
            try:
                probe.check()
            except ValueError:
                rels.append((s, r, t))
        else:
            rels.append((s, r, t))
    out.relations = list(dict.fromkeys(rels))
    out.inverted = set()
    out.attributes = [a for a in out.attributes if rng.random() >= rate / 2]
    out.attribute_alignments = {}
    return out


def perturb_annotation(rng: random.Random, ann: DocumentAnnotation, rate: float = 0.3) -> DocumentAnnotation:
    chains = []
    for c in ann.chains:
        if rng.random() < rate / 2:
            continue
        members = [m for m in c.members if rng.random() >= rate / 2]
        if len(members) >= 2:
            chains.append(IdentityChain(c.chain_id, tuple(members)))
    kept = {c.chain_id for c in chains}

    def alive(t) -> bool:
        return not isinstance(t, str) or t in kept

    roles = [r for r in ann.implicit_roles if alive(r.target)]
    bridging = [b for b in ann.bridging if alive(b.parent) and alive(b.child)]
    return DocumentAnnotation(ann.doc_id, chains, roles, bridging)


def predicted_document(rng: random.Random, doc: Document, rate: float = 0.2) -> Document:
    sentences = [perturb_sentence(rng, g, rate) for g in doc.sentences]
    return Document(doc.doc_id, sentences, perturb_annotation(rng, doc.annotation, rate))


def small_pair(rng: random.Random, max_vars: int = 10, doc_id: str = "p0") -> tuple[DocGraph, DocGraph]:
    """Gold and predicted DocAMR graphs of one small document.

    Both sides have at most ``max_vars`` variables, the document node
    included. The prediction perturbs the same sentences, so both graphs
    have the same sentence count.
    """
    while True:
        n = rng.randint(2, 3)
        doc = random_document(rng, doc_id, (n, n), max_nodes=3, max_chains=2)
        pred = predicted_document(rng, doc, 0.3)
        gold_g, pred_g = build(doc), build(pred)
        if len(gold_g.instances) <= max_vars and len(pred_g.instances) <= max_vars:
            return gold_g, pred_g


# ---------------------------------------------------------------------------
# benchmark corpus


@lru_cache(maxsize=4)
def _sentence_pool(directory: str) -> tuple:
    return tuple(read_penman(f"{directory}/sentence_pool.amr"))


def sentence_pool() -> list[AmrGraph]:
    return list(_sentence_pool(str(data_dir())))


def _renamed(g: AmrGraph, sid: str) -> AmrGraph:
    out = copy.deepcopy(g)
    out.id = sid
    return out


def _pool_chains(sentences: list[AmrGraph], rng: random.Random) -> list[IdentityChain]:
    """Chain nodes that plausibly corefer: same name form, or a personal
    pronoun with an earlier person."""
    by_name: dict[tuple, list[NodeRef]] = {}
    people: list[NodeRef] = []
    chains: dict[tuple, list[NodeRef]] = {}
    used: set[NodeRef] = set()
    for g in sentences:
        names = {s: t for s, r, t in g.relations if r == ":name"}
        for v, n in names.items():
            form = (g.instances[v],) + tuple(sorted(c for s, _, c in g.attributes if s == n))
            by_name.setdefault(form, []).append(NodeRef(g.id, v))
            if g.instances[v] == "person":
                people.append(NodeRef(g.id, v))
        for v, c in g.instances.items():
            if c in ("he", "she") and people and rng.random() < 0.5:
                key = ("pron", rng.choice(people))
                chains.setdefault(key, [key[1]]).append(NodeRef(g.id, v))
    out = []
    for form, refs in sorted(by_name.items()):
        if len(refs) >= 2:
            out.append(tuple(refs))
    for key, refs in chains.items():
        out.append(tuple(refs))
    result = []
    for refs in out:
        fresh = tuple(dict.fromkeys(r for r in refs if r not in used))
        if len(fresh) >= 2:
            used.update(fresh)
            result.append(IdentityChain(f"c{len(result)}", fresh))
    return result


def benchmark_document(rng: random.Random, doc_id: str, n_sentences: int) -> Document:
    pool = sentence_pool()
    sentences = [_renamed(rng.choice(pool), f"{doc_id}.{i}") for i in range(1, n_sentences + 1)]
    return Document(doc_id, sentences, DocumentAnnotation(doc_id, _pool_chains(sentences, rng)))


def benchmark_corpus(seed: int, n_docs: int, n_sentences: int, rate: float = 0.2
                     ) -> tuple[list[DocGraph], list[DocGraph]]:
    """Gold and predicted DocAMR graphs for a synthetic corpus."""
    rng = random.Random(seed)
    gold, pred = [], []
    for d in range(n_docs):
        doc = benchmark_document(rng, f"bench{n_sentences}-{d}", n_sentences)
        gold.append(build(doc))
        pred.append(build(predicted_document(rng, doc, rate)))
    return gold, pred
