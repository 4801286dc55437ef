"""Documents: sentence graphs plus cross-sentence annotations.

The annotation file is JSON::

    {"doc_id": "...",
     "chains": [{"id": "c0", "members": [{"sent": "s1", "var": "p"}]}],
     "implicit_roles": [{"sent": "s2", "var": "a", "role": ":ARG4",
                         "target": {"chain": "c1"} | {"sent": "...", "var": "..."}}],
     "bridging": [{"kind": "part-whole" | "set-member", "parent": {...}, "child": {...}}]}
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from .penman_io import AmrGraph, read_penman

BRIDGING_KINDS = ("part-whole", "set-member")
# core roles other than numbered arguments that may be left implicit
_CORE_NON_ARG = {":domain", ":mod", ":poss", ":location", ":time", ":manner", ":purpose",
                 ":source", ":destination", ":beneficiary", ":instrument", ":topic", ":path"}
_ARG_RE = re.compile(r"^:ARG\d+$")


class IngestionError(ValueError):
    """The annotation does not fit the sentence graphs it refers to."""


@dataclass(frozen=True, order=True)
class NodeRef:
    sentence_id: str
    variable: str

    def to_json(self) -> dict:
        return {"sent": self.sentence_id, "var": self.variable}


@dataclass(frozen=True)
class IdentityChain:
    chain_id: str
    members: tuple[NodeRef, ...]


@dataclass(frozen=True)
class ImplicitRole:
    predicate: NodeRef
    role: str
    target: Union[str, NodeRef]  # chain id or node


@dataclass(frozen=True)
class BridgingRelation:
    kind: str
    parent: Union[str, NodeRef]
    child: Union[str, NodeRef]


@dataclass
class DocumentAnnotation:
    doc_id: str = ""
    chains: list[IdentityChain] = field(default_factory=list)
    implicit_roles: list[ImplicitRole] = field(default_factory=list)
    bridging: list[BridgingRelation] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "chains": [{"id": c.chain_id, "members": [m.to_json() for m in c.members]} for c in self.chains],
            "implicit_roles": [
                {**r.predicate.to_json(), "role": r.role, "target": _target_json(r.target)}
                for r in self.implicit_roles
            ],
            "bridging": [
                {"kind": b.kind, "parent": _target_json(b.parent), "child": _target_json(b.child)}
                for b in self.bridging
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "DocumentAnnotation":
        try:
            chains = [
                IdentityChain(str(c["id"]), tuple(_ref(m) for m in c["members"]))
                for c in data.get("chains", [])
            ]
            roles = [
                ImplicitRole(_ref(r), r["role"], _target(r["target"]))
                for r in data.get("implicit_roles", [])
            ]
            bridging = [
                BridgingRelation(b["kind"], _target(b["parent"]), _target(b["child"]))
                for b in data.get("bridging", [])
            ]
        except (KeyError, TypeError) as exc:
            raise IngestionError(f"malformed annotation: missing field {exc}") from exc
        return cls(str(data.get("doc_id", "")), chains, roles, bridging)


def _ref(obj: dict) -> NodeRef:
    return NodeRef(str(obj["sent"]), str(obj["var"]))


def _target(obj: dict) -> Union[str, NodeRef]:
    if "chain" in obj:
        return str(obj["chain"])
    return _ref(obj)


def _target_json(t: Union[str, NodeRef]) -> dict:
    return {"chain": t} if isinstance(t, str) else t.to_json()


@dataclass
class Document:
    doc_id: str
    sentences: list[AmrGraph]
    annotation: DocumentAnnotation

    def __post_init__(self):
        self.validate()

    def sentence(self, sentence_id: str) -> AmrGraph:
        return self._by_id[sentence_id]

    def sentence_index(self, sentence_id: str) -> int:
        """1-based position of a sentence in the document."""
        return self._index[sentence_id]

    def chain(self, chain_id: str) -> IdentityChain:
        return self._chains[chain_id]

    def validate(self) -> None:
        self._by_id = {}
        self._index = {}
        for i, g in enumerate(self.sentences, 1):
            if g.id in self._by_id:
                raise IngestionError(f"duplicate sentence id {g.id!r}")
            self._by_id[g.id] = g
            self._index[g.id] = i
        ann = self.annotation
        bad: list[str] = []

        def check(ref: NodeRef) -> None:
            g = self._by_id.get(ref.sentence_id)
            if g is None or ref.variable not in g.instances:
                bad.append(f"({ref.sentence_id}, {ref.variable})")

        self._chains = {}
        owner: dict[NodeRef, str] = {}
        dup: list[str] = []
        for c in ann.chains:
            if c.chain_id in self._chains:
                raise IngestionError(f"duplicate chain id {c.chain_id!r}")
            if not c.members:
                raise IngestionError(f"chain {c.chain_id!r} has no members")
            self._chains[c.chain_id] = c
            for m in c.members:
                check(m)
                if m in owner:
                    dup.append(f"({m.sentence_id}, {m.variable}) in {owner[m]} and {c.chain_id}")
                owner[m] = c.chain_id

        def check_target(t) -> None:
            if isinstance(t, str):
                if t not in self._chains:
                    bad.append(f"chain {t}")
            else:
                check(t)

        for r in ann.implicit_roles:
            check(r.predicate)
            check_target(r.target)
            if not (_ARG_RE.match(r.role) or r.role in _CORE_NON_ARG):
                raise IngestionError(f"implicit role {r.role!r} is not a core role")
        for b in ann.bridging:
            if b.kind not in BRIDGING_KINDS:
                raise IngestionError(f"unknown bridging kind {b.kind!r}")
            if b.parent == b.child:
                raise IngestionError("bridging relation links a node or chain to itself")
            check_target(b.parent)
            check_target(b.child)
        if bad:
            raise IngestionError("unresolved references: " + ", ".join(bad))
        if dup:
            raise IngestionError("node in more than one chain: " + "; ".join(dup))

    def member_order(self, ref: NodeRef) -> tuple[int, int]:
        """Document order key: sentence position, then variable declaration order."""
        g = self._by_id[ref.sentence_id]
        return self._index[ref.sentence_id], list(g.instances).index(ref.variable)


def load_annotation(path: Union[str, Path]) -> DocumentAnnotation:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise IngestionError(f"{path}: invalid JSON: {exc}") from exc
    return DocumentAnnotation.from_json(data)


def save_annotation(path: Union[str, Path], annotation: DocumentAnnotation) -> None:
    Path(path).write_text(json.dumps(annotation.to_json(), indent=2) + "\n", encoding="utf-8")


def load_document(amr_file: Union[str, Path], annotation_file: Union[str, Path],
                  doc_id: Optional[str] = None) -> Document:
    sentences = read_penman(amr_file)
    annotation = load_annotation(annotation_file)
    return Document(doc_id or annotation.doc_id or Path(amr_file).stem, sentences, annotation)


# ---------------------------------------------------------------------------
# merge statistics


@dataclass
class StatsReport:
    nodes_in_chains: int = 0
    pronouns_in_chains: int = 0
    merged_into_pronoun: int = 0
    merged_into_interlocutor_entity: int = 0
    merged_into_other_node: int = 0
    merged_into_coref_entity: int = 0
    nes_in_chains: int = 0
    nes_after_merge: int = 0

    def to_json(self) -> dict:
        return {
            "nodes_in_chains": self.nodes_in_chains,
            "pronouns_in_chains": self.pronouns_in_chains,
            "pronouns_merged_into": {
                "pronoun": self.merged_into_pronoun,
                "interlocutor_entity": self.merged_into_interlocutor_entity,
                "other_node": self.merged_into_other_node,
                "coref_entity": self.merged_into_coref_entity,
            },
            "nes_in_chains": self.nes_in_chains,
            "nes_after_merge": self.nes_after_merge,
        }

    def __add__(self, other: "StatsReport") -> "StatsReport":
        return StatsReport(**{k: getattr(self, k) + getattr(other, k) for k in self.__dataclass_fields__})


def chain_statistics(doc: Document, built, lexicon=None) -> StatsReport:
    """Count what happened to chain members when ``built`` was made from ``doc``.

    ``nodes_in_chains`` counts non-pronominal members, so that pronoun and
    content counts partition the chain members.
    """
    from .builder import is_named_entity
    from .lexicon import default_lexicon

    if getattr(built, "mode", None) != "docamr":
        raise ValueError(f"statistics need a graph built in docamr mode, got {getattr(built, 'mode', None)!r}")
    lexicon = lexicon or default_lexicon()
    report = StatsReport()
    for chain in doc.annotation.chains:
        pronouns = []
        ne_targets = set()
        for ref in chain.members:
            g = doc.sentence(ref.sentence_id)
            if is_named_entity(g, ref.variable):
                report.nes_in_chains += 1
                report.nodes_in_chains += 1
                ne_targets.add(built.merge_map[ref])
            elif g.instances[ref.variable] in lexicon:
                pronouns.append(ref)
            else:
                report.nodes_in_chains += 1
        report.nes_after_merge += len(ne_targets)
        pronoun_only = len(pronouns) == len(chain.members)
        for ref in pronouns:
            report.pronouns_in_chains += 1
            concept = built.instances[built.merge_map[ref]]
            if concept == "interlocutor-entity":
                report.merged_into_interlocutor_entity += 1
            elif concept == "coref-entity":
                report.merged_into_coref_entity += 1
            elif pronoun_only:
                report.merged_into_pronoun += 1
            else:
                report.merged_into_other_node += 1
    return report
