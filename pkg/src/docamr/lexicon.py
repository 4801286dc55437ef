"""Pronoun inventory and entity-type ontology used by the document builder.

Both are plain-text data files shipped in ``docamr/data``; setting the
``DOCAMR_DATA`` environment variable points the loaders at another directory.
"""
from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Optional, Sequence

PRONOUN_FILE = "pronouns.tsv"
ONTOLOGY_FILE = "entity_types.tsv"
INTERLOCUTORS = frozenset({"i", "you"})


def data_dir() -> Path:
    override = os.environ.get("DOCAMR_DATA")
    if override:
        return Path(override)
    return Path(__file__).parent / "data"


def _rows(path: Path):
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not all(p.strip() for p in parts):
            raise ValueError(f"{path}:{lineno}: expected two tab-separated fields")
        yield parts[0].strip(), parts[1].strip()


@dataclass(frozen=True)
class PronounLexicon:
    """Pronoun concepts grouped into specificity tiers.

    ``tiers`` maps a concept to its tier rank; rank 0 is the most specific.
    Concepts sharing a tier are ordered by first mention at use sites.
    """

    tiers: dict
    interlocutors: frozenset = INTERLOCUTORS

    def __post_init__(self):
        missing = self.interlocutors - set(self.tiers)
        if missing:
            raise ValueError(f"interlocutor concepts not in lexicon: {sorted(missing)}")

    def __contains__(self, concept: str) -> bool:
        return concept in self.tiers

    def most_specific(self, concepts: Sequence[str]) -> str:
        """Pick the most specific pronoun; earlier mentions win ties."""
        best = None
        for c in concepts:
            if best is None or self.tiers[c] < self.tiers[best]:
                best = c
        if best is None:
            raise ValueError("no pronouns given")
        return best

    @classmethod
    def load(cls, path: Optional[Path] = None) -> "PronounLexicon":
        path = Path(path) if path else data_dir() / PRONOUN_FILE
        tier_rank: dict[str, int] = {}
        tiers: dict[str, int] = {}
        for concept, tier in _rows(path):
            rank = tier_rank.setdefault(tier, len(tier_rank))
            if concept in tiers:
                raise ValueError(f"{path}: pronoun {concept!r} listed twice")
            tiers[concept] = rank
        return cls(tiers)


class EntityTypeOntology:
    """Specific-to-general partial order over named-entity types."""

    def __init__(self, parents: dict[str, str]):
        self.parents = dict(parents)
        self.types = set(self.parents) | set(self.parents.values())
        for t in self.parents:
            self.ancestors(t)  # raises on cycles

    def ancestors(self, t: str) -> list[str]:
        out = []
        seen = {t}
        while t in self.parents:
            t = self.parents[t]
            if t in seen:
                raise ValueError(f"cycle in entity type ontology at {t!r}")
            seen.add(t)
            out.append(t)
        return out

    def depth(self, t: str) -> int:
        return len(self.ancestors(t))

    def __contains__(self, t: str) -> bool:
        return t in self.types

    def most_specific(self, types: Sequence[str]) -> str:
        """Choose the root type for a merged named entity.

        Only types known to the ontology compete when any are present. Among
        them, a type that is an ancestor of another listed type loses; the
        deepest survivor wins, then the most frequent, then the first listed.
        Without ontology types the most frequent type wins.
        """
        if not types:
            raise ValueError("no types given")
        freq = Counter(types)
        first = {}
        for i, t in enumerate(types):
            first.setdefault(t, i)
        known = [t for t in first if t in self.types]
        if not known:
            return min(first, key=lambda t: (-freq[t], first[t]))
        covered = set()
        for t in known:
            covered.update(self.ancestors(t))
        leaves = [t for t in known if t not in covered]
        return min(leaves, key=lambda t: (-self.depth(t), -freq[t], first[t]))

    @classmethod
    def load(cls, path: Optional[Path] = None) -> "EntityTypeOntology":
        path = Path(path) if path else data_dir() / ONTOLOGY_FILE
        parents: dict[str, str] = {}
        for child, parent in _rows(path):
            if child in parents and parents[child] != parent:
                raise ValueError(f"{path}: type {child!r} has two parents")
            parents[child] = parent
        return cls(parents)


@lru_cache(maxsize=None)
def _cached_lexicon(directory: str) -> PronounLexicon:
    return PronounLexicon.load(Path(directory) / PRONOUN_FILE)


@lru_cache(maxsize=None)
def _cached_ontology(directory: str) -> EntityTypeOntology:
    return EntityTypeOntology.load(Path(directory) / ONTOLOGY_FILE)


def default_lexicon() -> PronounLexicon:
    return _cached_lexicon(str(data_dir()))


def default_ontology() -> EntityTypeOntology:
    return _cached_ontology(str(data_dir()))
