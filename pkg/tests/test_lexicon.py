import pytest

from docamr.lexicon import EntityTypeOntology, PronounLexicon, default_lexicon, default_ontology


def test_pronoun_tiers():
    lex = default_lexicon()
    assert lex.most_specific(["someone", "he"]) == "he"
    assert lex.most_specific(["she", "he"]) == "she"  # same tier: first mention
    assert "i" in lex and "boy" not in lex


def test_ontology_prefers_specific_types():
    onto = default_ontology()
    assert onto.most_specific(["organization", "criminal-organization"]) == "criminal-organization"
    assert onto.most_specific(["person", "country"]) == "country"  # deeper type wins
    assert onto.most_specific(["organization", "person", "person"]) == "person"
    assert onto.most_specific(["blob", "blob", "person"]) == "person"
    assert onto.most_specific(["blob", "glob", "glob"]) == "glob"


def test_ontology_cycle_detected():
    with pytest.raises(ValueError, match="cycle"):
        EntityTypeOntology({"a": "b", "b": "a"})


def test_lexicon_needs_interlocutors():
    with pytest.raises(ValueError):
        PronounLexicon({"he": 0})


def test_data_dir_override(tmp_path, monkeypatch):
    (tmp_path / "pronouns.tsv").write_text("i\tfirst\nyou\tfirst\nzed\tfirst\n")
    (tmp_path / "entity_types.tsv").write_text("spaceship\tthing\n")
    monkeypatch.setenv("DOCAMR_DATA", str(tmp_path))
    assert "zed" in default_lexicon()
    assert "spaceship" in default_ontology()
    monkeypatch.delenv("DOCAMR_DATA")
    assert "zed" not in default_lexicon()
