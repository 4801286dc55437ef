import json

import pytest

from docamr.document import (BridgingRelation, Document, DocumentAnnotation, IdentityChain, ImplicitRole,
                             IngestionError, NodeRef, load_annotation, save_annotation)
from docamr.penman_io import parse_penman

from conftest import FIXTURES, load_fig

SENTS = parse_penman("# ::id a\n(x / boy)\n\n# ::id b\n(y / he)\n\n# ::id c\n(z / see-01 :ARG0 (w / she))")


def _doc(**kw):
    return Document("d", SENTS, DocumentAnnotation("d", **kw))


def test_annotation_json_round_trip(tmp_path):
    ann = DocumentAnnotation(
        "d",
        [IdentityChain("c0", (NodeRef("a", "x"), NodeRef("b", "y")))],
        [ImplicitRole(NodeRef("c", "z"), ":ARG1", "c0")],
        [BridgingRelation("part-whole", "c0", NodeRef("c", "w"))],
    )
    path = tmp_path / "ann.json"
    save_annotation(path, ann)
    assert load_annotation(path) == ann
    data = json.loads(path.read_text())
    assert data["implicit_roles"][0] == {"sent": "c", "var": "z", "role": ":ARG1", "target": {"chain": "c0"}}


def test_unresolved_references_are_listed_together():
    chain = IdentityChain("c0", (NodeRef("a", "nope"), NodeRef("zz", "x")))
    with pytest.raises(IngestionError) as err:
        _doc(chains=[chain])
    assert "(a, nope)" in str(err.value) and "(zz, x)" in str(err.value)


def test_node_in_two_chains():
    c0 = IdentityChain("c0", (NodeRef("a", "x"), NodeRef("b", "y")))
    c1 = IdentityChain("c1", (NodeRef("a", "x"), NodeRef("c", "w")))
    with pytest.raises(IngestionError, match="more than one chain"):
        _doc(chains=[c0, c1])


def test_implicit_role_must_be_core():
    with pytest.raises(IngestionError, match="core role"):
        _doc(implicit_roles=[ImplicitRole(NodeRef("c", "z"), ":op1", NodeRef("a", "x"))])


def test_bridging_checks():
    with pytest.raises(IngestionError, match="kind"):
        _doc(bridging=[BridgingRelation("cause", NodeRef("a", "x"), NodeRef("b", "y"))])
    with pytest.raises(IngestionError, match="itself"):
        _doc(bridging=[BridgingRelation("part-whole", NodeRef("a", "x"), NodeRef("a", "x"))])


def test_malformed_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"chains": [{"members": []}]}')
    with pytest.raises(IngestionError, match="missing field"):
        load_annotation(p)


def test_document_order():
    doc = load_fig("fig4")
    assert doc.sentence_index("fig4.3") == 3
    assert doc.member_order(NodeRef("fig4.2", "h")) == (2, 3)
