import json
import random

import pytest

from docamr.builder import build
from docamr.document import Document, NodeRef
from docamr.errors import UsageError
from docamr.injector import (Mention, MentionCluster, NodeSpan, assign_mentions, best_node, inject,
                             load_mentions, mentions_json, node_spans, spanning_tree)
from docamr.penman_io import parse_penman
from docamr.synth import random_document


def one(text):
    (g,) = parse_penman(text)
    return g


def spans_by_var(g):
    return {s.variable: s for s in node_spans(g)}


def test_named_entity_span_and_height():
    g = one('# ::id a\n# ::tok Bill slept\n(s / sleep-01~1 :ARG0 (p / person :name (n / name :op1 "Bill"~0)))')
    sp = spans_by_var(g)
    assert (sp["n"].start, sp["n"].end, sp["n"].height) == (0, 0, 1)
    assert (sp["p"].start, sp["p"].end, sp["p"].height) == (0, 0, 2)
    assert (sp["s"].start, sp["s"].end) == (0, 1)


def test_reentrancy_uses_first_edge():
    g = one("# ::id a\n# ::tok the boy wants to go\n"
            "(w / want-01~2 :ARG0 (b / boy~1) :ARG1 (g / go-02~4 :ARG0 b))")
    tree = spanning_tree(g)
    assert tree == {"w": ["b", "g"], "b": [], "g": []}
    sp = spans_by_var(g)
    assert (sp["g"].start, sp["g"].end) == (4, 4)
    assert (sp["w"].start, sp["w"].end) == (1, 4)


def test_inverse_edge_in_tree():
    g = one("# ::id a\n# ::tok a boy who runs\n(b / boy~1 :ARG0-of (r / run-01~3))")
    assert spanning_tree(g)["b"] == ["r"]
    assert spans_by_var(g)["b"].end == 3


def test_span_of_subtree():
    g = one("# ::id a\n# ::tok I said the big red dog barked\n"
            "(s / say-01~1 :ARG0 (i / i~0) :ARG1 (b / bark-01~6 :ARG0 (d / dog~5 :mod (r / red~4) :mod (g / big~3))))")
    sp = spans_by_var(g)
    assert (sp["d"].start, sp["d"].end) == (3, 5)
    assert best_node(node_spans(g), 3, 6).variable == "b"
    assert best_node(node_spans(g), 2, 5).variable == "s"
    assert best_node(node_spans(g), 3, 5).variable == "d"


def test_shortest_then_tallest():
    spans = [NodeSpan("a", 0, 5, 3), NodeSpan("b", 1, 2, 0), NodeSpan("c", 1, 2, 1), NodeSpan("d", 1, 3, 2)]
    assert best_node(spans, 1, 2).variable == "c"
    assert best_node(spans, 0, 1).variable == "a"
    assert best_node(spans, 6, 6) is None
    # equal length and height: first in order
    assert best_node([NodeSpan("x", 0, 1, 1), NodeSpan("y", 0, 1, 1)], 0, 0).variable == "x"


def _two_sentences():
    return parse_penman(
        "# ::id s1\n# ::tok John saw Mary\n"
        '(s / see-01~1 :ARG0 (p / person :name (n / name :op1 "John"~0)) :ARG1 (p2 / person :name (n2 / name :op1 "Mary"~2)))\n\n'
        "# ::id s2\n# ::tok He waved\n(w / wave-01~1 :ARG0 (h / he~0))")


def test_inject_builds_valid_chains():
    sents = _two_sentences()
    clusters = [MentionCluster("k", (Mention("s1", 0, 0), Mention("s2", 0, 0)))]
    ann, rep = inject(sents, clusters, "d")
    assert [c.members for c in ann.chains] == [(NodeRef("s1", "p"), NodeRef("s2", "h"))]
    assert rep.reconciles() and rep.assigned == 2
    doc = Document("d", sents, ann)
    doc.validate()
    out = build(doc)
    assert "s2.h" not in out.instances


def test_within_sentence_cluster_discarded():
    sents = _two_sentences()
    clusters = [MentionCluster("k", (Mention("s1", 0, 0), Mention("s1", 2, 2)))]
    ann, rep = inject(sents, clusters, "d")
    assert ann.chains == [] and rep.discarded_clusters == ["k"]
    assert rep.reconciles()


def test_claimed_node_dropped():
    sents = _two_sentences()
    clusters = [MentionCluster("a", (Mention("s1", 0, 0), Mention("s2", 0, 0))),
                MentionCluster("b", (Mention("s1", 0, 0), Mention("s2", 1, 1)))]
    ann, rep = inject(sents, clusters, "d")
    assert len(ann.chains) == 1
    assert [reason for _, reason in rep.dropped] == ["node in another chain"]
    assert rep.discarded_clusters == ["b"] and rep.reconciles()


def test_unaligned_mention_dropped():
    sents = parse_penman("# ::id s1\n# ::tok a b c\n(x / xx~0)\n\n# ::id s2\n# ::tok d\n(y / yy~0)")
    clusters = [MentionCluster("k", (Mention("s1", 2, 2), Mention("s1", 0, 0), Mention("s2", 0, 0)))]
    ann, rep = inject(sents, clusters)
    assert rep.dropped[0][1] == "no containing node" and rep.reconciles()
    assert len(ann.chains) == 1


def test_bad_inputs():
    sents = _two_sentences()
    with pytest.raises(UsageError):
        inject(sents, [MentionCluster("k", (Mention("s9", 0, 0),))])
    with pytest.raises(UsageError):
        inject(sents, [MentionCluster("k", (Mention("s1", 0, 9),))])
    with pytest.raises(UsageError):
        node_spans(one("(a / alpha)"))


def test_mentions_json_round_trip(tmp_path):
    clusters = [MentionCluster("k", (Mention("s1", 0, 0), Mention("s2", 0, 1)))]
    path = tmp_path / "m.json"
    path.write_text(json.dumps(mentions_json("d", clusters)))
    assert load_mentions(path) == ("d", clusters)
    path.write_text("{")
    with pytest.raises(UsageError):
        load_mentions(path)


def _random_clusters(rng, sents, k=4):
    clusters = []
    for c in range(k):
        mentions = []
        for _ in range(rng.randint(1, 4)):
            g = rng.choice(sents)
            a = rng.randrange(len(g.tokens))
            b = rng.randrange(a, min(len(g.tokens), a + 3))
            mentions.append(Mention(g.id, a, b))
        clusters.append(MentionCluster(f"k{c}", tuple(mentions)))
    return clusters


@pytest.mark.parametrize("seed", range(30))
def test_total_deterministic_and_valid(seed):
    rng = random.Random(seed)
    doc = random_document(rng, f"r{seed}")
    clusters = _random_clusters(rng, doc.sentences)
    results = [inject(doc.sentences, clusters, doc.doc_id) for _ in range(10)]
    ann, rep = results[0]
    assert all(r == results[0] for r in results)
    assert rep.reconciles()
    Document(doc.doc_id, doc.sentences, ann).validate()
    members = [m for c in ann.chains for m in c.members]
    assert len(members) == len(set(members))


def test_assign_mentions_order():
    spans = {"a": [NodeSpan("x", 0, 0, 0)], "b": [NodeSpan("y", 0, 0, 0)], "c": [NodeSpan("z", 0, 0, 0)]}
    clusters = [MentionCluster("late", (Mention("b", 0, 0), Mention("c", 0, 0))),
                MentionCluster("early", (Mention("a", 0, 0), Mention("c", 0, 0)))]
    ann, _ = assign_mentions(spans, clusters, ["a", "b", "c"])
    # "late" claims z first; "early" then keeps only x and is discarded
    assert [c.members for c in ann.chains] == [(NodeRef("b", "y"), NodeRef("c", "z"))]
    assert ann.chains[0].chain_id == "c0"
