import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from docamr.builder import build
from docamr.docgraph import docgraph_from_amr
from docamr.errors import UsageError
from docamr.penman_io import parse_penman
from docamr.smatch import (SearchConfig, candidate_pool, coref_counts, exact_match, extract_triples,
                           hill_climb, match_count, prf)
from docamr.smatch.corpus import score_corpus
from docamr.synth import small_pair

from conftest import load_fig
from oracles import brute_force_best, matched_under


def ts(text, doc=True):
    (g,) = parse_penman(text)
    return extract_triples(docgraph_from_amr(g) if doc else g)


def test_single_node_graph():
    t = ts("(a / and)", doc=False)
    assert len(t) == 1 and t.concepts == ["and"]


def test_fig4_triples():
    out = build(load_fig("fig4"))
    t = extract_triples(out)
    assert len(t.concepts) == 9 and "document" in t.concepts
    assert sum(1 for r in t.relation_triples() if r[1] == ":coref") == 3


def test_no_coref_count():
    doc = load_fig("fig4")
    t = extract_triples(build(doc, mode="no-coref"))
    per_sentence = sum(len(extract_triples(g)) for g in doc.sentences)
    # each sentence's triples, plus the document instance and its :snt edges
    assert len(t) == per_sentence + 1 + len(doc.sentences)


def test_prf_edge_cases():
    assert prf(0, 0, 0) == (0.0, 0.0, 0.0)
    p, r, f = prf(3, 4, 6)
    assert (p, r) == (0.75, 0.5) and abs(f - 0.6) < 1e-12


def test_pool_constrained_by_sentence():
    g = extract_triples(build(load_fig("fig5c")))
    pool = candidate_pool(g, g, constrained=True)
    for i, cands in enumerate(pool):
        prov = g.provenance[i]
        assert i in cands
        if len(prov) == 1:
            (k,) = prov
            assert all(k in g.provenance[j] for j in cands)
    free = candidate_pool(g, g)
    assert all(set(c) <= set(f) for c, f in zip(pool, free))
    # say-01 occurs in sentences 1 and 3 and must not cross over when constrained
    says = [i for i, c in enumerate(g.concepts) if c == "say-01"]
    assert len(says) == 2
    assert says[1] in free[says[0]] and says[1] not in pool[says[0]]


def test_pool_needs_equal_sentence_counts():
    a = extract_triples(build(load_fig("fig4")))
    b = extract_triples(build(load_fig("fig1")))
    if a.n_sentences != b.n_sentences:
        with pytest.raises(UsageError):
            candidate_pool(a, b, constrained=True)
        candidate_pool(a, b)


def test_identical_two_sentence_pair():
    text = "# ::id d\n(doc / document :snt1 (s1.a / see-01 :ARG0 (s1.b / boy)) :snt2 (s2.c / go-02 :ARG0 s1.b))"
    a = ts(text)
    for constrained in (False, True):
        _, r = hill_climb(a, a, SearchConfig(constrained=constrained))
        assert r.f1 == 1.0


def test_swapped_arguments():
    a = ts("(w / want-01 :ARG0 (b / boy) :ARG1 (g / girl))", doc=False)
    b = ts("(w / want-01 :ARG0 (g / girl) :ARG1 (b / boy))", doc=False)
    _, r = exact_match(a, b)
    assert r.matched == 3 and r.f1_exact == Fraction(3, 5)
    assert hill_climb(a, b)[1].matched == 3


def test_disjoint_graphs():
    a = ts("(a / alpha :mod (b / beta))", doc=False)
    b = ts("(c / gamma :ARG0 (d / delta))", doc=False)
    assert exact_match(a, b)[1].matched == 0
    assert hill_climb(a, b)[1].f1 == 0.0


def test_exact_size_limit():
    a = extract_triples(build(load_fig("fig4")))
    with pytest.raises(UsageError):
        exact_match(a, a, max_nodes=3)


def test_restarts_validated():
    with pytest.raises(UsageError):
        SearchConfig(restarts=0)


def _pair(seed):
    g, p = small_pair(random.Random(seed), doc_id=f"p{seed}")
    return extract_triples(p), extract_triples(g)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_exact_equals_brute_force(seed):
    s, t = _pair(seed)
    assume(max(len(s.concepts), len(t.concepts)) <= 8)
    mapping, r = exact_match(s, t)
    assert r.matched == brute_force_best(s, t)
    assert matched_under(s, t, mapping) == r.matched


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.booleans())
def test_hill_climb_bounded_by_exact(seed, constrained):
    s, t = _pair(seed)
    mapping, r = hill_climb(s, t, SearchConfig(constrained=constrained, seed=seed))
    _, e = exact_match(s, t, constrained)
    assert r.matched <= e.matched
    assert matched_under(s, t, mapping) == r.matched
    assert 0.0 <= r.precision <= 1.0 and 0.0 <= r.recall <= 1.0 and 0.0 <= r.f1 <= 1.0
    # constrained search explores a subset of mappings
    assert e.matched <= exact_match(s, t, False)[1].matched


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 1000))
def test_identity_scores_one(seed, search_seed):
    _, t = _pair(seed)
    for constrained in (False, True):
        assert hill_climb(t, t, SearchConfig(seed=search_seed, constrained=constrained))[1].f1 == 1.0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_more_restarts_never_worse(seed):
    s, t = _pair(seed)
    scores = [hill_climb(s, t, SearchConfig(restarts=k, seed=seed))[1].matched for k in (1, 2, 4, 8)]
    assert scores == sorted(scores)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_exact_f1_symmetric(seed):
    s, t = _pair(seed)
    a, b = exact_match(s, t)[1], exact_match(t, s)[1]
    assert a.matched == b.matched and a.f1_exact == b.f1_exact
    assert (a.precision, a.recall) == (b.recall, b.precision)


def test_match_count_agrees_with_names():
    s, t = _pair(3)
    m, r = hill_climb(s, t)
    arr = np.full(len(s.concepts), -1)
    for a, b in m.items():
        arr[s.index[a]] = t.index[b]
    assert match_count(s, t, arr) == r.matched == matched_under(s, t, m)


FIG4_PRED = """# ::id fig4
(doc / document
    :snt1 (s1.f / favor)
    :snt2 (s2.g / give-01
        :coref (ce0 / coref-entity)
        :ARG0 (s2.y / you)
        :ARG1 (s2.l / lift)
        :ARG2 (s3.f / fellow))
    :snt3 (s3.h / help-01
        :coref ce0
        :manner (s3.o / out)
        :ARG2 s3.f))"""


def test_coref_subscore_by_hand():
    gold = extract_triples(build(load_fig("fig4")))
    pred = ts(FIG4_PRED)
    # gold items: three :coref edges, the coref-entity instance and the two
    # edges into fellow (s3.f sits in sentences 2 and 3); pred lacks one edge
    identity = [gold.index[v] for v in pred.variables]
    assert coref_counts(pred, gold, identity) == (5, 5, 6)
    _, r = hill_climb(pred, gold)
    assert (r.coref_matched, r.coref_source, r.coref_target) == (5, 5, 6)
    assert r.coref_precision == 1.0
    assert r.coref_recall == pytest.approx(5 / 6)
    assert r.coref_f1 == pytest.approx(10 / 11)


def test_coref_subscore_zero_without_coref():
    doc = load_fig("fig4")
    gold, pred = extract_triples(build(doc)), extract_triples(build(doc, mode="no-coref"))
    r = hill_climb(pred, gold)[1]
    assert r.coref_source == 0 and r.coref_f1 == 0.0


def test_score_corpus():
    pairs = [small_pair(random.Random(k), doc_id=f"d{k}") for k in range(6)]
    gold, pred = [g for g, _ in pairs], [p for _, p in pairs]
    cfg = SearchConfig(seed=5)
    res = score_corpus(gold, pred, cfg, threads=1)
    singles = [hill_climb(extract_triples(p), extract_triples(g), cfg)[1] for g, p in pairs]
    assert [r.matched for r in res.per_doc] == [r.matched for r in singles]
    m = sum(r.matched for r in singles)
    ps, gs = sum(r.source_total for r in singles), sum(r.target_total for r in singles)
    assert res.total.f1 == pytest.approx(2 * m / (ps + gs))
    threaded = score_corpus(gold, pred, cfg, threads=4)
    assert [r.matched for r in threaded.per_doc] == [r.matched for r in res.per_doc]
    exact = score_corpus(gold, pred, cfg, exact_max=10)
    assert all(e.matched >= h.matched for e, h in zip(exact.per_doc, res.per_doc))


def test_score_corpus_mismatch():
    g, p = small_pair(random.Random(0), doc_id="a")
    g2, p2 = small_pair(random.Random(1), doc_id="b")
    with pytest.raises(UsageError):
        score_corpus([g], [p, p2])
    with pytest.raises(UsageError):
        score_corpus([g], [p2])
