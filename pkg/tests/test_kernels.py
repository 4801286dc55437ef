import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from docamr.smatch import SearchConfig, candidate_pool, extract_triples, hill_climb, match_count
from docamr.smatch import _kernels
from docamr.smatch.search import build_problem, random_init
from docamr.synth import benchmark_corpus, small_pair

pytestmark = pytest.mark.skipif(not _kernels.NUMBA_AVAILABLE, reason="numba not installed")


def _problem(seed, constrained):
    g, p = small_pair(random.Random(seed))
    s, t = extract_triples(p), extract_triples(g)
    pool = candidate_pool(s, t, constrained)
    return s, t, pool, build_problem(s, t, pool)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.booleans(), st.integers(0, 100))
def test_backends_climb_identically(seed, constrained, init_seed):
    s, t, pool, prob = _problem(seed, constrained)
    m0 = random_init(pool, np.random.default_rng(init_seed))
    assert _kernels.total(prob, m0, "numba") == _kernels.total(prob, m0, "numpy") == match_count(s, t, m0)
    a, b = m0.copy(), m0.copy()
    sa, sb = _kernels.climb(prob, a, "numba"), _kernels.climb(prob, b, "numpy")
    assert sa == sb
    assert np.array_equal(a, b)
    assert sa == match_count(s, t, a) >= match_count(s, t, m0)
    # the result stays injective and inside the pool
    mapped = a[a >= 0]
    assert len(set(mapped.tolist())) == len(mapped)
    assert all(j < 0 or j in pool[i] for i, j in enumerate(a))


def test_backends_agree_on_documents():
    gold, pred = benchmark_corpus(7, 2, 12)
    for g, p in zip(gold, pred):
        s, t = extract_triples(p), extract_triples(g)
        for constrained in (False, True):
            a = hill_climb(s, t, SearchConfig(constrained=constrained, backend="numba"))
            b = hill_climb(s, t, SearchConfig(constrained=constrained, backend="numpy"))
            assert a[0] == b[0] and a[1].matched == b[1].matched


def test_env_flag_selects_numpy(monkeypatch):
    monkeypatch.setenv("DOCAMR_NO_NUMBA", "1")
    assert _kernels.backend_name() == "numpy"
    monkeypatch.setenv("DOCAMR_NO_NUMBA", "0")
    assert _kernels.backend_name() == "numba"
    monkeypatch.delenv("DOCAMR_NO_NUMBA")
    assert _kernels.backend_name() == "numba"


def test_unknown_backend():
    _, _, pool, prob = _problem(0, False)
    with pytest.raises(ValueError):
        _kernels.climb(prob, np.full(prob.n_s, -1, dtype=np.int64), "cuda")
