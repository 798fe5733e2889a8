import math

import pytest
from hypothesis import given, settings, strategies as st

from topkdoc import Collection, InvalidInputError, MissingMeasureError, Oracle, TopKIndex, build_index
from topkdoc.engine import quantize_par
from topkdoc.measures import NO_REPEAT, get_measure


def test_top_k_examples(c0_index):
    assert c0_index.top_k("ab", 2, "tf").items == [(0, 2), (1, 1)]
    assert c0_index.top_k("b", 3, "tf").items == [(0, 2), (2, 2), (1, 1)]
    assert c0_index.top_k("bbb", 3).items == []
    assert c0_index.top_k("z", 3).items == []


def test_top_k_reports_locus_depth(c0_index):
    res = c0_index.top_k("ab", 1)
    assert res.locus_depth >= 2
    assert res.docs == [0]
    assert c0_index.top_k("ba", 5).locus_depth >= 2


def test_k_beyond_df_returns_all(c0_index):
    assert c0_index.top_k("ab", 50).items == [(0, 2), (1, 1)]
    assert c0_index.top_k("ab", 0).items == []


def test_errors(c0_index):
    with pytest.raises(InvalidInputError):
        c0_index.top_k("ab", -1)
    with pytest.raises(MissingMeasureError):
        c0_index.top_k("ab", 1, "doclen")
    with pytest.raises(MissingMeasureError):
        get_measure("bm25")
    with pytest.raises(InvalidInputError):
        c0_index.report_tfidf_above("ab", -0.5)


def test_online(c0_index):
    it = c0_index.top_k_online("ab")
    assert it.take(2) == c0_index.top_k("ab", 2).items
    assert list(c0_index.top_k_online("a")) == [(0, 2), (1, 2), (2, 1)]
    assert list(c0_index.top_k_online("abba")) == []


def test_doc_frequency(c0_index):
    assert c0_index.doc_frequency("ab") == 2
    assert c0_index.doc_frequency("a") == 3
    assert c0_index.doc_frequency("aa") == 0
    assert c0_index.doc_frequency("") == 3


def test_tfidf(c0_index):
    assert [d for d, _, _ in c0_index.report_tfidf_above("ab", 0)] == [0, 1]
    assert c0_index.report_tfidf_above("ab", 2 * math.log(3 / 2)) == [(0, 2, 2 * math.log(3 / 2))]
    assert c0_index.report_tfidf_above("a", 0.01) == []
    assert [d for d, _, _ in c0_index.report_tfidf_above("a", 0)] == [0, 1, 2]


def test_k_mine(c0_index):
    assert c0_index.k_mine("ab", 2) == [0]
    assert sorted(c0_index.k_mine("ab", 1)) == [0, 1]
    assert c0_index.k_mine("ab", 3) == []


def test_k_repeats(c0_index):
    assert c0_index.k_repeats("a", 2) == [0, 1]
    assert c0_index.k_repeats("a", 0) == []
    assert c0_index.k_repeats("b", 100) == [2, 0]  # gaps 1 and 2


def test_mindist_single_occurrence_tier(c0_index):
    assert c0_index.top_k("a", 3, "mindist").items == [(0, -2.0), (1, -2.0), (2, NO_REPEAT)]


def test_docrank(c0_index):
    assert c0_index.top_k("a", 3, "docrank").items == [(2, 3.0), (1, 2.0), (0, 1.0)]


def test_top_k_param(c0_index):
    assert c0_index.top_k_param("ab", 2, 2, math.inf, "tf", "tf").items == [(0, 2)]
    assert c0_index.top_k_param("ab", 2, 0, 1023).items == c0_index.top_k("ab", 2).items
    assert c0_index.top_k_param("ab", 2, 500, 900).items == []
    assert c0_index.top_k_param("ab", 2, 3, 2).items == []
    assert c0_index.top_k_param("b", 3, 0, 3, "tf", "doclen").items == [(2, 2), (1, 1)]
    with pytest.raises(MissingMeasureError):
        c0_index.top_k_param("ab", 2, 0, 5, "tf", "mindist")


def test_param_online_prefix(c0_index):
    stream = c0_index.top_k_param_online("a", 0, 10, "docrank", "doclen")
    assert list(stream) == c0_index.top_k_param("a", 5, 0, 10, "docrank", "doclen").items


def test_quantize_par_clamps(caplog):
    import numpy as np
    z = quantize_par(np.array([-1.0, 0.5, 3.9, 2000.0, -np.inf, np.inf]), 16, "x")
    assert z.tolist() == [0, 0, 3, 15, 0, 15]
    assert "clamped" in caplog.text


def test_measure_swap_keeps_candidates(c0_index):
    for p in ("a", "b", "ab", "ba", "bab"):
        sets = {frozenset(c0_index.top_k(p, 10, m).docs) for m in ("tf", "mindist", "docrank")}
        assert len(sets) == 1


def test_integer_alphabet_collection():
    coll = Collection(sigma=3)
    for t in ([1, 2, 3, 1, 2], [3, 3], [2, 1, 2]):
        coll.add_document(t)
    index = TopKIndex.build(coll.freeze())
    assert index.top_k([1, 2], 5).items == [(0, 2), (2, 1)]
    assert index.top_k([3, 3, 3], 5).items == []


docs = st.lists(st.text(alphabet="abc", min_size=1, max_size=25), min_size=1, max_size=6)


@settings(max_examples=40, deadline=None)
@given(docs, st.lists(st.integers(0, 5), min_size=6, max_size=6),
       st.text(alphabet="abc", max_size=4), st.integers(0, 8))
def test_engine_matches_oracle(texts, ranks, pattern, k):
    index = build_index(texts, ranks[:len(texts)], pars=("tf", "doclen"))
    oracle = Oracle(index.collection)
    for m in ("tf", "mindist", "docrank"):
        assert index.top_k(pattern, k, m).items == oracle.top_k(pattern, k, m)
        assert list(index.top_k_online(pattern, m)) == oracle.ranked(pattern, m)
    assert index.doc_frequency(pattern) == oracle.doc_frequency(pattern)
    assert index.top_k_param(pattern, k, 1, 3, "tf", "doclen").items == \
        oracle.top_k_param(pattern, k, 1, 3, "tf", "doclen")
    for K in (0, 1, 3):
        assert index.k_mine(pattern, K) == oracle.k_mine(pattern, K)
        assert index.k_repeats(pattern, K) == oracle.k_repeats(pattern, K)
    assert index.report_tfidf_above(pattern, 0.3) == oracle.tfidf_above(pattern, 0.3)
