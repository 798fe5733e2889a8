import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from topkdoc import Collection
from topkdoc.measures import MEASURES
from topkdoc.oracle import occurrences
from topkdoc.suffix_index import (NU, ROOT, assign_columns, build_tree, compute_links,
                                  lcp_array, mark_and_link, suffix_array)


def naive_sa(keys):
    return sorted(range(len(keys)), key=lambda i: list(keys[i:]))


@pytest.fixture(scope="module")
def c0_tree(c0):
    tree = build_tree(c0)
    links = compute_links(tree)
    assign_columns(tree, links)
    return tree, links


def test_single_symbol_tree():
    tree = build_tree(Collection.from_bytes(["a"]))
    assert tree.leaf_count == 2
    assert len(tree.children(ROOT)) == 2
    assert all(tree.is_leaf(c) for c in tree.children(ROOT))
    assert tree.num_nodes == 4  # virtual node, root, two leaves


def test_c0_shape(c0, c0_tree):
    tree, links = c0_tree
    assert tree.leaf_count == 13
    v = tree.locus(c0.encode("ab"))
    assert tree.string_depth[v] == 2
    assert len(tree.children(v)) == 2
    assert len(links) <= 26


def test_locus(c0, c0_tree):
    tree, _ = c0_tree
    assert tree.locus(c0.encode("")) == ROOT
    assert tree.locus(c0.encode("aab")) is None
    assert tree.locus(c0.encode("bbb")) is None
    v = tree.locus(c0.encode("bb"))
    assert bytes(c0.decode(tree.path(v)[:2])) == b"bb"


def test_suffix_and_lcp_arrays_match_naive(c0):
    keys = list(c0.keys())
    sa = suffix_array(keys)
    assert sa.tolist() == naive_sa(keys)
    lcp = lcp_array(keys, sa)
    for i in range(1, len(sa)):
        a, b = keys[sa[i - 1]:], keys[sa[i]:]
        h = 0
        while h < min(len(a), len(b)) and a[h] == b[h]:
            h += 1
        assert lcp[i] == h


def test_c0_links_for_ab(c0, c0_tree):
    tree, links = c0_tree
    v = tree.locus(c0.encode("ab"))
    at_v = {int(links.doc[i]): int(links.last[i] - links.first[i] + 1)
            for i in np.flatnonzero(links.source == v)}
    assert at_v == {0: 2}
    # d1's single "ab" occurrence is a leaf in the subtree of v
    d1 = [i for i in range(len(links)) if links.doc[i] == 1 and tree.is_ancestor(v, links.source[i])
          and links.target[i] != v and not tree.is_ancestor(v, links.target[i])]
    assert len(d1) == 1 and tree.is_leaf(int(links.source[d1[0]]))


def test_mark_and_link_weights(c0):
    tree = build_tree(c0)
    out = mark_and_link(tree, MEASURES["tf"])
    assert [l.column for l in out] == list(range(len(out)))
    assert all(l.weight >= 1 for l in out)


def test_single_document_chain():
    text = "abaababa"
    coll = Collection.from_bytes([text])
    tree = build_tree(coll)
    links = compute_links(tree)
    assert len(links) <= 2 * len(text) + 1
    # following targets from any source reaches the virtual node
    by_source = dict(zip(links.source.tolist(), links.target.tolist()))
    for s in by_source:
        seen = 0
        while s != NU:
            s = by_source[s]
            seen += 1
        assert seen <= tree.num_nodes


def test_columns_and_nesting(c0_tree):
    tree, links = c0_tree
    assert tree.col_lo[NU] == 0 and tree.col_hi[NU] == len(links) - 1
    for v in range(1, tree.num_nodes):
        assert tree.col_lo[v] <= tree.col_hi[v] + 1
        for c in tree.children(v):
            assert tree.col_lo[v] <= tree.col_lo[c] and tree.col_hi[c] <= tree.col_hi[v]
            assert tree.string_depth[c] > tree.string_depth[v]
    for i, s in enumerate(links.source.tolist()):
        assert tree.col_lo[s] <= i <= tree.col_hi[s]


def test_dump_has_one_line_per_node(c0_tree):
    tree, _ = c0_tree
    lines = tree.dump().splitlines()
    assert len(lines) == tree.num_nodes - 1
    assert lines[0].split("\t")[:3] == ["1", "0", "0"]


texts = st.lists(st.text(alphabet="abc", min_size=1, max_size=20), min_size=1, max_size=5)


@settings(max_examples=60, deadline=None)
@given(texts)
def test_links_invariants(docs):
    coll = Collection.from_bytes(docs)
    tree = build_tree(coll)
    links = compute_links(tree)
    assert len(links) <= 2 * coll.n
    for s, t in zip(links.source.tolist(), links.target.tolist()):
        assert t == NU or (tree.is_ancestor(t, s) and t != s)
    # sources per document: its leaves plus internal nodes branching on it
    for d in range(coll.D):
        srcs = set(links.source[links.doc == d].tolist())
        leaves = {int(tree.leaf_of_sa[i]) for i in range(coll.n)
                  if coll.position_to_doc(int(tree.sa[i]))[0] == d}
        internal = set()
        for v in range(1, tree.num_nodes):
            if tree.is_leaf(v):
                continue
            hits = sum(1 for c in tree.children(v)
                       if any(coll.position_to_doc(int(tree.sa[i]))[0] == d
                              for i in range(tree.sa_lo[c], tree.sa_hi[c] + 1)))
            if hits >= 2:
                internal.add(v)
        assert srcs == leaves | internal


@settings(max_examples=40, deadline=None)
@given(texts, st.text(alphabet="abc", max_size=4))
def test_unique_link_per_containing_document(docs, pattern):
    coll = Collection.from_bytes(docs)
    tree = build_tree(coll)
    links = compute_links(tree)
    y_of, doc_of = assign_columns(tree, links)
    codes = coll.encode(pattern)
    v = tree.locus(codes) if codes is not None else None
    expected = {d.doc_id: occurrences(d.text, codes) for d in coll.docs} if codes is not None else {}
    expected = {d: p for d, p in expected.items() if p}
    if v is None:
        assert not expected
        return
    cols = [x for x in range(tree.col_lo[v], tree.col_hi[v] + 1) if y_of[x] <= tree.depth[v] - 1]
    assert sorted(doc_of[cols].tolist()) == sorted(expected)
    for x in cols:
        assert links.positions(x).tolist() == expected[int(doc_of[x])]
