import pytest
from hypothesis import given, strategies as st

from topkdoc import Collection, InvalidInputError


def test_add_document_assigns_dense_ids():
    coll = Collection(sigma=2)
    assert coll.add_document([1, 2, 1, 2]) == 0
    assert coll.n == 5
    assert coll.add_document([1, 2, 1]) == 1
    assert coll.add_document([2, 2, 1]) == 2
    assert coll.n == 13


def test_rejects_empty_and_out_of_range():
    coll = Collection(sigma=2)
    with pytest.raises(InvalidInputError):
        coll.add_document([])
    with pytest.raises(InvalidInputError):
        coll.add_document([1, 3])
    with pytest.raises(InvalidInputError):
        coll.add_document([0])


def test_position_to_doc(c0):
    assert c0.position_to_doc(0) == (0, 0)
    assert c0.position_to_doc(4) == (0, 4)
    assert c0.position_to_doc(7) == (1, 2)
    assert c0.position_to_doc(12) == (2, 3)
    with pytest.raises(IndexError):
        c0.position_to_doc(13)
    with pytest.raises(IndexError):
        c0.position_to_doc(-1)


def test_frozen_collection_is_read_only(c0):
    with pytest.raises(InvalidInputError):
        c0.add_document([1])


def test_sentinels_sort_below_symbols_and_by_doc(c0):
    keys = c0.keys()
    sentinel = [keys[c0.doc_start(d) + len(c0.docs[d])] for d in range(c0.D)]
    assert sentinel == sorted(sentinel) == list(range(c0.D))
    assert min(c0.symbol_key(s) for s in range(1, c0.sigma + 1)) > max(sentinel)


def test_byte_alphabet_is_dense_and_ordered():
    coll = Collection.from_bytes([b"zay", b"a"])
    assert coll.sigma == 3
    assert coll.encode("ayz") == [1, 2, 3]
    assert coll.encode("q") is None
    assert coll.decode([3, 1]) == b"za"


def test_default_rank_is_zero():
    coll = Collection.from_bytes(["ab", "b"])
    assert [d.rank for d in coll.docs] == [0.0, 0.0]


def test_manifest(c0_manifest):
    coll = Collection.from_manifest(c0_manifest)
    assert coll.D == 3 and coll.n == 13
    assert [d.rank for d in coll.docs] == [1.0, 2.0, 3.0]
    assert [d.name for d in coll.docs] == ["d0.txt", "d1.txt", "d2.txt"]


def test_manifest_missing_file_is_named(tmp_path):
    (tmp_path / "m.txt").write_text("ghost.txt\n")
    with pytest.raises(FileNotFoundError, match="ghost.txt"):
        Collection.from_manifest(tmp_path / "m.txt")


@given(st.lists(st.lists(st.integers(1, 5), min_size=1, max_size=12), min_size=1, max_size=6))
def test_position_round_trip(texts):
    coll = Collection(sigma=5)
    for t in texts:
        coll.add_document(t)
    coll.freeze()
    assert coll.n == sum(len(t) + 1 for t in texts)
    for d, t in enumerate(texts):
        for off in range(len(t) + 1):
            assert coll.position_to_doc(coll.doc_to_position(d, off)) == (d, off)
