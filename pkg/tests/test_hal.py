import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qhal.corpus import Vocabulary, tokenize
from qhal.hal import (
    CacheFormatError,
    HalParams,
    MatrixCache,
    build_forward,
    dumps,
    loads,
    reciprocal,
    symmetrize,
    word_vector,
)

from dense_oracle import hal_dense

FOX = tokenize("the quick brown fox")
FOX_VOCAB = Vocabulary(FOX.tokens)

token_lists = st.lists(st.sampled_from("abcdefgh"), max_size=40)


def forward(tokens, l, weight=None):
    doc = tokenize(" ".join(tokens))
    vocab = Vocabulary(doc.tokens)
    params = HalParams(l) if weight is None else HalParams(l, weight)
    return build_forward(doc, vocab, params), vocab


def named(m, vocab):
    return {(vocab.words[r], vocab.words[c]): w for r, c, w in m.triplets()}


def test_forward_window_two():
    m = build_forward(FOX, FOX_VOCAB, HalParams(2))
    assert named(m, FOX_VOCAB) == {
        ("the", "quick"): 2,
        ("the", "brown"): 1,
        ("quick", "brown"): 2,
        ("quick", "fox"): 1,
        ("brown", "fox"): 2,
    }
    assert not m.symmetric


def test_forward_empty_document():
    m, _ = forward([], 5)
    assert m.n == 0 and m.nnz == 0


def test_forward_repeated_word_off_diagonal_when_out_of_reach():
    m, vocab = forward(["a", "b", "a"], 1)
    assert named(m, vocab) == {("a", "b"): 1, ("b", "a"): 1}


def test_same_type_within_window_hits_diagonal():
    m, vocab = forward(["a", "b", "a"], 2)
    assert named(m, vocab)[("a", "a")] == 1


def test_window_length_validated():
    with pytest.raises(ValueError):
        HalParams(0)


def test_unknown_token_rejected():
    with pytest.raises(KeyError, match="zebra"):
        build_forward(tokenize("zebra", "z"), FOX_VOCAB, HalParams(1))


def test_symmetrize_examples():
    s = symmetrize(build_forward(FOX, FOX_VOCAB, HalParams(2)))
    i, j = FOX_VOCAB.index["the"], FOX_VOCAB.index["quick"]
    assert s.entry(i, j) == s.entry(j, i) == 2
    m, vocab = forward(["a", "b", "a"], 1)
    assert named(symmetrize(m), vocab) == {("a", "b"): 2, ("b", "a"): 2}
    z, _ = forward([], 3)
    assert symmetrize(z).nnz == 0
    with pytest.raises(ValueError):
        symmetrize(symmetrize(m))


def test_word_vector_is_symmetric_row():
    s = symmetrize(build_forward(FOX, FOX_VOCAB, HalParams(2)))
    v = word_vector(s, "quick", FOX_VOCAB)
    assert dict(zip(FOX_VOCAB.words, v.components)) == {"brown": 2, "fox": 1, "quick": 0, "the": 2}
    assert not v.absent


def test_word_vector_absent_and_isolated():
    s = symmetrize(build_forward(FOX, FOX_VOCAB, HalParams(2)))
    v = word_vector(s, "zebra", FOX_VOCAB)
    assert v.absent and v.is_zero and v.components.shape == (4,)
    m, vocab = forward(["solo"], 4)
    v = word_vector(symmetrize(m), "solo", vocab)
    assert v.is_zero and not v.absent


@given(token_lists, st.integers(1, 12))
def test_matches_dense_loops(tokens, l):
    m, vocab = forward(tokens, l)
    idx, dense = hal_dense(list(tokenize(" ".join(tokens)).tokens), l)
    assert list(idx) == list(vocab.words)
    np.testing.assert_array_equal(symmetrize(m).matrix.toarray(), dense)


@given(token_lists, st.integers(1, 12))
def test_forward_invariants(tokens, l):
    m, _ = forward(tokens, l)
    s = symmetrize(m)
    dense = s.matrix.toarray()
    np.testing.assert_array_equal(dense, dense.T)
    assert s.total() == 2 * m.total()
    # cells can exceed l through repeated pairs, but every weight is a positive integer
    assert m.matrix.dtype.kind == "i"
    assert (m.matrix.data >= 1).all()
    n = len(tokens)
    expected_total = sum(l - d + 1 for i in range(n) for d in range(1, min(l, n - 1 - i) + 1))
    assert m.total() == expected_total


@given(token_lists, st.integers(1, 11))
def test_larger_window_keeps_entries(tokens, l):
    small, _ = forward(tokens, l)
    big, _ = forward(tokens, l + 1)
    small_support = small.matrix.toarray() > 0
    assert (big.matrix.toarray()[small_support] > 0).all()


def test_reciprocal_weight_is_pluggable():
    m, vocab = forward(["a", "b", "c"], 2, reciprocal)
    assert named(m, vocab) == {("a", "b"): 1.0, ("a", "c"): 0.5, ("b", "c"): 1.0}


# --- serialization -------------------------------------------------------


@given(token_lists, st.integers(1, 10))
def test_round_trip(tokens, l):
    m, _ = forward(tokens, l)
    assert loads(dumps(m)) == m


def test_round_trip_float_weights():
    m, _ = forward(list("abcabd"), 3, reciprocal)
    back = loads(dumps(m))
    assert back == m
    np.testing.assert_array_equal(back.matrix.toarray(), m.matrix.toarray())


def test_empty_matrix_is_header_only():
    m, _ = forward([], 2)
    assert dumps(m).decode().splitlines() == [f"QHAL1 {m.doc_digest} 2 0"]


def test_fox_file_has_five_triplets():
    m = build_forward(FOX, FOX_VOCAB, HalParams(2))
    lines = dumps(m).decode().splitlines()
    assert lines[0] == f"QHAL1 {FOX.source_digest} 2 4"
    assert len(lines) == 6
    triplets = [tuple(map(int, ln.split())) for ln in lines[1:]]
    assert triplets == sorted(triplets)


def test_symmetric_matrices_are_not_stored():
    with pytest.raises(ValueError):
        dumps(symmetrize(build_forward(FOX, FOX_VOCAB, HalParams(2))))


@pytest.mark.parametrize(
    "payload, where",
    [
        (b"", "line 1"),
        (b"QHAL2 x 2 4\n", "line 1"),
        (b"QHAL1 x two 4\n", "line 1"),
        (b"QHAL1 x 2 4\n0 1 2\n0 1\n", "line 3"),
        (b"QHAL1 x 2 4\n0 9 2\n", "line 2"),
        (b"QHAL1 x 2 4\n1 1 2\n0 1 2\n", "line 3"),
        (b"QHAL1 x 2 4\n0 1 -2\n", "line 2"),
        (b"QHAL1 x 2 4\n0 1 nan\n", "line 2"),
        (b"QHAL1 x 2 4\n0 1 abc\n", "line 2"),
        (b"QHAL1 x 2 4\n\xff", "byte offset"),
    ],
)
def test_malformed_streams(payload, where):
    with pytest.raises(CacheFormatError, match=where):
        loads(payload)


def test_cache_hit_after_build(tmp_path):
    cache = MatrixCache(tmp_path / "c")
    m1, built1 = cache.get_or_build(FOX, FOX_VOCAB, HalParams(3))
    m2, built2 = cache.get_or_build(FOX, FOX_VOCAB, HalParams(3))
    assert (built1, built2) == (True, False)
    assert m1 == m2
    assert len(list((tmp_path / "c").iterdir())) == 1


def test_cache_rejects_mismatched_header(tmp_path):
    cache = MatrixCache(tmp_path)
    path = cache.path_for(FOX.source_digest, 2)
    path.write_bytes(b"QHAL1 x 2 7\n")
    with pytest.raises(CacheFormatError):
        cache.get_or_build(FOX, FOX_VOCAB, HalParams(2))
