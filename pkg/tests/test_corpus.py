import pytest
from hypothesis import given
from hypothesis import strategies as st

from qhal.corpus import (
    Vocabulary,
    build_vocabulary,
    depluralize,
    load_documents,
    normalize_query_word,
    tokenize,
)


def toks(text):
    return list(tokenize(text).tokens)


def test_plural_stripped_but_stems_distinct():
    assert toks("Battles and battling") == ["battle", "and", "battling"]


def test_empty():
    doc = tokenize("")
    assert doc.tokens == ()
    assert len(doc) == 0


def test_apostrophe_and_dash_split():
    assert toks("Iran–Contra affair's") == ["iran", "contra", "affair", "s"]
    assert toks("Iran-Contra") == ["iran", "contra"]


@pytest.mark.parametrize(
    "word, expected",
    [("is", "is"), ("has", "has"), ("less", "less"), ("glass", "glass"), ("cats", "cat"), ("juices", "juice"), ("bus", "bus")],
)
def test_depluralize(word, expected):
    assert depluralize(word) == expected


def test_digits_and_punctuation_separate():
    assert toks("room101b, x_y!") == ["room", "b", "x", "y"]


def test_unicode_letters_kept():
    assert toks("Café Ångström") == ["café", "ångström"]


def test_digest_tracks_content():
    assert tokenize("a b").source_digest == tokenize("a b").source_digest
    assert tokenize("a b").source_digest != tokenize("a  b").source_digest


@given(st.text())
def test_case_insensitive(text):
    assert tokenize(text).tokens == tokenize(text.upper()).tokens


@given(st.text())
def test_idempotent_on_normalized_text(text):
    once = tokenize(text).tokens
    assert tokenize(" ".join(once)).tokens == once


@given(st.text())
def test_tokens_are_lowercase_letters(text):
    for t in tokenize(text).tokens:
        assert t and all(ch.isalpha() for ch in t)
        assert t == t.casefold()


def test_vocabulary_lexicographic():
    v = build_vocabulary([tokenize("b a")])
    assert v.index == {"a": 0, "b": 1}
    assert build_vocabulary([tokenize("a"), tokenize("a")]).index == {"a": 0}
    v = build_vocabulary([tokenize("the quick brown fox")])
    assert v.index == {"brown": 0, "fox": 1, "quick": 2, "the": 3}


@given(st.lists(st.text(), max_size=5))
def test_vocabulary_bijective_and_deterministic(texts):
    docs = [tokenize(t) for t in texts]
    v1, v2 = build_vocabulary(docs), build_vocabulary(reversed(docs))
    assert v1 == v2
    assert sorted(v1.index.values()) == list(range(len(v1)))
    assert len(v1) == len({t for d in docs for t in d.tokens})


def test_encode_unknown_token_names_document():
    with pytest.raises(KeyError, match="zebra.*doc7"):
        Vocabulary(["a"]).encode(tokenize("zebra", "doc7"))


def test_query_word_normalization():
    assert normalize_query_word("Juices") == "juice"
    with pytest.raises(ValueError):
        normalize_query_word("Iran-Contra")
    with pytest.raises(ValueError):
        normalize_query_word("123")


def test_load_documents(tmp_path):
    (tmp_path / "b.txt").write_text("Oranges!", encoding="utf-8")
    (tmp_path / "a.txt").write_text("Juice", encoding="utf-8")
    docs = load_documents([tmp_path])
    assert [d.id for d in docs] == ["a", "b"]
    assert docs[1].tokens == ("orange",)
    with pytest.raises(FileNotFoundError):
        load_documents([tmp_path / "missing"])
    with pytest.raises(ValueError, match="duplicate"):
        load_documents([tmp_path / "a.txt", tmp_path / "a.txt"])
