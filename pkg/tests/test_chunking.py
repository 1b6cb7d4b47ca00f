import pytest
from hypothesis import given, settings, strategies as st

from confact.chunking import (DEFAULT_MAX_WORDS, Granularity, chunk_document, chunk_paragraphs,
                              chunk_sentences, paragraph_spans)
from confact.corpus import EvidenceDocument


def doc(content, doc_id="d1", url="https://example.com/a"):
    return EvidenceDocument(doc_id, url, content)


def words(n, stem="w"):
    return " ".join(f"{stem}{i}" for i in range(n))


def assert_covers(d, passages):
    """Spans are ordered, disjoint, match the text, and only whitespace is left out."""
    pos = 0
    for p in passages:
        s, e = p.char_span
        assert s >= pos
        assert d.content[pos:s].strip() == ""
        assert d.content[s:e] == p.text
        assert p.word_count == len(p.text.split())
        pos = e
    assert d.content[pos:].strip() == ""


def test_long_paragraph_splits_256_44():
    ps = chunk_paragraphs(doc(words(300)))
    assert [p.word_count for p in ps] == [256, 44]


def test_short_paragraphs_merge():
    d = doc(words(100, "a") + "\n\n" + words(100, "b"))
    ps = chunk_paragraphs(d)
    assert [p.word_count for p in ps] == [200]
    assert_covers(d, ps)


def test_merge_stops_at_limit():
    d = doc("\n\n".join(words(100, c) for c in "abc"))
    assert [p.word_count for p in chunk_paragraphs(d)] == [200, 100]


def test_oversized_paragraph_not_merged_with_neighbours():
    d = doc(words(10, "a") + "\n\n" + words(300, "b") + "\n\n" + words(10, "c"))
    ps = chunk_paragraphs(d)
    assert [p.word_count for p in ps] == [10, 256, 44, 10]
    assert_covers(d, ps)


def test_long_paragraph_prefers_sentence_boundaries():
    sent = words(99) + "."
    text = " ".join(sent.replace("w", f"S{k}w", 1) for k in range(3))
    ps = chunk_paragraphs(doc(text))
    assert [p.word_count for p in ps] == [198, 99]
    assert ps[0].text.endswith(".")


def test_sentences():
    ps = chunk_sentences(doc("A. B? C!"))
    assert [p.text for p in ps] == ["A.", "B?", "C!"]
    assert all(p.granularity is Granularity.SENTENCE for p in ps)


@pytest.mark.parametrize("text", [
    "U.S. economy grew.",
    "Dr. Smith arrived at 5 p.m. Monday.",
    "See e.g. Table Four for details.",
    "Mr. Jones met Mrs. Jones.",
])
def test_abbreviations_do_not_split(text):
    assert len(chunk_sentences(doc(text))) == 1


def test_sentence_with_closing_quote():
    ps = chunk_sentences(doc('He said "It is fake." Then he left.'))
    assert [p.text for p in ps] == ['He said "It is fake."', "Then he left."]


def test_passage_ids_and_metadata():
    ps = chunk_document(doc("One.\n\nTwo.", doc_id="c1-d0", url="https://www.bbc.co.uk/x"), "sent")
    assert [p.passage_id for p in ps] == ["c1-d0:s0", "c1-d0:s1"]
    assert {p.source_domain for p in ps} == {"bbc.co.uk"}
    assert chunk_document(doc("One."))[0].passage_id == "d1:p0"


def test_empty_content():
    assert chunk_paragraphs(doc("")) == []
    assert chunk_sentences(doc("  \n\n ")) == []


def test_paragraph_break_with_spaces():
    assert len(paragraph_spans("a\n   \n b")) == 2
    assert len(paragraph_spans("a\nb")) == 1


def test_bad_max_words():
    with pytest.raises(ValueError):
        chunk_paragraphs(doc("x"), max_words=0)


_word = st.text(alphabet="abcXYZ.!?,'\"", min_size=1, max_size=8)
_sep = st.sampled_from([" ", " ", " ", "\n", "\n\n", "\n \n", "  \t"])
_content = st.lists(st.tuples(_word, _sep), max_size=400).map(lambda xs: "".join(w + s for w, s in xs))


@settings(max_examples=200, deadline=None)
@given(_content, st.integers(min_value=1, max_value=300))
def test_paragraph_invariants(content, max_words):
    d = doc(content)
    ps = chunk_paragraphs(d, max_words)
    assert all(p.word_count <= max_words for p in ps)
    assert_covers(d, ps)


@settings(max_examples=200, deadline=None)
@given(_content)
def test_sentence_invariants(content):
    d = doc(content)
    assert_covers(d, chunk_sentences(d))


def test_default_limit():
    assert DEFAULT_MAX_WORDS == 256
