"""Split evidence documents into paragraph- or sentence-level passages.

Paragraphs are separated by blank lines. Consecutive paragraphs are packed
greedily into one passage while the total stays within ``max_words``; a
paragraph that is too long on its own is cut at sentence boundaries, and a
sentence that is still too long is cut every ``max_words`` words.

Every passage records the character span it was cut from, so
``doc.content[start:end] == passage.text`` always holds.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterator

from confact.corpus import EvidenceDocument

DEFAULT_MAX_WORDS = 256

_PARA_BREAK = re.compile(r"\n[ \t\r\f\v]*\n\s*")
_WORD = re.compile(r"\S+")
# terminator run, optional closing quotes/brackets, whitespace, then an uppercase letter
_SENT_END = re.compile(r"[.!?]+[\"'”’)\]]*(?=\s+[\"'“‘(\[]?[A-Z])")

ABBREVIATIONS = frozenset(
    """
    mr mrs ms dr prof sr jr st mt ft gen col lt sgt capt gov sen rep rev hon pres
    vs etc inc ltd co corp dept univ est approx fig no nos vol pp ed eds al
    jan feb mar apr jun jul aug sep sept oct nov dec
    """.split()
)


class Granularity(str, Enum):
    PARAGRAPH = "para"
    SENTENCE = "sent"


@dataclass(frozen=True)
class Passage:
    passage_id: str
    parent_doc_id: str
    text: str
    word_count: int
    granularity: Granularity
    char_span: tuple[int, int]
    source_domain: str = ""


def count_words(text: str) -> int:
    return len(text.split())


def _trimmed(text: str, start: int, end: int) -> tuple[int, int] | None:
    while start < end and text[start].isspace():
        start += 1
    while end > start and text[end - 1].isspace():
        end -= 1
    return (start, end) if start < end else None


def paragraph_spans(text: str) -> list[tuple[int, int]]:
    spans = []
    pos = 0
    for m in _PARA_BREAK.finditer(text):
        span = _trimmed(text, pos, m.start())
        if span:
            spans.append(span)
        pos = m.end()
    span = _trimmed(text, pos, len(text))
    if span:
        spans.append(span)
    return spans


def _is_abbreviation(text: str, dot: int) -> bool:
    """True if the '.' at ``dot`` closes an abbreviation such as 'Dr.' or 'U.S.'."""
    start = dot
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    token = text[start:dot].lstrip("\"'(“[")
    if not token:
        return False
    if token.lower() in ABBREVIATIONS:
        return True
    # dotted acronyms: U.S, e.g, i.e, a.m
    return "." in token and all(len(p) <= 2 for p in token.split("."))


def sentence_spans(text: str, start: int = 0, end: int | None = None) -> list[tuple[int, int]]:
    """Rule-based sentence boundaries inside ``text[start:end]``.

    A sentence ends at ``.``, ``!`` or ``?`` followed by whitespace and an
    uppercase letter, unless the period closes a known abbreviation.
    """
    end = len(text) if end is None else end
    spans = []
    pos = start
    for m in _SENT_END.finditer(text, start, end):
        run = m.group()
        if run[0] == "." and run.rstrip("\"'”’)]") == "." and _is_abbreviation(text, m.start()):
            continue
        span = _trimmed(text, pos, m.end())
        if span:
            spans.append(span)
        pos = m.end()
    span = _trimmed(text, pos, end)
    if span:
        spans.append(span)
    return spans


def _word_spans(text: str, start: int, end: int) -> list[tuple[int, int]]:
    return [(m.start(), m.end()) for m in _WORD.finditer(text, start, end)]


def _split_long(text: str, span: tuple[int, int], max_words: int) -> Iterator[tuple[int, int]]:
    """Cut an oversized paragraph into pieces of at most ``max_words`` words."""
    pieces: list[tuple[int, int]] = []
    for s, e in sentence_spans(text, *span):
        words = _word_spans(text, s, e)
        if len(words) <= max_words:
            pieces.append((s, e))
            continue
        for i in range(0, len(words), max_words):
            chunk = words[i:i + max_words]
            pieces.append((chunk[0][0], chunk[-1][1]))
    yield from _pack(text, pieces, max_words)


def _pack(text: str, spans: list[tuple[int, int]], max_words: int) -> Iterator[tuple[int, int]]:
    current: tuple[int, int] | None = None
    current_words = 0
    for s, e in spans:
        n = count_words(text[s:e])
        if current is not None and current_words + n <= max_words:
            current = (current[0], e)
            current_words += n
            continue
        if current is not None:
            yield current
        current, current_words = (s, e), n
    if current is not None:
        yield current


def _make(doc: EvidenceDocument, spans, granularity: Granularity) -> list[Passage]:
    tag = "p" if granularity is Granularity.PARAGRAPH else "s"
    return [
        Passage(
            passage_id=f"{doc.doc_id}:{tag}{i}",
            parent_doc_id=doc.doc_id,
            text=doc.content[s:e],
            word_count=count_words(doc.content[s:e]),
            granularity=granularity,
            char_span=(s, e),
            source_domain=doc.source_domain,
        )
        for i, (s, e) in enumerate(spans)
    ]


def chunk_paragraphs(doc: EvidenceDocument, max_words: int = DEFAULT_MAX_WORDS) -> list[Passage]:
    if max_words < 1:
        raise ValueError("max_words must be at least 1")
    text = doc.content
    spans: list[tuple[int, int]] = []
    run: list[tuple[int, int]] = []
    for para in paragraph_spans(text):
        if count_words(text[para[0]:para[1]]) <= max_words:
            run.append(para)
            continue
        spans.extend(_pack(text, run, max_words))
        run = []
        spans.extend(_split_long(text, para, max_words))
    spans.extend(_pack(text, run, max_words))
    return _make(doc, spans, Granularity.PARAGRAPH)


def chunk_sentences(doc: EvidenceDocument) -> list[Passage]:
    text = doc.content
    spans = [s for para in paragraph_spans(text) for s in sentence_spans(text, *para)]
    return _make(doc, spans, Granularity.SENTENCE)


def chunk_document(doc: EvidenceDocument, granularity: Granularity | str = Granularity.PARAGRAPH,
                   max_words: int = DEFAULT_MAX_WORDS) -> list[Passage]:
    if Granularity(granularity) is Granularity.SENTENCE:
        return chunk_sentences(doc)
    return chunk_paragraphs(doc, max_words)
