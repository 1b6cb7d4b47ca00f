"""BM25 relevance, source filtering and credibility-weighted ranking."""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

from confact.chunking import Granularity, Passage
from confact.credibility import Level, SourceBackground

K1 = 1.2
B = 0.75

_TOKEN = re.compile(r"[^\W_]+")


class NoAdmissibleEvidence(ValueError):
    """No passage survived filtering, so there is nothing to answer from."""


class RankingMode(str, Enum):
    RELEVANCE = "rel"
    SF = "sf"
    CW_SOFT = "cw-soft"
    CW_HARD = "cw-hard"


class MissingBackgroundPolicy(str, Enum):
    KEEP = "keep"
    DROP = "drop"


@dataclass(frozen=True)
class RankingConfig:
    top_k: int = 5
    beta: float = 0.8
    gamma: float = 0.3
    mode: RankingMode = RankingMode.RELEVANCE
    granularity: Granularity = Granularity.PARAGRAPH
    missing_background_policy: MissingBackgroundPolicy = MissingBackgroundPolicy.KEEP

    def __post_init__(self):
        object.__setattr__(self, "mode", RankingMode(self.mode))
        object.__setattr__(self, "granularity", Granularity(self.granularity))
        object.__setattr__(self, "missing_background_policy",
                           MissingBackgroundPolicy(self.missing_background_policy))
        if self.top_k < 1:
            raise ValueError("top_k must be at least 1")
        if self.beta < 0:
            raise ValueError("beta must be non-negative")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")


@dataclass(frozen=True)
class RankedPassage:
    passage: Passage
    s_rel: float
    s_rel_norm: float
    s_cred: float | None
    s_fused: float
    rank: int

    def to_dict(self) -> dict:
        p = self.passage
        return {
            "passage_id": p.passage_id,
            "parent_doc_id": p.parent_doc_id,
            "source_domain": p.source_domain,
            "text": p.text,
            "rank": self.rank,
            "s_rel": self.s_rel,
            "s_rel_norm": self.s_rel_norm,
            "s_cred": self.s_cred,
            "s_fused": self.s_fused,
        }


def tokenize(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


@dataclass
class CorpusStats:
    n_docs: int
    avgdl: float
    doc_freq: dict[str, int] = field(default_factory=dict)

    @classmethod
    def build(cls, texts: Sequence[str]) -> "CorpusStats":
        df: Counter[str] = Counter()
        total = 0
        for text in texts:
            tokens = tokenize(text)
            total += len(tokens)
            df.update(set(tokens))
        n = len(texts)
        return cls(n_docs=n, avgdl=total / n if n else 0.0, doc_freq=dict(df))

    def idf(self, term: str) -> float:
        n = self.doc_freq.get(term, 0)
        return math.log((self.n_docs - n + 0.5) / (n + 0.5) + 1.0)


def bm25_score(query: str, passage: Passage | str, stats: CorpusStats,
               k1: float = K1, b: float = B) -> float:
    """Okapi BM25 of ``passage`` for ``query``; repeated query terms count repeatedly."""
    text = passage.text if isinstance(passage, Passage) else passage
    tf = Counter(tokenize(text))
    if not tf:
        return 0.0
    dl = sum(tf.values())
    norm = 1.0 - b + b * dl / stats.avgdl if stats.avgdl > 0 else 1.0
    terms = []
    for term in tokenize(query):
        f = tf.get(term, 0)
        if f:
            terms.append(stats.idf(term) * f * (k1 + 1.0) / (f + k1 * norm))
    return math.fsum(terms)


def _has_background(bg: SourceBackground | None) -> bool:
    return bg is not None and not bg.is_missing


def filter_sources(passages: Sequence[Passage], backgrounds: Mapping[str, SourceBackground],
                   policy: MissingBackgroundPolicy | str = MissingBackgroundPolicy.KEEP) -> list[Passage]:
    """Drop passages from low-credibility sources, keeping order.

    Sources without a background (or without a level) are kept or dropped
    according to ``policy``.
    """
    policy = MissingBackgroundPolicy(policy)
    kept = []
    for p in passages:
        bg = backgrounds.get(p.source_domain)
        if not _has_background(bg) or bg.level is None:
            if policy is MissingBackgroundPolicy.KEEP:
                kept.append(p)
        elif bg.level is not Level.LOW:
            kept.append(p)
    return kept


def min_max(values: Sequence[float]) -> list[float]:
    if not values:
        return []
    lo, hi = min(values), max(values)
    if hi == lo:
        return [1.0] * len(values)
    return [(v - lo) / (hi - lo) for v in values]


def credibility_bonus(s_cred: float | None, mode: RankingMode, beta: float, gamma: float) -> float:
    if s_cred is None:
        return 0.0
    if mode is RankingMode.CW_SOFT:
        return beta * s_cred
    if mode is RankingMode.CW_HARD:
        return beta * (1.0 if s_cred >= gamma else 0.0)
    return 0.0


def fuse_and_rank(query: str, passages: Sequence[Passage],
                  backgrounds: Mapping[str, SourceBackground] | None,
                  config: RankingConfig) -> list[RankedPassage]:
    """Score, fuse and return the top-k passages.

    In SF mode the passages are filtered before any statistics are computed.
    Relevance is min-max normalised over the claim's passage set before the
    credibility term is added. Ties keep the input order.
    """
    backgrounds = backgrounds or {}
    if config.mode is RankingMode.SF:
        passages = filter_sources(passages, backgrounds, config.missing_background_policy)
    if not passages:
        return []
    stats = CorpusStats.build([p.text for p in passages])
    raw = [bm25_score(query, p, stats) for p in passages]
    norm = min_max(raw)
    scored = []
    for i, p in enumerate(passages):
        bg = backgrounds.get(p.source_domain)
        s_cred = bg.score if _has_background(bg) else None
        fused = norm[i] + credibility_bonus(s_cred, config.mode, config.beta, config.gamma)
        scored.append((fused, i, p, raw[i], norm[i], s_cred))
    scored.sort(key=lambda t: (-t[0], t[1]))
    return [
        RankedPassage(p, s_rel, s_norm, s_cred, fused, rank)
        for rank, (fused, _, p, s_rel, s_norm, s_cred) in enumerate(scored[:config.top_k], 1)
    ]
