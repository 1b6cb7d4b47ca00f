"""Credibility-aware retrieval-augmented fact-checking over conflicting evidence."""

from confact.annotation import annotate_stance, detect_conflicts, majority_stance
from confact.chunking import Granularity, Passage, chunk_paragraphs, chunk_sentences
from confact.corpus import (Answer, ClaimRecord, DatasetStats, EvidenceDocument, Split, Stance,
                            convert_claim_to_question, load_dataset, split_stats, validate_dataset)
from confact.credibility import (CredibilityTable, GTProvider, HybridProvider, Level,
                                 SourceBackground, classify_level, generate_background,
                                 level_to_score, lookup_curated)
from confact.evaluation import ScoreCard, render_report, score
from confact.generation import (CandidateAnswer, Strategy, Verdict, build_prompt, majority_vote,
                                parse_final_answer, run_strategy)
from confact.llm import ChatRequest, ChatResponse, ReplayBackend, canonical_digest
from confact.ranking import (RankedPassage, RankingConfig, RankingMode, bm25_score, filter_sources,
                             fuse_and_rank)

__version__ = "0.1.0"

__all__ = [
    "annotate_stance",
    "detect_conflicts",
    "majority_stance",
    "Granularity",
    "Passage",
    "chunk_paragraphs",
    "chunk_sentences",
    "Answer",
    "ClaimRecord",
    "DatasetStats",
    "EvidenceDocument",
    "Split",
    "Stance",
    "convert_claim_to_question",
    "load_dataset",
    "split_stats",
    "validate_dataset",
    "CredibilityTable",
    "GTProvider",
    "HybridProvider",
    "Level",
    "SourceBackground",
    "classify_level",
    "generate_background",
    "level_to_score",
    "lookup_curated",
    "ScoreCard",
    "render_report",
    "score",
    "CandidateAnswer",
    "Strategy",
    "Verdict",
    "build_prompt",
    "majority_vote",
    "parse_final_answer",
    "run_strategy",
    "ChatRequest",
    "ChatResponse",
    "ReplayBackend",
    "canonical_digest",
    "RankedPassage",
    "RankingConfig",
    "RankingMode",
    "bm25_score",
    "filter_sources",
    "fuse_and_rank",
]
