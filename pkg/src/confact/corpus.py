"""Claim/evidence data model, JSONL dataset I/O and claim-to-question conversion."""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, replace
from datetime import date
from enum import Enum
from pathlib import Path
from typing import Any, Iterable
from urllib.parse import urlsplit

import tldextract

from confact.llm import Backend, ChatMessage, ChatRequest, LLMError

logger = logging.getLogger(__name__)


class Answer(str, Enum):
    YES = "yes"
    NO = "no"
    UNPARSEABLE = "unparseable"


class Origin(str, Enum):
    AVERITEC = "averitec"
    FACTCHECKQA = "factcheckqa"
    OTHER = "other"


class Split(str, Enum):
    MODC = "modc"
    HUMC = "humc"
    UNASSIGNED = "unassigned"


class Stance(str, Enum):
    SUPPORT = "support"
    REJECT = "reject"
    NOT_ENOUGH_EVIDENCE = "not_enough_evidence"


class SourceType(str, Enum):
    MAINSTREAM_NEWS = "mainstream_news"
    GOVERNMENT = "government"
    NON_PROFIT = "non_profit"
    ACADEMIC = "academic"
    SOCIAL_MEDIA = "social_media"
    OTHER = "other"


class DatasetError(ValueError):
    """Raised when a dataset file cannot be turned into valid records."""

    def __init__(self, message: str, index: int | None = None, field_name: str | None = None):
        self.index = index
        self.field_name = field_name
        where = []
        if index is not None:
            where.append(f"record {index}")
        if field_name is not None:
            where.append(f"field '{field_name}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


class QuestionParseError(ValueError):
    pass


# Bundled snapshot only; never fetch the suffix list over the network.
_extractor = tldextract.TLDExtract(suffix_list_urls=(), cache_dir=None)


def extract_domain(url: str) -> str:
    """Return the lowercase registrable domain of ``url``.

    Accepts full URLs or bare host names. Hosts without a public suffix
    (``localhost``, IP literals) fall back to the lowercased host itself.
    """
    text = url.strip()
    if not text:
        return ""
    if "://" not in text:
        text = "//" + text
    host = (urlsplit(text).hostname or "").lower().rstrip(".")
    if not host:
        return ""
    parts = _extractor(host)
    if parts.domain and parts.suffix:
        return f"{parts.domain}.{parts.suffix}"
    return host


@dataclass(frozen=True)
class EvidenceDocument:
    doc_id: str
    url: str
    content: str = ""
    archived_url: str | None = None
    source_domain: str = ""
    model_stance: Stance | None = None
    human_stance: Stance | None = None
    human_credibility: int | None = None
    source_type: SourceType | None = None

    def __post_init__(self):
        if not self.source_domain and self.url:
            object.__setattr__(self, "source_domain", extract_domain(self.url))


@dataclass(frozen=True)
class ClaimRecord:
    claim_id: str
    claim_text: str
    gold_answer: Answer
    question_text: str = ""
    claim_date: date | None = None
    origin: Origin = Origin.OTHER
    split: Split = Split.UNASSIGNED
    documents: tuple[EvidenceDocument, ...] = ()


@dataclass(frozen=True)
class DatasetStats:
    n_claims: int
    n_yes: int
    n_no: int
    n_sources: int


@dataclass(frozen=True)
class Violation:
    record_index: int
    claim_id: str
    field: str
    message: str

    def __str__(self):
        return f"record {self.record_index} ({self.claim_id}): {self.field}: {self.message}"


# -- serialization -----------------------------------------------------------

def _enum_or_none(enum_cls, value, index, name):
    if value is None or value == "":
        return None
    try:
        return enum_cls(str(value).strip().lower().replace(" ", "_"))
    except ValueError:
        choices = ", ".join(m.value for m in enum_cls)
        raise DatasetError(f"{value!r} is not one of {choices}", index, name) from None


def _require(obj: dict, key: str, index: int, prefix: str = "") -> Any:
    if key not in obj or obj[key] is None:
        raise DatasetError("missing required value", index, prefix + key)
    return obj[key]


def document_from_dict(obj: dict, index: int = 0, position: int = 0) -> EvidenceDocument:
    prefix = f"documents[{position}]."
    if not isinstance(obj, dict):
        raise DatasetError("document must be an object", index, prefix.rstrip("."))
    cred = obj.get("human_credibility")
    if cred is not None:
        if isinstance(cred, bool) or not isinstance(cred, int):
            raise DatasetError(f"{cred!r} is not an integer", index, prefix + "human_credibility")
    url = obj.get("url") or ""
    domain = obj.get("source_domain") or ""
    return EvidenceDocument(
        doc_id=str(_require(obj, "doc_id", index, prefix)),
        url=url,
        content=obj.get("content") or "",
        archived_url=obj.get("archived_url"),
        source_domain=extract_domain(domain) if domain else "",
        model_stance=_enum_or_none(Stance, obj.get("model_stance"), index, prefix + "model_stance"),
        human_stance=_enum_or_none(Stance, obj.get("human_stance"), index, prefix + "human_stance"),
        human_credibility=cred,
        source_type=_enum_or_none(SourceType, obj.get("source_type"), index, prefix + "source_type"),
    )


def record_from_dict(obj: dict, index: int = 0) -> ClaimRecord:
    if not isinstance(obj, dict):
        raise DatasetError("record must be an object", index)
    raw_date = obj.get("claim_date")
    claim_date = None
    if raw_date:
        try:
            claim_date = date.fromisoformat(str(raw_date)[:10])
        except ValueError:
            raise DatasetError(f"{raw_date!r} is not an ISO-8601 date", index, "claim_date") from None
    gold = _enum_or_none(Answer, _require(obj, "gold_answer", index), index, "gold_answer")
    if gold is Answer.UNPARSEABLE:
        raise DatasetError("gold answer must be yes or no", index, "gold_answer")
    docs = obj.get("documents") or []
    if not isinstance(docs, list):
        raise DatasetError("must be a list", index, "documents")
    claim_text = _require(obj, "claim", index)
    if not str(claim_text).strip():
        raise DatasetError("empty claim text", index, "claim")
    return ClaimRecord(
        claim_id=str(_require(obj, "claim_id", index)),
        claim_text=str(claim_text),
        question_text=obj.get("question") or "",
        claim_date=claim_date,
        gold_answer=gold,
        origin=_enum_or_none(Origin, obj.get("origin"), index, "origin") or Origin.OTHER,
        split=_enum_or_none(Split, obj.get("split"), index, "split") or Split.UNASSIGNED,
        documents=tuple(document_from_dict(d, index, i) for i, d in enumerate(docs)),
    )


def document_to_dict(doc: EvidenceDocument) -> dict:
    return {
        "doc_id": doc.doc_id,
        "url": doc.url,
        "archived_url": doc.archived_url,
        "source_domain": doc.source_domain,
        "content": doc.content,
        "model_stance": doc.model_stance.value if doc.model_stance else None,
        "human_stance": doc.human_stance.value if doc.human_stance else None,
        "human_credibility": doc.human_credibility,
        "source_type": doc.source_type.value if doc.source_type else None,
    }


def record_to_dict(record: ClaimRecord) -> dict:
    return {
        "claim_id": record.claim_id,
        "claim": record.claim_text,
        "question": record.question_text,
        "claim_date": record.claim_date.isoformat() if record.claim_date else None,
        "gold_answer": record.gold_answer.value,
        "origin": record.origin.value,
        "split": record.split.value,
        "documents": [document_to_dict(d) for d in record.documents],
    }


def load_dataset(path: str | Path) -> list[ClaimRecord]:
    """Read a line-delimited JSON dataset file.

    Blank lines are skipped. Raises :class:`DatasetError` naming the record
    index (0-based, counting non-blank lines) and the offending field.
    """
    records: list[ClaimRecord] = []
    seen: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        lines = [line for line in fh if line.strip()]
    if not lines:
        raise DatasetError(f"no records in {path}")
    for index, line in enumerate(lines):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DatasetError(f"invalid JSON ({exc.msg})", index) from None
        record = record_from_dict(obj, index)
        for position, doc in enumerate(record.documents):
            if doc.human_credibility is not None and not 1 <= doc.human_credibility <= 5:
                raise DatasetError(
                    f"credibility {doc.human_credibility} outside 1..5",
                    index,
                    f"documents[{position}].human_credibility",
                )
        if record.claim_id in seen:
            raise DatasetError(
                f"duplicate claim_id {record.claim_id!r} (first seen at record {seen[record.claim_id]})",
                index,
                "claim_id",
            )
        seen[record.claim_id] = index
        records.append(record)
    return records


def dump_dataset(records: Iterable[ClaimRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record_to_dict(record), ensure_ascii=False) + "\n")


# -- statistics and validation -----------------------------------------------

def split_stats(records: Iterable[ClaimRecord], split: Split | str) -> DatasetStats:
    split = Split(split)
    selected = [r for r in records if r.split is split]
    n_yes = sum(r.gold_answer is Answer.YES for r in selected)
    domains = {d.source_domain for r in selected for d in r.documents if d.source_domain}
    return DatasetStats(
        n_claims=len(selected),
        n_yes=n_yes,
        n_no=len(selected) - n_yes,
        n_sources=len(domains),
    )


def validate_dataset(records: list[ClaimRecord], require_questions: bool = False) -> list[Violation]:
    """Check record invariants and return one entry per violation found.

    An empty list means the dataset is valid.
    """
    report: list[Violation] = []
    seen: set[str] = set()
    for i, rec in enumerate(records):
        if rec.claim_id in seen:
            report.append(Violation(i, rec.claim_id, "claim_id", "duplicate claim_id"))
        seen.add(rec.claim_id)
        if not rec.claim_text.strip():
            report.append(Violation(i, rec.claim_id, "claim", "empty claim text"))
        if require_questions and not rec.question_text.strip():
            report.append(Violation(i, rec.claim_id, "question", "empty question"))
        if rec.gold_answer not in (Answer.YES, Answer.NO):
            report.append(Violation(i, rec.claim_id, "gold_answer", "must be yes or no"))
        for j, doc in enumerate(rec.documents):
            name = f"documents[{j}]"
            if doc.human_credibility is not None and not 1 <= doc.human_credibility <= 5:
                report.append(Violation(i, rec.claim_id, f"{name}.human_credibility",
                                        f"{doc.human_credibility} outside 1..5"))
            if doc.url and doc.source_domain != extract_domain(doc.url):
                report.append(Violation(i, rec.claim_id, f"{name}.source_domain",
                                        f"{doc.source_domain!r} does not match url domain "
                                        f"{extract_domain(doc.url)!r}"))
            elif doc.source_domain and doc.source_domain != doc.source_domain.lower():
                report.append(Violation(i, rec.claim_id, f"{name}.source_domain", "not lowercase"))
    return report


# -- claim -> binary question -------------------------------------------------

QUESTION_SYSTEM_PROMPT = (
    "You rewrite fact-checking claims as binary questions about their veracity."
)
QUESTION_USER_TEMPLATE = (
    "Rewrite the following claim as a single yes/no question whose answer is 'yes' "
    "exactly when the claim is true. Keep the wording as close to the claim as possible. "
    "Respond with the question only.\n\nClaim: {claim}"
)


def parse_question(text: str) -> str:
    """Normalize a model reply into one interrogative sentence."""
    cleaned = " ".join(text.split())
    cleaned = re.sub(r"^(question|q)\s*:\s*", "", cleaned, flags=re.I).strip().strip('"').strip()
    if not cleaned:
        raise QuestionParseError("empty response")
    if cleaned.count("?") != 1 or not cleaned.endswith("?"):
        raise QuestionParseError(f"expected exactly one question, got {cleaned!r}")
    return cleaned


def convert_claim_to_question(
    claim: ClaimRecord, backend: Backend, max_output_tokens: int = 128
) -> str:
    if not claim.claim_text.strip():
        raise ValueError(f"claim {claim.claim_id} has empty text")
    request = ChatRequest(
        model_name=backend.model_name,
        messages=(
            ChatMessage("system", QUESTION_SYSTEM_PROMPT),
            ChatMessage("user", QUESTION_USER_TEMPLATE.format(claim=claim.claim_text.strip())),
        ),
        temperature=0.0,
        max_output_tokens=max_output_tokens,
    )
    try:
        response = backend.complete(request)
    except LLMError as exc:
        raise LLMError(f"claim {claim.claim_id}: {exc}") from exc
    return parse_question(response.text)


def with_question(claim: ClaimRecord, backend: Backend) -> ClaimRecord:
    """Return a copy of ``claim`` with ``question_text`` filled in by the backend."""
    return replace(claim, question_text=convert_claim_to_question(claim, backend))
