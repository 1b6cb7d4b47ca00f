"""Model-based stance annotation of evidence documents and conflict detection."""

from __future__ import annotations

import logging
import re
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
from importlib import resources
from string import Template
from typing import Iterable, Sequence

from confact.corpus import ClaimRecord, EvidenceDocument, Stance
from confact.llm import Backend, ChatMessage, ChatRequest, LLMError, parallel_map

logger = logging.getLogger(__name__)


class Variant(str, Enum):
    URL_ONLY = "url"
    CONTENT = "content"
    CONTENT_JUSTIFIED = "justified"


class StanceParseError(ValueError):
    pass


def _load(name: str) -> Template:
    return Template((resources.files("confact.prompts") / name).read_text("utf-8").rstrip("\n"))


SYSTEM_PROMPT = (resources.files("confact.prompts") / "stance_system.txt").read_text("utf-8").strip()
_TEMPLATES = {
    Variant.URL_ONLY: _load("stance_url.txt"),
    Variant.CONTENT: _load("stance_content.txt"),
    Variant.CONTENT_JUSTIFIED: _load("stance_justified.txt"),
}

_LABELS = [
    (re.compile(r"not\s+enough\s+evidence", re.I), Stance.NOT_ENOUGH_EVIDENCE),
    (re.compile(r"\bsupport(?:s|ed|ing)?\b", re.I), Stance.SUPPORT),
    (re.compile(r"\breject(?:s|ed|ing)?\b", re.I), Stance.REJECT),
]
_FINAL = re.compile(r"final\s+answer\s*:", re.I)


@dataclass(frozen=True)
class StanceResult:
    label: Stance
    justification: str | None = None


@dataclass
class StanceAnnotation:
    doc_id: str
    labels: dict[Variant, Stance] = field(default_factory=dict)
    justification: str | None = None
    final: Stance | None = None
    failures: dict[Variant, str] = field(default_factory=dict)


def parse_stance(text: str) -> Stance:
    """Find the single stance label in ``text``; several distinct labels is an error."""
    found = set()
    rest = text
    for pattern, label in _LABELS:
        if pattern.search(rest):
            found.add(label)
            # "not enough evidence" must not also count as support/reject text
            rest = pattern.sub(" ", rest)
    if len(found) != 1:
        raise StanceParseError(f"cannot read a stance from {text[:80]!r}")
    return found.pop()


def parse_justified(text: str) -> StanceResult:
    markers = list(_FINAL.finditer(text))
    if not markers:
        raise StanceParseError("no 'Final answer:' marker")
    last = markers[-1]
    tail = text[last.end():].strip().splitlines()[0] if text[last.end():].strip() else ""
    return StanceResult(parse_stance(tail), text[:last.start()].strip() or None)


def render_stance_prompt(claim: ClaimRecord, doc: EvidenceDocument, variant: Variant) -> str:
    claim_date = claim.claim_date.isoformat() if claim.claim_date else "unknown"
    if variant is Variant.URL_ONLY:
        if not doc.url.strip():
            raise ValueError(f"document {doc.doc_id} has no url")
        return _TEMPLATES[variant].substitute(claim=claim.claim_text, claim_date=claim_date,
                                              evidence_url=doc.url)
    if not doc.content.strip():
        raise ValueError(f"document {doc.doc_id} has no content")
    return _TEMPLATES[variant].substitute(claim=claim.claim_text, claim_date=claim_date,
                                          evidence_content=doc.content)


def annotate_stance(claim: ClaimRecord, doc: EvidenceDocument, variant: Variant | str,
                    backend: Backend, max_output_tokens: int = 1024) -> StanceResult:
    variant = Variant(variant)
    user = render_stance_prompt(claim, doc, variant)
    request = ChatRequest(backend.model_name,
                          (ChatMessage("system", SYSTEM_PROMPT), ChatMessage("user", user)),
                          0.0, max_output_tokens if variant is Variant.CONTENT_JUSTIFIED else 16)
    reply = backend.complete(request).text
    if variant is Variant.CONTENT_JUSTIFIED:
        return parse_justified(reply)
    return StanceResult(parse_stance(reply))


def majority_stance(labels: Sequence[Stance]) -> Stance:
    """Strict majority label; anything else (including a three-way split) is NEI."""
    if not labels:
        raise ValueError("no stance labels to vote on")
    label, count = Counter(labels).most_common(1)[0]
    return label if count * 2 > len(labels) else Stance.NOT_ENOUGH_EVIDENCE


def annotate_document(claim: ClaimRecord, doc: EvidenceDocument, backend: Backend,
                      variants: Iterable[Variant] = tuple(Variant)) -> StanceAnnotation:
    """Run every variant; failed variants are recorded and left out of the vote."""
    ann = StanceAnnotation(doc.doc_id)
    for variant in variants:
        try:
            result = annotate_stance(claim, doc, variant, backend)
        except (ValueError, LLMError) as exc:
            ann.failures[variant] = str(exc)
            logger.warning("claim %s doc %s variant %s failed: %s",
                           claim.claim_id, doc.doc_id, variant.value, exc)
            continue
        ann.labels[variant] = result.label
        if result.justification:
            ann.justification = result.justification
    if ann.labels:
        ann.final = majority_stance(list(ann.labels.values()))
    return ann


def annotate_claim(claim: ClaimRecord, backend: Backend,
                   max_parallel: int = 1) -> tuple[ClaimRecord, list[StanceAnnotation]]:
    """Annotate all documents and return the claim with ``model_stance`` filled in."""
    anns = parallel_map(lambda d: annotate_document(claim, d, backend), claim.documents, max_parallel)
    docs = tuple(replace(d, model_stance=a.final) for d, a in zip(claim.documents, anns))
    return replace(claim, documents=docs), anns


def detect_conflicts(claim: ClaimRecord) -> bool:
    unlabeled = [d.doc_id for d in claim.documents if d.model_stance is None]
    if unlabeled:
        raise ValueError(f"claim {claim.claim_id}: documents without a stance: {unlabeled}")
    stances = {d.model_stance for d in claim.documents}
    return Stance.SUPPORT in stances and Stance.REJECT in stances


def conflicting_claims(records: Iterable[ClaimRecord]) -> list[str]:
    return [r.claim_id for r in records if detect_conflicts(r)]
