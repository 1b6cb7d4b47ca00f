"""Prompt construction, answer parsing and strategy execution.

Baseline strategies (DirA, MajV, DisA, CoT) see bare passages. The
source-aware variants (SBA_*) see every passage followed by the description
of its source. SBA_ens runs one call per passage and a final aggregation call
over the per-passage answers and rationales.
"""

from __future__ import annotations

import json
import logging
import re
import time
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from string import Template
from typing import Mapping, Sequence

from confact.corpus import Answer, ClaimRecord
from confact.credibility import SourceBackground
from confact.llm import (Backend, ChatMessage, ChatRequest, ChatResponse, FinishReason,
                         LLMError, canonical_digest, parallel_map)
from confact.ranking import NoAdmissibleEvidence, RankedPassage

logger = logging.getLogger(__name__)
call_log = logging.getLogger("confact.calls")

NO_BACKGROUND = "No background information is available for this source."


class Strategy(str, Enum):
    DIRA = "dira"
    MAJV = "majv"
    DISA = "disa"
    COT = "cot"
    SBA_DIR = "sba-dir"
    SBA_COT = "sba-cot"
    SBA_EXP = "sba-exp"
    SBA_ENS = "sba-ens"

    @property
    def source_aware(self) -> bool:
        return self.value.startswith("sba-")


class TiePolicy(str, Enum):
    YES = "yes"
    NO = "no"
    ERROR = "error"


class NoVotesError(ValueError):
    pass


class TieError(ValueError):
    pass


TEMPLATE_FILES = (
    "system_baseline.txt", "system_source_aware.txt", "evidence_item.txt",
    "evidence_item_sourced.txt", "direct.txt", "cot.txt", "discern.txt",
    "ensemble_candidate.txt", "ensemble_item.txt", "ensemble_final.txt",
)


def load_template(name: str) -> Template:
    text = (resources.files("confact.prompts") / name).read_text("utf-8")
    return Template(text.rstrip("\n"))


_T = {name.removesuffix(".txt"): load_template(name) for name in TEMPLATE_FILES}

_BODY = {
    Strategy.DIRA: "direct", Strategy.MAJV: "direct", Strategy.SBA_DIR: "direct",
    Strategy.COT: "cot", Strategy.SBA_COT: "cot",
    Strategy.DISA: "discern", Strategy.SBA_EXP: "discern",
}


@dataclass(frozen=True)
class Prompt:
    system: str
    user: str

    def messages(self) -> tuple[ChatMessage, ...]:
        return (ChatMessage("system", self.system), ChatMessage("user", self.user))


@dataclass(frozen=True)
class CandidateAnswer:
    answer: Answer
    rationale: str | None = None
    passage_ref: str | None = None

    def to_dict(self) -> dict:
        return {"answer": self.answer.value, "rationale": self.rationale, "passage_ref": self.passage_ref}


@dataclass
class Verdict:
    claim_id: str
    answer: Answer
    strategy: Strategy
    candidates: list[CandidateAnswer] = field(default_factory=list)
    raw_responses: list[str] = field(default_factory=list)
    token_usage: dict | None = None
    error: str | None = None

    def to_dict(self) -> dict:
        out = {
            "claim_id": self.claim_id,
            "strategy": self.strategy.value,
            "answer": self.answer.value,
            "candidates": [c.to_dict() for c in self.candidates],
            "raw_responses": list(self.raw_responses),
        }
        if self.token_usage:
            out["token_usage"] = self.token_usage
        if self.error:
            out["error"] = self.error
        return out

    @classmethod
    def from_dict(cls, obj: dict) -> "Verdict":
        return cls(
            claim_id=obj["claim_id"],
            answer=Answer(obj["answer"]),
            strategy=Strategy(obj["strategy"]),
            candidates=[CandidateAnswer(Answer(c["answer"]), c.get("rationale"), c.get("passage_ref"))
                        for c in obj.get("candidates", [])],
            raw_responses=list(obj.get("raw_responses", [])),
            token_usage=obj.get("token_usage"),
            error=obj.get("error"),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False)


# -- prompts -------------------------------------------------------------------

def describe(background: SourceBackground | None) -> str:
    """Text shown for a source in source-aware prompts."""
    if background is None or background.is_missing:
        return NO_BACKGROUND
    if background.description.strip():
        return background.description.strip()
    if background.level is not None:
        return f"Credibility rating: {background.level.value}."
    return NO_BACKGROUND


def _evidence_block(passages: Sequence[RankedPassage], backgrounds: Mapping[str, SourceBackground],
                    sourced: bool) -> str:
    item = _T["evidence_item_sourced" if sourced else "evidence_item"]
    return "\n".join(
        item.substitute(index=i, text=rp.passage.text.strip(),
                        description=describe(backgrounds.get(rp.passage.source_domain)))
        for i, rp in enumerate(passages, 1)
    )


def _system(strategy: Strategy) -> str:
    return _T["system_source_aware" if strategy.source_aware else "system_baseline"].template


def build_prompt(strategy: Strategy | str, question: str, passages: Sequence[RankedPassage],
                 backgrounds: Mapping[str, SourceBackground] | None = None) -> Prompt | list[Prompt]:
    """Render the prompt(s) for one claim.

    MajV and SBA_ens return one prompt per passage (for SBA_ens these are the
    first-stage prompts; see :func:`build_ensemble_final`). All others return
    a single prompt over every passage.
    """
    strategy = Strategy(strategy)
    backgrounds = backgrounds or {}
    if not passages:
        raise NoAdmissibleEvidence("no admissible evidence")
    if strategy is Strategy.MAJV:
        return [build_prompt(Strategy.DIRA, question, [rp]) for rp in passages]
    if strategy is Strategy.SBA_ENS:
        return [
            Prompt(_system(strategy), _T["ensemble_candidate"].substitute(
                question=question.strip(), text=rp.passage.text.strip(),
                description=describe(backgrounds.get(rp.passage.source_domain))))
            for rp in passages
        ]
    evidence = _evidence_block(passages, backgrounds, strategy.source_aware)
    user = _T[_BODY[strategy]].substitute(question=question.strip(), evidence=evidence)
    return Prompt(_system(strategy), user)


def build_ensemble_final(question: str, passages: Sequence[RankedPassage],
                         candidates: Sequence[CandidateAnswer]) -> Prompt:
    """Second-stage prompt: passages grouped by their first-stage answer,
    each followed by its first-stage rationale."""
    groups: dict[Answer, list[str]] = {Answer.YES: [], Answer.NO: []}
    for rp, cand in zip(passages, candidates):
        if cand.answer in groups:
            groups[cand.answer].append(_T["ensemble_item"].substitute(
                text=rp.passage.text.strip(), analysis=(cand.rationale or "").strip()))
    user = _T["ensemble_final"].substitute(
        question=question.strip(),
        supporting="\n".join(groups[Answer.YES]) or "- None",
        refuting="\n".join(groups[Answer.NO]) or "- None",
    )
    return Prompt(_system(Strategy.SBA_ENS), user)


# -- parsing -------------------------------------------------------------------

_MARKER = re.compile(r"final\s+answer", re.I)
# apostrophes block a match only inside a word (n'yes, no's), not as quotes
_YES_NO = re.compile(r"(?<![\w-])(?<!\w['’])(yes|no)(?![\w-])(?!['’]\w)", re.I)


def parse_final_answer(text: str) -> Answer:
    """Read yes/no from a model reply.

    The last "final answer" marker wins and the first yes/no word after it is
    taken. Without a marker, the reply must mention exactly one of yes/no.
    """
    markers = list(_MARKER.finditer(text))
    if markers:
        m = _YES_NO.search(text, markers[-1].end())
        return Answer(m.group(1).lower()) if m else Answer.UNPARSEABLE
    found = {m.group(1).lower() for m in _YES_NO.finditer(text)}
    if len(found) == 1:
        return Answer(found.pop())
    return Answer.UNPARSEABLE


def split_rationale(text: str) -> str:
    """Everything before the last "final answer" marker, with format noise removed."""
    markers = list(_MARKER.finditer(text))
    head = text[:markers[-1].start()] if markers else text
    head = re.sub(r"[#*\s]+$", "", head)
    return re.sub(r"^\s*(analysis|justification)\s*:\s*", "", head.strip(), flags=re.I)


def majority_vote(candidates: Sequence[CandidateAnswer | Answer],
                  tie: TiePolicy | str = TiePolicy.NO) -> Answer:
    answers = [c.answer if isinstance(c, CandidateAnswer) else Answer(c) for c in candidates]
    yes = answers.count(Answer.YES)
    no = answers.count(Answer.NO)
    if yes + no == 0:
        raise NoVotesError("no admissible votes")
    if yes != no:
        return Answer.YES if yes > no else Answer.NO
    tie = TiePolicy(tie)
    if tie is TiePolicy.ERROR:
        raise TieError(f"tied vote {yes}:{no}")
    return Answer(tie.value)


# -- execution -----------------------------------------------------------------

@dataclass
class GenerationSettings:
    max_output_tokens: int = 1024
    tie: TiePolicy = TiePolicy.NO
    max_parallel: int = 1
    chars_per_token: float = 4.0


def _estimate_tokens(prompt: Prompt, settings: GenerationSettings) -> int:
    return int((len(prompt.system) + len(prompt.user)) / settings.chars_per_token) + 1


def _fit_context(strategy, question, passages, backgrounds, backend, settings):
    """Drop passages from the tail until the joint prompt fits the backend's window."""
    window = backend.context_window
    if not window:
        return list(passages)
    kept = list(passages)
    while len(kept) > 1:
        prompt = build_prompt(strategy, question, kept, backgrounds)
        if _estimate_tokens(prompt, settings) + settings.max_output_tokens <= window:
            break
        logger.warning("prompt exceeds context window %d; dropping passage %s",
                       window, kept[-1].passage.passage_id)
        kept.pop()
    return kept


def _call(backend: Backend, prompt: Prompt, settings: GenerationSettings, claim_id: str,
          strategy: Strategy) -> ChatResponse:
    request = ChatRequest(backend.model_name, prompt.messages(), 0.0, settings.max_output_tokens)
    digest = canonical_digest(request)
    start = time.perf_counter()
    try:
        response = backend.complete(request)
    except LLMError as exc:
        raise LLMError(f"claim {claim_id}: {exc}") from exc
    call_log.info(json.dumps({"digest": digest, "claim_id": claim_id, "strategy": strategy.value,
                              "latency_s": round(time.perf_counter() - start, 4)}))
    return response


def _answer_of(response: ChatResponse, claim_id: str) -> Answer:
    answer = parse_final_answer(response.text)
    if answer is Answer.UNPARSEABLE and response.finish_reason is FinishReason.LENGTH:
        logger.warning("claim %s: unparseable answer from a length-truncated response", claim_id)
    return answer


def _sum_usage(responses: Sequence[ChatResponse]) -> dict | None:
    totals: dict[str, int] = {}
    for r in responses:
        for k, v in (r.usage or {}).items():
            if isinstance(v, int):
                totals[k] = totals.get(k, 0) + v
    return totals or None


def run_strategy(claim: ClaimRecord, strategy: Strategy | str, ranked: Sequence[RankedPassage],
                 backgrounds: Mapping[str, SourceBackground] | None, backend: Backend,
                 settings: GenerationSettings | None = None) -> Verdict:
    strategy = Strategy(strategy)
    settings = settings or GenerationSettings()
    backgrounds = backgrounds or {}
    question = claim.question_text or claim.claim_text
    if not ranked:
        raise NoAdmissibleEvidence(f"claim {claim.claim_id}: no admissible evidence")

    def call(prompt: Prompt) -> ChatResponse:
        return _call(backend, prompt, settings, claim.claim_id, strategy)

    if strategy in (Strategy.MAJV, Strategy.SBA_ENS):
        prompts = build_prompt(strategy, question, ranked, backgrounds)
        responses = parallel_map(call, prompts, settings.max_parallel)
        candidates = [
            CandidateAnswer(_answer_of(r, claim.claim_id),
                            split_rationale(r.text) if strategy is Strategy.SBA_ENS else None,
                            rp.passage.passage_id)
            for r, rp in zip(responses, ranked)
        ]
        if strategy is Strategy.MAJV:
            try:
                answer = majority_vote(candidates, settings.tie)
            except NoVotesError:
                answer = Answer.UNPARSEABLE
        else:
            final = call(build_ensemble_final(question, ranked, candidates))
            responses.append(final)
            answer = _answer_of(final, claim.claim_id)
        return Verdict(claim.claim_id, answer, strategy, candidates,
                       [r.text for r in responses], _sum_usage(responses))

    passages = _fit_context(strategy, question, ranked, backgrounds, backend, settings)
    response = call(build_prompt(strategy, question, passages, backgrounds))
    answer = _answer_of(response, claim.claim_id)
    candidates = []
    if strategy in (Strategy.COT, Strategy.SBA_COT, Strategy.DISA, Strategy.SBA_EXP):
        candidates = [CandidateAnswer(answer, split_rationale(response.text))]
    return Verdict(claim.claim_id, answer, strategy, candidates, [response.text],
                   _sum_usage([response]))
