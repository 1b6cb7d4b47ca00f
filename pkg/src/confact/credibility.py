"""Source backgrounds and credibility scores.

Two providers are available:

* ``GTProvider`` looks a domain up in a curated table and reports it as
  missing otherwise.
* ``HybridProvider`` falls back to generating a background with the LLM
  (seeded by search results), classifies it as low/medium/high and maps the
  level to a fixed score.
"""

from __future__ import annotations

import json
import logging
import re
import threading
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Protocol, Sequence

from confact.corpus import extract_domain
from confact.llm import Backend, ChatMessage, ChatRequest, LLMError

logger = logging.getLogger(__name__)


class Level(str, Enum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"


class Provenance(str, Enum):
    CURATED = "curated"
    GENERATED = "generated"
    MISSING = "missing"


LEVEL_SCORES = {Level.LOW: 0.1, Level.MEDIUM: 0.5, Level.HIGH: 0.9}

BACKGROUND_SECTIONS = ("History", "Funded by/Ownership", "Analysis/Bias", "Failed Fact Checks")


class BackgroundFormatError(ValueError):
    pass


class LevelParseError(ValueError):
    pass


def as_level(value: Level | str) -> Level:
    return value if isinstance(value, Level) else Level(str(value).strip().lower())


def level_to_score(level: Level | str) -> float:
    return LEVEL_SCORES[as_level(level)]


@dataclass(frozen=True)
class SourceBackground:
    source_domain: str
    description: str = ""
    level: Level | None = None
    score: float | None = None
    provenance: Provenance = Provenance.MISSING

    def __post_init__(self):
        if self.provenance is Provenance.MISSING:
            if self.description or self.level is not None or self.score is not None:
                raise ValueError("a missing background carries no description, level or score")
        if self.score is not None and not 0.0 < self.score < 1.0:
            raise ValueError(f"credibility score {self.score} outside (0, 1)")

    @property
    def is_missing(self) -> bool:
        return self.provenance is Provenance.MISSING

    def to_dict(self) -> dict:
        return {
            "domain": self.source_domain,
            "description": self.description,
            "level": self.level.value if self.level else None,
            "score": self.score,
            "provenance": self.provenance.value,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "SourceBackground":
        return cls(
            source_domain=obj["domain"],
            description=obj.get("description") or "",
            level=Level(obj["level"]) if obj.get("level") else None,
            score=obj.get("score"),
            provenance=Provenance(obj.get("provenance", "curated")),
        )


def missing(domain: str) -> SourceBackground:
    return SourceBackground(source_domain=domain)


# -- curated table -------------------------------------------------------------

_FACTUAL_TO_LEVEL = {
    "very high": Level.HIGH,
    "high": Level.HIGH,
    "mostly factual": Level.MEDIUM,
    "mixed": Level.LOW,
    "low": Level.LOW,
    "very low": Level.LOW,
}


def collapse_rating(credibility: str | None = None, factual_reporting: str | None = None) -> Level:
    """Collapse a media-rating site's labels into low/medium/high.

    An explicit credibility rating (high/medium/low) wins. Otherwise the
    factual-reporting grade is used: very high/high -> high, mostly factual ->
    medium, mixed/low/very low -> low.
    """
    if credibility:
        key = credibility.strip().lower().removesuffix(" credibility")
        if key in ("high", "medium", "low"):
            return Level(key)
    if factual_reporting:
        key = factual_reporting.strip().lower().replace("-", " ")
        if key in _FACTUAL_TO_LEVEL:
            return _FACTUAL_TO_LEVEL[key]
    raise ValueError(f"cannot collapse rating credibility={credibility!r} factual={factual_reporting!r}")


@dataclass
class CredibilityTable:
    entries: dict[str, SourceBackground] = field(default_factory=dict)

    def __contains__(self, domain: str) -> bool:
        return extract_domain(domain) in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, domain: str) -> SourceBackground | None:
        return self.entries.get(extract_domain(domain))

    def add(self, domain: str, level: Level | str, score: float | None = None,
            description: str = "") -> None:
        key = extract_domain(domain)
        if key in self.entries:
            raise ValueError(f"duplicate table entry for {key}")
        level = as_level(level)
        self.entries[key] = SourceBackground(
            source_domain=key,
            description=description,
            level=level,
            score=level_to_score(level) if score is None else float(score),
            provenance=Provenance.CURATED,
        )

    @classmethod
    def load(cls, path: str | Path) -> "CredibilityTable":
        """Read a JSONL table. Lines starting with ``#`` are comments."""
        table = cls()
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip() or line.lstrip().startswith("#"):
                    continue
                try:
                    obj = json.loads(line)
                    table.add(obj["domain"], obj["level"], obj.get("score"), obj.get("description") or "")
                except (ValueError, KeyError) as exc:
                    raise ValueError(f"{path}:{lineno}: {exc}") from None
        return table

    def dump(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for key in sorted(self.entries):
                e = self.entries[key]
                fh.write(json.dumps({"domain": key, "level": e.level.value, "score": e.score,
                                     "description": e.description}, ensure_ascii=False) + "\n")


def lookup_curated(domain: str, table: CredibilityTable) -> SourceBackground:
    hit = table.get(domain)
    return hit if hit is not None else missing(extract_domain(domain))


# -- search seeds ----------------------------------------------------------------

@dataclass(frozen=True)
class Seeds:
    article_titles: tuple[str, ...] = ()
    encyclopedia_summary: str = ""
    query_answers: tuple[str, ...] = ()

    def is_empty(self) -> bool:
        return not (any(t.strip() for t in self.article_titles) or self.encyclopedia_summary.strip()
                    or any(a.strip() for a in self.query_answers))


class SearchClient(Protocol):
    def gather(self, domain: str, queries: Sequence[str]) -> Seeds: ...


class CannedSearchClient:
    """Serves seeds from a JSON mapping ``domain -> {article_titles, encyclopedia_summary, query_answers}``."""

    def __init__(self, data: dict[str, dict]):
        self.data = {extract_domain(k): v for k, v in data.items()}

    @classmethod
    def load(cls, path: str | Path) -> "CannedSearchClient":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh))

    def gather(self, domain: str, queries: Sequence[str]) -> Seeds:
        obj = self.data.get(extract_domain(domain), {})
        return Seeds(
            article_titles=tuple(obj.get("article_titles", ())),
            encyclopedia_summary=obj.get("encyclopedia_summary", ""),
            query_answers=tuple(obj.get("query_answers", ())),
        )


def load_queries(path: str | Path | None = None) -> list[str]:
    """Query templates, one per line, each containing ``{domain}``."""
    if path is None:
        text = resources.files("confact.data").joinpath("background_queries.txt").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    queries = [q.strip() for q in text.splitlines() if q.strip() and not q.startswith("#")]
    bad = [q for q in queries if "{domain}" not in q]
    if bad:
        raise ValueError(f"query templates without {{domain}}: {bad[:3]}")
    return queries


# -- background generation -----------------------------------------------------

GENERATOR_SYSTEM = (
    "You are a media analyst who writes concise, factual background profiles of news "
    "and information sources for fact-checkers."
)

DRAFT_TEMPLATE = """Write an initial background profile of the media source {domain}.

Recent article titles from the source:
{titles}

Encyclopedia summary:
{summary}

Use only the information above. Organise the profile under these headings:
History:
Funded by/Ownership:
Analysis/Bias:
Failed Fact Checks:"""

REFINE_TEMPLATE = """Below is an initial background profile of the media source {domain}, followed by answers collected from web searches about the source.

Initial profile:
{draft}

Search findings:
{answers}

Revise the profile so that it incorporates the search findings, paying particular attention to ownership, funding, political bias and any record of failed fact checks. Keep exactly these four headings:
History:
Funded by/Ownership:
Analysis/Bias:
Failed Fact Checks:"""


def _bullets(items: Iterable[str]) -> str:
    lines = [f"- {x.strip()}" for x in items if x.strip()]
    return "\n".join(lines) if lines else "(none available)"


def background_sections(text: str) -> list[str]:
    found = []
    for name in BACKGROUND_SECTIONS:
        pattern = r"(?im)^[\s*#_]*" + re.escape(name) + r"[\s*_]*:"
        if re.search(pattern, text):
            found.append(name)
    return found


def _ask(backend: Backend, system: str, user: str, max_tokens: int) -> str:
    request = ChatRequest(
        model_name=backend.model_name,
        messages=(ChatMessage("system", system), ChatMessage("user", user)),
        temperature=0.0,
        max_output_tokens=max_tokens,
    )
    return backend.complete(request).text


def generate_background(domain: str, seeds: Seeds, backend: Backend,
                        max_output_tokens: int = 768) -> SourceBackground:
    """Draft a profile from titles and the encyclopedia summary, then refine it
    with the search answers. Returns a ``Generated`` background without a level."""
    if seeds.is_empty():
        raise ValueError(f"no seed information for {domain}")
    domain = extract_domain(domain)
    draft = _ask(backend, GENERATOR_SYSTEM, DRAFT_TEMPLATE.format(
        domain=domain,
        titles=_bullets(seeds.article_titles),
        summary=seeds.encyclopedia_summary.strip() or "(none available)",
    ), max_output_tokens)
    final = _ask(backend, GENERATOR_SYSTEM, REFINE_TEMPLATE.format(
        domain=domain, draft=draft.strip(), answers=_bullets(seeds.query_answers),
    ), max_output_tokens).strip()
    present = background_sections(final)
    if not present:
        raise BackgroundFormatError(f"generated background for {domain} has none of {BACKGROUND_SECTIONS}")
    if len(present) < len(BACKGROUND_SECTIONS):
        logger.warning("background for %s lacks sections %s", domain,
                       [s for s in BACKGROUND_SECTIONS if s not in present])
    return SourceBackground(source_domain=domain, description=final, provenance=Provenance.GENERATED)


# -- level classification ----------------------------------------------------------

CLASSIFY_SYSTEM = (resources.files("confact.prompts") / "classify_credibility.txt").read_text("utf-8")


def render_classification(description: str, exemplars: Sequence[tuple[str, Level | str]],
                          wikipedia: str = "") -> str:
    parts = []
    for i, (desc, level) in enumerate(exemplars, 1):
        parts.append(f"Example {i}\nMedia Description: {desc.strip()}\n"
                     f"Credibility: {as_level(level).value.capitalize()}\n")
    target = f"Target Media Description: {description.strip()}\n"
    if wikipedia.strip():
        target += f"Target Media Wikipedia: {wikipedia.strip()}\n"
    return "\n".join(parts) + "\n" + target + "Target Media Credibility:"


def parse_level(reply: str) -> Level:
    word = reply.strip().strip(".!*`'\"").strip().lower()
    try:
        return Level(word)
    except ValueError:
        raise LevelParseError(f"unexpected credibility label {reply!r}") from None


def classify_level(background: SourceBackground, exemplars: Sequence[tuple[str, Level | str]],
                   backend: Backend, wikipedia: str = "") -> Level:
    if not background.description.strip():
        raise ValueError(f"background for {background.source_domain} has no description")
    reply = _ask(backend, CLASSIFY_SYSTEM, render_classification(background.description, exemplars, wikipedia), 8)
    return parse_level(reply)


def default_exemplars(table: CredibilityTable, per_level: int = 2) -> list[tuple[str, Level]]:
    """Pick up to ``per_level`` described entries per level, in domain order."""
    picked: list[tuple[str, Level]] = []
    for level in (Level.HIGH, Level.MEDIUM, Level.LOW):
        described = [e for k, e in sorted(table.entries.items()) if e.level is level and e.description]
        picked.extend((e.description, level) for e in described[:per_level])
    return picked


# -- providers ---------------------------------------------------------------------

class GTProvider:
    """Curated-table lookup only."""

    name = "gt"

    def __init__(self, table: CredibilityTable):
        self.table = table

    def __call__(self, domain: str) -> SourceBackground:
        return lookup_curated(domain, self.table)


class HybridProvider:
    """Curated lookup with LLM-generated fallback, memoized per domain.

    Generation failures degrade to a ``Missing`` background and are logged;
    they never propagate.
    """

    name = "hybrid"

    def __init__(self, table: CredibilityTable, backend: Backend, search: SearchClient,
                 queries: Sequence[str] | None = None,
                 exemplars: Sequence[tuple[str, Level]] | None = None):
        self.table = table
        self.backend = backend
        self.search = search
        self.queries = list(queries) if queries is not None else load_queries()
        self.exemplars = list(exemplars) if exemplars is not None else default_exemplars(table)
        self._cache: dict[str, SourceBackground] = {}
        self._lock = threading.Lock()

    def __call__(self, domain: str) -> SourceBackground:
        key = extract_domain(domain)
        curated = self.table.get(key)
        if curated is not None:
            return curated
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        result = self._generate(key)
        with self._lock:
            return self._cache.setdefault(key, result)

    def _generate(self, domain: str) -> SourceBackground:
        try:
            seeds = self.search.gather(domain, [q.format(domain=domain) for q in self.queries])
            generated = generate_background(domain, seeds, self.backend)
            level = classify_level(generated, self.exemplars, self.backend,
                                   wikipedia=seeds.encyclopedia_summary)
        except (LLMError, BackgroundFormatError, LevelParseError, ValueError) as exc:
            logger.warning("background generation for %s failed: %s", domain, exc)
            return missing(domain)
        return SourceBackground(domain, generated.description, level, level_to_score(level),
                                Provenance.GENERATED)


def hybrid_provider(domain: str, table: CredibilityTable, backend: Backend,
                    search: SearchClient, **kwargs) -> SourceBackground:
    return HybridProvider(table, backend, search, **kwargs)(domain)


def collect_backgrounds(domains: Iterable[str], provider) -> dict[str, SourceBackground]:
    """Resolve each distinct domain once; ``provider`` of ``None`` yields an empty map."""
    if provider is None:
        return {}
    return {d: provider(d) for d in sorted(set(domains)) if d}
