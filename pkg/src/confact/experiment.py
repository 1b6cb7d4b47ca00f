"""Config-driven experiment grid: rank, generate and score every cell.

A cell is one (split, mode, strategy) combination. Its outputs live in
``<output_dir>/<split>/<provider>/<mode>/<strategy>/`` and a cell whose
``scorecard.json`` already exists is skipped, so interrupted runs resume.
"""

from __future__ import annotations

import json
import logging
import shutil
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from confact.chunking import DEFAULT_MAX_WORDS, Granularity, Passage, chunk_document
from confact.corpus import Answer, ClaimRecord, Split, load_dataset
from confact.credibility import (CannedSearchClient, CredibilityTable, GTProvider, HybridProvider,
                                 collect_backgrounds, load_queries)
from confact.evaluation import ScoreCard, render_report, report_records, score, write_verdicts
from confact.generation import GenerationSettings, Strategy, TiePolicy, Verdict, run_strategy
from confact.llm import Backend, backend_from_spec, parallel_map
from confact.ranking import MissingBackgroundPolicy, RankingConfig, RankingMode, fuse_and_rank

logger = logging.getLogger(__name__)

PROVIDERS = ("none", "gt", "hybrid")

EXIT_OK = 0
EXIT_CELL_FAILURES = 1
EXIT_CONFIG = 2


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    dataset_path: Path
    output_dir: Path
    backend: str
    splits: list[Split] = field(default_factory=lambda: [Split.MODC, Split.HUMC])
    strategies: list[Strategy] = field(default_factory=lambda: [Strategy.DIRA])
    provider: str = "none"
    modes: list[RankingMode] = field(default_factory=lambda: [RankingMode.RELEVANCE])
    top_k: int = 5
    beta: float = 0.8
    gamma: float = 0.3
    granularity: Granularity = Granularity.PARAGRAPH
    max_words: int = DEFAULT_MAX_WORDS
    missing_background_policy: MissingBackgroundPolicy = MissingBackgroundPolicy.KEEP
    curated_table: Path | None = None
    search_seeds: Path | None = None
    queries: Path | None = None
    model: str = "default"
    max_output_tokens: int = 1024
    tie: TiePolicy = TiePolicy.NO
    max_parallel: int = 4
    seed: int = 0

    def ranking(self, mode: RankingMode) -> RankingConfig:
        return RankingConfig(self.top_k, self.beta, self.gamma, mode, self.granularity,
                             self.missing_background_policy)

    def validate(self) -> None:
        if self.provider not in PROVIDERS:
            raise ConfigError(f"provider must be one of {PROVIDERS}, got {self.provider!r}")
        if self.provider == "none":
            sba = [s.value for s in self.strategies if s.source_aware]
            cred_modes = [m.value for m in self.modes if m is not RankingMode.RELEVANCE]
            if sba or cred_modes:
                raise ConfigError(f"provider 'none' cannot be combined with {sba + cred_modes}")
        elif self.curated_table is None:
            raise ConfigError(f"provider {self.provider!r} needs a curated_table")
        if self.provider == "hybrid" and self.search_seeds is None:
            raise ConfigError("provider 'hybrid' needs search_seeds")
        for name in ("dataset_path", "curated_table", "search_seeds", "queries"):
            path = getattr(self, name)
            if path is not None and not Path(path).exists():
                raise ConfigError(f"{name}: {path} does not exist")
        for spec_prefix in ("replay:",):
            if self.backend.startswith(spec_prefix) and not Path(self.backend[len(spec_prefix):]).exists():
                raise ConfigError(f"backend store {self.backend[len(spec_prefix):]} does not exist")
        try:
            for mode in self.modes:
                self.ranking(mode)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if not self.strategies or not self.splits or not self.modes:
            raise ConfigError("splits, strategies and modes must be non-empty")


def _enum_list(enum_cls, values, key):
    if isinstance(values, str):
        values = [values]
    try:
        return [enum_cls(str(v).lower()) for v in values]
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from None


def config_from_dict(raw: dict[str, Any], base_dir: Path = Path("."),
                     name: str = "experiment") -> ExperimentConfig:
    """Build a config from parsed YAML.

    Relative input paths resolve against ``base_dir`` (the config file's
    directory); ``output_dir`` resolves against the working directory and
    defaults to ``runs/<name>``.
    """
    raw = dict(raw)

    def path(key, required=False):
        value = raw.pop(key, None)
        if value is None:
            if required:
                raise ConfigError(f"missing required key {key!r}")
            return None
        p = Path(value)
        return p if p.is_absolute() else base_dir / p

    def resolve_backend(spec: str) -> str:
        for prefix in ("replay:", "record:"):
            if spec.startswith(prefix):
                p = Path(spec[len(prefix):])
                return prefix + str(p if p.is_absolute() else base_dir / p)
        return spec

    if "backend" not in raw:
        raise ConfigError("missing required key 'backend'")
    ranking = raw.pop("ranking", {}) or {}
    generation = raw.pop("generation", {}) or {}
    tie = generation.get("tie", "no")
    if isinstance(tie, bool):  # YAML reads a bare no/yes as a boolean
        tie = "yes" if tie else "no"
    try:
        cfg = ExperimentConfig(
            dataset_path=path("dataset", required=True),
            output_dir=Path(raw.pop("output_dir", None) or f"runs/{name}"),
            backend=resolve_backend(str(raw.pop("backend"))),
            splits=_enum_list(Split, raw.pop("splits", ["modc", "humc"]), "splits"),
            strategies=_enum_list(Strategy, raw.pop("strategies", ["dira"]), "strategies"),
            provider=str(raw.pop("provider", "none")).lower(),
            modes=_enum_list(RankingMode, ranking.get("modes", ["rel"]), "ranking.modes"),
            top_k=int(ranking.get("top_k", 5)),
            beta=float(ranking.get("beta", 0.8)),
            gamma=float(ranking.get("gamma", 0.3)),
            granularity=Granularity(ranking.get("granularity", "para")),
            max_words=int(ranking.get("max_words", DEFAULT_MAX_WORDS)),
            missing_background_policy=MissingBackgroundPolicy(
                ranking.get("missing_background_policy", "keep")),
            curated_table=path("curated_table"),
            search_seeds=path("search_seeds"),
            queries=path("queries"),
            model=str(raw.pop("model", "default")),
            max_output_tokens=int(generation.get("max_output_tokens", 1024)),
            tie=TiePolicy(tie),
            max_parallel=int(raw.pop("max_parallel", 4)),
            seed=int(raw.pop("seed", 0)),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None
    if raw:
        raise ConfigError(f"unknown config keys: {sorted(raw)}")
    return cfg


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text("utf-8"))
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: expected a mapping at top level")
    return config_from_dict(raw, path.parent, path.stem)


@dataclass
class RunResult:
    cards: dict[str, dict[tuple[str, str, str], ScoreCard]]  # split -> key -> card
    failed: list[str]
    skipped: list[str]

    @property
    def exit_code(self) -> int:
        return EXIT_CELL_FAILURES if self.failed else EXIT_OK


def make_provider(cfg: ExperimentConfig, backend: Backend):
    if cfg.provider == "none":
        return None
    table = CredibilityTable.load(cfg.curated_table)
    if cfg.provider == "gt":
        return GTProvider(table)
    return HybridProvider(table, backend, CannedSearchClient.load(cfg.search_seeds),
                          queries=load_queries(cfg.queries))


def cell_dir(cfg: ExperimentConfig, split: Split, mode: RankingMode, strategy: Strategy) -> Path:
    return cfg.output_dir / split.value / cfg.provider / mode.value / strategy.value


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def run_experiment(cfg: ExperimentConfig, backend: Backend | None = None) -> RunResult:
    cfg.validate()
    records = load_dataset(cfg.dataset_path)
    backend = backend or backend_from_spec(cfg.backend, cfg.model, cfg.max_parallel)
    provider = make_provider(cfg, backend)
    settings = GenerationSettings(cfg.max_output_tokens, cfg.tie, max_parallel=1)
    cards: dict[str, dict[tuple[str, str, str], ScoreCard]] = {}
    failed: list[str] = []
    skipped: list[str] = []
    passages_cache: dict[str, list[Passage]] = {}
    backgrounds_cache: dict[Split, dict] = {}

    def passages_for(claim: ClaimRecord) -> list[Passage]:
        if claim.claim_id not in passages_cache:
            passages_cache[claim.claim_id] = [
                p for d in claim.documents for p in chunk_document(d, cfg.granularity, cfg.max_words)
            ]
        return passages_cache[claim.claim_id]

    for split in cfg.splits:
        claims = [r for r in records if r.split is split]
        for mode in cfg.modes:
            for strategy in cfg.strategies:
                name = f"{split.value}/{cfg.provider}/{mode.value}/{strategy.value}"
                out = cell_dir(cfg, split, mode, strategy)
                key = (strategy.value, cfg.provider, mode.value)
                if (out / "scorecard.json").exists():
                    card = ScoreCard.from_dict(json.loads((out / "scorecard.json").read_text("utf-8")))
                    cards.setdefault(split.value, {})[key] = card
                    skipped.append(name)
                    logger.info("cell %s already complete, skipping", name)
                    continue
                try:
                    if not claims:
                        raise ValueError(f"split {split.value} has no claims")
                    missing_q = [c.claim_id for c in claims if not c.question_text.strip()]
                    if missing_q:
                        raise ValueError(f"claims without a question: {missing_q[:5]}")
                    if split not in backgrounds_cache:
                        domains = {d.source_domain for c in claims for d in c.documents}
                        backgrounds_cache[split] = collect_backgrounds(domains, provider)
                    backgrounds = backgrounds_cache[split]
                    ranking = cfg.ranking(mode)

                    def verdict_for(claim: ClaimRecord) -> Verdict:
                        ranked = fuse_and_rank(claim.question_text, passages_for(claim), backgrounds, ranking)
                        if not ranked:
                            return Verdict(claim.claim_id, Answer.UNPARSEABLE, strategy,
                                           error="no admissible evidence")
                        return run_strategy(claim, strategy, ranked, backgrounds, backend, settings)

                    for c in claims:
                        passages_for(c)
                    verdicts = parallel_map(verdict_for, claims, cfg.max_parallel)
                    card = score(verdicts, claims)
                    _commit_cell(out, verdicts, card)
                except Exception as exc:  # a failed cell must not stop the grid
                    logger.error("cell %s failed: %s", name, exc)
                    failed.append(name)
                    continue
                cards.setdefault(split.value, {})[key] = card
    if cards:
        write_run_report(cards, cfg.output_dir)
    return RunResult(cards, failed, skipped)


def write_run_report(cards: dict[str, dict[tuple[str, str, str], ScoreCard]], out_dir: Path) -> None:
    """``report.md`` with one table per split, plus ``report.jsonl`` (one card per line)."""
    sections = [render_report(cards[split], title=f"Split: {split}") for split in sorted(cards)]
    (out_dir / "report.md").write_text("\n".join(sections), encoding="utf-8")
    with open(out_dir / "report.jsonl", "w", encoding="utf-8") as fh:
        for split in sorted(cards):
            for rec in report_records(cards[split]):
                fh.write(json.dumps({"split": split, **rec}, sort_keys=True) + "\n")


def collect_cards(out_dir: Path) -> dict[str, dict[tuple[str, str, str], ScoreCard]]:
    """Gather every finished cell's scorecard below ``out_dir``."""
    cards: dict[str, dict[tuple[str, str, str], ScoreCard]] = {}
    for path in sorted(Path(out_dir).glob("*/*/*/*/scorecard.json")):
        strategy, mode, provider, split = (path.parent.name, path.parent.parent.name,
                                           path.parent.parent.parent.name,
                                           path.parent.parent.parent.parent.name)
        card = ScoreCard.from_dict(json.loads(path.read_text("utf-8")))
        cards.setdefault(split, {})[(strategy, provider, mode)] = card
    return cards


def _commit_cell(out: Path, verdicts: list[Verdict], card: ScoreCard) -> None:
    """Write into a scratch directory, then move it into place in one rename."""
    tmp = out.with_name(out.name + ".partial")
    if tmp.exists():
        shutil.rmtree(tmp)
    tmp.mkdir(parents=True)
    write_verdicts(verdicts, tmp / "verdicts.jsonl")
    _write_json(tmp / "scorecard.json", card.to_dict())
    if out.exists():
        shutil.rmtree(out)
    tmp.rename(out)
