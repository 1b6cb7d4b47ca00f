"""Answer one claim with every prompting strategy.

Baselines see only the evidence. The source-aware strategies also see each
passage's source background. MajV and the ensemble make one call per
passage; the ensemble then aggregates the per-passage rationales.
"""

from _common import DATA, heading, replay
from confact.chunking import chunk_document
from confact.corpus import load_dataset
from confact.credibility import CredibilityTable, GTProvider, collect_backgrounds
from confact.generation import Strategy, run_strategy
from confact.ranking import RankingConfig, fuse_and_rank

records = load_dataset(DATA / "fixture_dataset.jsonl")
claim = records[0]
modc = [r for r in records if r.split is claim.split]
backgrounds = collect_backgrounds({d.source_domain for r in modc for d in r.documents},
                                  GTProvider(CredibilityTable.load(DATA / "fixture_table.jsonl")))
passages = [p for d in claim.documents for p in chunk_document(d)]
ranked = fuse_and_rank(claim.question_text, passages, backgrounds, RankingConfig())
backend = replay()

print("question:", claim.question_text, "| gold:", claim.gold_answer.value)
for strategy in Strategy:
    verdict = run_strategy(claim, strategy, ranked, backgrounds if strategy.source_aware else {}, backend)
    heading(f"{strategy.value}: {verdict.answer.value} ({len(verdict.raw_responses)} calls)")
    print(verdict.raw_responses[-1].strip()[:160])
