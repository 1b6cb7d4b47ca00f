"""Chunk the evidence for one claim and rank it four ways.

Relevance-only ranking ignores who published a passage. Source filtering
drops low-credibility outlets, and the two weighted modes add a credibility
bonus to the normalized relevance score.
"""

from _common import DATA, heading
from confact.chunking import chunk_document
from confact.corpus import load_dataset
from confact.credibility import CredibilityTable, GTProvider, collect_backgrounds
from confact.ranking import RankingConfig, RankingMode, fuse_and_rank

claim = load_dataset(DATA / "fixture_dataset.jsonl")[0]
passages = [p for d in claim.documents for p in chunk_document(d)]
backgrounds = collect_backgrounds({p.source_domain for p in passages},
                                  GTProvider(CredibilityTable.load(DATA / "fixture_table.jsonl")))

print("question:", claim.question_text)
print(f"{len(passages)} passages from {len(claim.documents)} documents")

for mode in RankingMode:
    heading(mode.value)
    for r in fuse_and_rank(claim.question_text, passages, backgrounds, RankingConfig(top_k=4, mode=mode)):
        level = backgrounds[r.passage.source_domain].level
        print(f"{r.rank}. {r.passage.source_domain:<26} level={level.value if level else '-':<6} "
              f"rel={r.s_rel_norm:.3f} fused={r.s_fused:.3f}  {r.passage.text[:50]!r}")
