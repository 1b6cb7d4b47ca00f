"""Stance-annotate evidence with three prompt variants and flag conflicts.

Each document is labelled from its URL alone, from its content, and from
its content with a written justification. The majority label wins. A claim
is conflicting when it has both supporting and refuting documents.
"""

from _common import DATA, heading, replay
from confact.annotation import annotate_claim, detect_conflicts
from confact.corpus import load_dataset

backend = replay()
for claim in load_dataset(DATA / "fixture_dataset.jsonl")[:3]:
    annotated, anns = annotate_claim(claim, backend)
    heading(f"{claim.claim_id}: conflicting={detect_conflicts(annotated)}")
    print(claim.claim_text)
    for ann, doc in zip(anns, annotated.documents):
        votes = ", ".join(f"{v.value}={s.value}" for v, s in ann.labels.items())
        print(f"  {doc.source_domain:<26} {ann.final.value:<20} [{votes}]")
