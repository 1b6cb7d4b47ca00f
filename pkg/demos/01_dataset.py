"""Load the bundled fixture, check it and summarize each split.

Then re-derive one binary question from its claim with the replayed model.
"""

from dataclasses import replace

from _common import DATA, heading, replay
from confact.corpus import load_dataset, split_stats, validate_dataset, with_question

records = load_dataset(DATA / "fixture_dataset.jsonl")
heading(f"{len(records)} records loaded")
print("validation problems:", validate_dataset(records, require_questions=True) or "none")

for split in ("modc", "humc"):
    s = split_stats(records, split)
    print(f"{split}: {s.n_claims} claims, {s.n_yes} yes / {s.n_no} no, {s.n_sources} distinct sources")

pogba = records[0]
heading("claim to question")
print("claim:   ", pogba.claim_text)
fresh = with_question(replace(pogba, question_text=""), replay())
print("question:", fresh.question_text)
for doc in pogba.documents:
    print(f"  {doc.source_domain:<26} stance={doc.model_stance.value:<20} credibility={doc.human_credibility}")
