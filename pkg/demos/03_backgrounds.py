"""Source backgrounds from the curated table, with generation as fallback.

academic.oup.com is not in the table, so the hybrid provider drafts a
profile from canned search seeds, refines it and classifies its level.
A domain without any seeds degrades to a missing background.
"""

from _common import DATA, heading, replay
from confact.credibility import CannedSearchClient, CredibilityTable, HybridProvider

table = CredibilityTable.load(DATA / "fixture_table.jsonl")
provider = HybridProvider(table, replay(), CannedSearchClient.load(DATA / "fixture_search.json"))

for domain in ("https://www.bbc.co.uk/news", "academic.oup.com", "unheard-of.example"):
    bg = provider(domain)
    heading(f"{domain} -> {bg.provenance.value}")
    print("level:", bg.level.value if bg.level else None, "score:", bg.score)
    if bg.description:
        print(bg.description)
