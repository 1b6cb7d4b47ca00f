"""Regenerate the bundled 10-claim fixture dataset and curated table.

    python scripts/make_fixture_dataset.py

The evidence texts are short hand-written paraphrases in the style of
scraped news pages; they are fixtures, not real articles.
"""

import json
from pathlib import Path

DATA = Path(__file__).resolve().parents[1] / "src" / "confact" / "data"

LONG_OUP = "\n\n".join([
    "Housing First is an approach to homelessness that offers permanent, affordable housing "
    "as quickly as possible to people experiencing homelessness, and then provides the "
    "supportive services and connections to community resources that people need to keep "
    "their housing. Finland adopted the approach as national policy in 2008, converting "
    "hostels and shelters into supported housing units with individual tenancy agreements.",
    " ".join(
        "The national programme combined new construction, purchases of scattered flats and "
        "the renovation of existing shelters. Municipal social workers, non-profit housing "
        "providers and the state funding agency worked under shared targets. Evaluations "
        "compiled by the housing finance agency report that long-term homelessness fell by "
        "more than a third in the first decade of the programme, while the number of "
        "shelter beds in Helsinki dropped from several hundred to a few dozen."
        .split()
        * 3
    ),
    "Cost studies in Tampere estimated savings of around 15,000 euros per person per year in "
    "health, social and justice services once people were housed. Researchers caution that "
    "the decline also coincided with broader social housing investment, so isolating the "
    "effect of the policy itself is difficult.",
    "Overall, the evidence reviewed in this article indicates that homelessness in Finland "
    "declined substantially after the introduction of Housing First, and that the policy is "
    "widely credited by practitioners for that decline.",
])

CLAIMS = [
    {
        "claim_id": "c01",
        "claim": "Paul Pogba retired from international football in response to French President "
                 "Macron's comments on Islamist terrorism.",
        "question": "Did Paul Pogba retire from international football in response to French "
                    "President Macron's comments on Islamist terrorism?",
        "claim_date": "2020-10-26", "gold_answer": "no", "origin": "factcheckqa", "split": "modc",
        "documents": [
            ("https://www.bbc.co.uk/sport/football/54691842", "reject", "reject", 5, "mainstream_news",
             "Manchester United midfielder Paul Pogba has said reports he has quit the France team "
             "over comments made by President Emmanuel Macron are \"100% fake\".\n\n"
             "Several outlets claimed the 27-year-old had retired from international football after "
             "Macron defended the right to show caricatures of the Prophet Muhammad.\n\n"
             "Pogba said on Instagram that he was \"outraged, disappointed and upset\" that some "
             "media had used his name to publish fake news."),
            ("https://en.mehrnews.com/news/165168/Pogba-quits-intl-football-after-comments-from-Macron-report",
             "support", "support", 2, "mainstream_news",
             "French footballer Paul Pogba has quit international football after comments made by "
             "French President Emmanuel Macron about Islamist terrorism, according to a report.\n\n"
             "The Manchester United midfielder, who is a practising Muslim, retired from the French "
             "national team in protest, the report said."),
            ("https://www.reuters.com/article/soccer-france-pogba-idUS", "reject", "reject", 5, "mainstream_news",
             "Paul Pogba denied on Monday a report that he had retired from the French national team "
             "following remarks by President Emmanuel Macron.\n\n"
             "The World Cup winner called the story, first published by a British tabloid website, "
             "unacceptable and said he remains available for selection by coach Didier Deschamps."),
            ("https://worldnewsdailyreport.com/pogba-quits-france", "support", "not_enough_evidence", 1, "other",
             "BREAKING: Pogba QUITS France after Macron insult! Sources close to the player say the "
             "Muslim star has walked away from Les Bleus for good. Share before it gets deleted!"),
        ],
    },
    {
        "claim_id": "c02",
        "claim": "Nigeria had a population of 45 million at the time of independence.",
        "question": "Did Nigeria have a population of 45 million at the time of independence?",
        "claim_date": "2020-10-01", "gold_answer": "yes", "origin": "averitec", "split": "modc",
        "documents": [
            ("https://data.worldbank.org/indicator/SP.POP.TOTL?locations=NG", "support", "support", 5, "government",
             "Population, total - Nigeria. 1960: 45,138,458. 1961: 46,063,563. 1962: 47,029,822.\n\n"
             "Source: United Nations Population Division, World Population Prospects."),
            ("https://www.britannica.com/place/Nigeria/Demographic-trends", "support", "support", 4, "academic",
             "At independence in 1960 Nigeria was home to roughly 45 million people, making it the "
             "most populous country in Africa.\n\nBy the early twenty-first century the population "
             "had more than tripled."),
            ("https://naijahistoryblog.com/census-truth", "reject", "reject", 2, "other",
             "The 1963 census counted 55.6 million Nigerians. Anyone saying 45 million at independence "
             "is ignoring the census figures, which show the real population was far higher.\n\n"
             "The 45 million figure is a myth repeated by politicians."),
        ],
    },
    {
        "claim_id": "c03",
        "claim": "Climate change has increased the frequency of Atlantic hurricanes.",
        "question": "Has climate change increased hurricane frequency?",
        "claim_date": None, "gold_answer": "no", "origin": "factcheckqa", "split": "modc",
        "documents": [
            ("https://www.gfdl.noaa.gov/global-warming-and-hurricanes/", "reject", "reject", 5, "government",
             "It is premature to conclude with high confidence that human-caused increases in "
             "greenhouse gases have had a detectable impact on Atlantic hurricane frequency.\n\n"
             "Models project that the global number of tropical cyclones will decrease or remain "
             "about the same, while the proportion of very intense hurricanes is likely to increase."),
            ("https://climatealarmnow.org/hurricanes-everywhere", "support", "support", 2, "non_profit",
             "Hurricanes are getting more frequent every single year because of climate change. "
             "Climate change has increased hurricane frequency dramatically and the science is settled.\n\n"
             "Count the storms: more names on the list every season."),
            ("https://www.carbonbrief.org/hurricanes-and-climate", "reject", "not_enough_evidence", 4, "non_profit",
             "Scientists say the link between climate change and the number of hurricanes is weak, but "
             "the evidence that storms are becoming wetter and more intense is stronger."),
        ],
    },
    {
        "claim_id": "c04",
        "claim": "The deficit has come down under the Conservatives.",
        "question": "Has the deficit come down under the Conservatives?",
        "claim_date": "2019-11-20", "gold_answer": "yes", "origin": "factcheckqa", "split": "modc",
        "documents": [
            ("https://fullfact.org/economy/deficit-conservatives/", "support", "support", 5, "non_profit",
             "The deficit has come down under the Conservatives. Public sector net borrowing fell from "
             "about 10% of GDP in 2009/10 to around 2% in 2018/19, according to the Office for Budget "
             "Responsibility.\n\nThe deficit is the gap between spending and income in a single year."),
            ("https://www.taxresearch.org.uk/Blog/deficit-myth", "reject", "reject", 3, "other",
             "The claim that the deficit has come down under the Conservatives ignores the cost of "
             "austerity. Has the deficit really come down? Not in any way that matters to households, "
             "and the national debt has kept rising."),
            ("https://www.ons.gov.uk/economy/governmentpublicsectorandtaxes", "support", "support", 5, "government",
             "Borrowing in the financial year ending March 2019 was the lowest for 17 years.\n\n"
             "Public sector net borrowing excluding public sector banks decreased by 18.1 billion "
             "pounds compared with the previous year."),
        ],
    },
    {
        "claim_id": "c05",
        "claim": "5G mobile networks spread COVID-19.",
        "question": "Do 5G mobile networks spread COVID-19?",
        "claim_date": "2020-04-05", "gold_answer": "no", "origin": "averitec", "split": "modc",
        "documents": [
            ("https://www.who.int/emergencies/diseases/novel-coronavirus-2019/advice-for-public/myth-busters",
             "reject", "reject", 5, "government",
             "5G mobile networks do not spread COVID-19. Viruses cannot travel on radio waves or mobile "
             "networks. COVID-19 is spreading in many countries that do not have 5G mobile networks."),
            ("https://www.infowars.com/5g-coronavirus-link", "support", "support", 1, "other",
             "The rollout of 5G towers in Wuhan happened just weeks before the outbreak. Coincidence? "
             "5G mobile networks spread COVID-19 by weakening immune systems, insiders claim."),
            ("https://www.naturalnews.com/5g-covid", "support", "support", 1, "other",
             "Mounting evidence shows 5G radiation and the coronavirus are connected. Mainstream media "
             "refuses to report how 5G networks spread COVID-19 symptoms."),
            ("https://fullfact.org/health/5g-coronavirus/", "reject", "reject", 5, "non_profit",
             "There is no evidence that 5G is linked to COVID-19. The virus is spread through "
             "respiratory droplets, and cases occurred in places with no 5G coverage."),
        ],
    },
    {
        "claim_id": "c06",
        "claim": "Drinking hot water kills the coronavirus.",
        "question": "Does drinking hot water kill the coronavirus?",
        "claim_date": "2020-03-15", "gold_answer": "no", "origin": "factcheckqa", "split": "modc",
        "documents": [
            ("https://www.unicef.org/coronavirus/myths", "reject", "reject", 5, "non_profit",
             "Drinking hot water does not kill the coronavirus. Keeping hydrated is healthy, but there "
             "is no evidence that hot drinks protect against infection."),
            ("https://healthyhomecures.net/hot-water-virus", "support", "support", 2, "other",
             "Doctors in Asia recommend drinking hot water every 15 minutes because heat kills the "
             "coronavirus before it reaches the lungs. Drinking hot water kills the coronavirus "
             "naturally."),
        ],
    },
    {
        "claim_id": "c07",
        "claim": "The Great Wall of China is visible from space with the naked eye.",
        "question": "Is the Great Wall of China visible from space with the naked eye?",
        "claim_date": None, "gold_answer": "no", "origin": "factcheckqa", "split": "humc",
        "documents": [
            ("https://www.nasa.gov/vision/space/workinginspace/great_wall.html", "reject", "reject", 5, "government",
             "The Great Wall can barely be seen from the Shuttle, so it would not be possible to see it "
             "from the Moon with the naked eye. Astronauts report it is very difficult to pick out from "
             "low Earth orbit without aid."),
            ("https://chinatravelwonders.com/great-wall-facts", "support", "support", 3, "other",
             "Fun fact: the Great Wall of China is the only man-made structure visible from space with "
             "the naked eye! Visit the wall this summer."),
            ("https://www.scientificamerican.com/article/is-chinas-great-wall-visible-from-space/",
             "reject", "reject", 5, "academic",
             "The wall is mostly made of materials the same colour as the surrounding soil and is only "
             "a few metres wide, so it is not visible from space with the naked eye."),
        ],
    },
    {
        "claim_id": "c08",
        "claim": "Homelessness in Finland declined after it adopted Housing First.",
        "question": "Did homelessness in Finland decline after it adopted Housing First?",
        "claim_date": "2021-02-10", "gold_answer": "yes", "origin": "averitec", "split": "humc",
        "documents": [
            ("https://www.theguardian.com/cities/2019/jun/03/its-a-miracle-helsinkis-radical-solution-to-homelessness",
             "support", "support", 4, "mainstream_news",
             "Finland is the only EU country where homelessness is falling. Since Housing First was "
             "adopted in 2008 the number of long-term homeless people has fallen by more than 35%."),
            ("https://freemarketvoices.org/housing-first-fails", "reject", "reject", 2, "non_profit",
             "Housing First did not cause any decline in homelessness in Finland. Homelessness numbers "
             "fell because of changes in counting methods, not the policy."),
            ("https://academic.oup.com/esr/article/housing-first-finland", "support", "support", 5, "academic",
             LONG_OUP),
        ],
    },
    {
        "claim_id": "c09",
        "claim": "Bill Gates owns the majority of farmland in the United States.",
        "question": "Does Bill Gates own the majority of farmland in the United States?",
        "claim_date": "2021-06-01", "gold_answer": "no", "origin": "averitec", "split": "humc",
        "documents": [
            ("https://apnews.com/article/fact-check-gates-farmland", "reject", "reject", 5, "mainstream_news",
             "Bill Gates is the largest private owner of farmland in the US, but his roughly 270,000 "
             "acres amount to a tiny fraction of the 900 million acres of US farmland. He does not own "
             "the majority."),
            ("https://truthpatriotnews.com/gates-owns-america", "support", "support", 1, "other",
             "Bill Gates owns the majority of farmland in the United States and is buying the rest. "
             "Your food supply is now controlled by one man."),
            ("https://www.usda.gov/topics/farming/land-use", "reject", "not_enough_evidence", 5, "government",
             "There are about 895 million acres of farmland in the United States, held by roughly two "
             "million farms. No single owner holds more than a tiny fraction of it."),
        ],
    },
    {
        "claim_id": "c10",
        "claim": "Large clinical trials showed that ivermectin cures COVID-19.",
        "question": "Did large clinical trials show that ivermectin cures COVID-19?",
        "claim_date": "2022-03-30", "gold_answer": "no", "origin": "factcheckqa", "split": "humc",
        "documents": [
            ("https://www.nih.gov/news-events/ivermectin-trial", "reject", "reject", 5, "government",
             "In the large randomised TOGETHER trial, treatment with ivermectin did not result in a "
             "lower incidence of hospitalisation among patients with COVID-19."),
            ("https://frontlinedocs.org/ivermectin-miracle", "support", "support", 2, "non_profit",
             "Large clinical trials showed that ivermectin cures COVID-19, yet the data has been "
             "suppressed. Dozens of studies prove ivermectin works."),
            ("https://www.bmj.com/content/ivermectin", "reject", "reject", 5, "academic",
             "Large trials did not show that ivermectin cures COVID-19. Meta-analyses that suggested "
             "benefit relied on studies later found to be flawed or fraudulent."),
        ],
    },
]

TABLE = [
    ("bbc.co.uk", "high", "Public broadcaster funded by the UK licence fee. Factual reporting: high; few failed fact checks."),
    ("reuters.com", "high", "International news agency owned by Thomson Reuters. Minimal bias and a clean fact-check record."),
    ("mehrnews.com", "low", "Iranian state-affiliated news agency. Propaganda and numerous failed fact checks."),
    ("worldnewsdailyreport.com", "low", "Self-described satire site whose fabricated stories are routinely shared as real news."),
    ("worldbank.org", "high", "International financial institution publishing official development statistics."),
    ("britannica.com", "high", "Long-established encyclopedia with expert-written, fact-checked entries."),
    ("noaa.gov", "high", "US federal scientific agency for oceans and atmosphere; evidence-based reporting."),
    ("fullfact.org", "high", "Independent UK fact-checking charity; transparent funding and methodology."),
    ("ons.gov.uk", "high", "UK national statistical institute publishing official statistics."),
    ("who.int", "high", "United Nations agency for international public health."),
    ("infowars.com", "low", "Conspiracy website with an extensive record of failed fact checks and promoted hoaxes."),
    ("naturalnews.com", "low", "Pseudoscience and conspiracy site; repeatedly publishes health misinformation."),
    ("unicef.org", "high", "United Nations children's agency; factual public-health communication."),
    ("nasa.gov", "high", "US space agency; primary source for space science."),
    ("scientificamerican.com", "high", "Popular science magazine with expert authors; slight left-leaning editorial bias."),
    ("theguardian.com", "medium", "UK newspaper with left-leaning bias; generally factual with occasional failed fact checks."),
    ("apnews.com", "high", "Not-for-profit news cooperative; minimal bias and high factual reporting."),
    ("usda.gov", "high", "US Department of Agriculture; official agricultural statistics."),
    ("nih.gov", "high", "US medical research agency; evidence-based health information."),
    ("bmj.com", "high", "Peer-reviewed medical journal with rigorous editorial standards."),
    ("truthpatriotnews.com", "low", "Hyper-partisan site spreading conspiracy theories and fabricated stories."),
]


def main() -> None:
    lines = []
    for c in CLAIMS:
        rec = dict(c)
        docs = []
        for i, (url, model, human, cred, stype, content) in enumerate(c["documents"]):
            docs.append({
                "doc_id": f"{c['claim_id']}-d{i}",
                "url": url,
                "archived_url": f"https://web.archive.org/web/2024/{url}",
                "content": content,
                "model_stance": model,
                "human_stance": human,
                "human_credibility": cred,
                "source_type": stype,
            })
        rec["documents"] = docs
        lines.append(json.dumps(rec, ensure_ascii=False))
    (DATA / "fixture_dataset.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")
    (DATA / "fixture_2claims.jsonl").write_text("\n".join(lines[:2]) + "\n", encoding="utf-8")

    header = [
        "# Curated credibility table: one JSON object per line {domain, level, score?, description?}.",
        "# Levels collapse media-rating labels: an explicit credibility rating (high/medium/low) is used",
        "# as is; otherwise factual reporting very high/high -> high, mostly factual -> medium,",
        "# mixed/low/very low -> low. A missing score defaults to low 0.1, medium 0.5, high 0.9.",
    ]
    rows = [json.dumps({"domain": d, "level": lvl, "description": desc}) for d, lvl, desc in sorted(TABLE)]
    (DATA / "fixture_table.jsonl").write_text("\n".join(header + rows) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
