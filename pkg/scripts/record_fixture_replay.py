"""Record the bundled replay store with a deterministic stand-in model.

    python scripts/record_fixture_replay.py

No live LLM is involved. The stand-in answers every prompt family with
simple keyword rules so that the fixture configs can be replayed offline
and byte-for-byte. Point ``CONFACT_ENDPOINT`` at a real server and run
``confact run --config ... --backend record:<store>`` to record real
responses instead.
"""

import re
import sys
import tempfile
from pathlib import Path

from confact.annotation import SYSTEM_PROMPT as STANCE_SYSTEM
from confact.annotation import annotate_claim
from confact.corpus import QUESTION_SYSTEM_PROMPT, load_dataset, with_question
from confact.credibility import CLASSIFY_SYSTEM, GENERATOR_SYSTEM
from confact.experiment import load_config, run_experiment
from confact.llm import ChatRequest, RecordBackend, ScriptedBackend

DATA = Path(__file__).resolve().parents[1] / "src" / "confact" / "data"
STORE = DATA / "fixture_replay.jsonl"
CONFIGS = ["fixture_baseline.yaml", "fixture_gt.yaml", "fixture_hybrid.yaml", "fixture_sentence.yaml"]
MODEL = "fixture-standin"

NEGATIVE = re.compile(
    r"\b(not|no evidence|fake|denied|denies|deny|myth|did not|does not|cannot|weak|premature|"
    r"tiny fraction|flawed|fraudulent|difficult to pick out|barely)\b", re.I)
UNRELIABLE = re.compile(
    r"(conspiracy|propaganda|satire|pseudoscience|misinformation|hyper-partisan|rated false|"
    r"does not disclose|hoax)", re.I)


def lean(text: str) -> str:
    return "no" if NEGATIVE.search(text) else "yes"


def evidence_items(user: str) -> list[tuple[str, str]]:
    """(evidence text, source description) pairs from a generation prompt."""
    items = []
    pattern = re.compile(r"Evidence \d+: (.*?)(?:\nSource Media Description: (.*?))?(?=\nEvidence \d+: |\nQuestion: |\n\n|\Z)", re.S)
    for m in pattern.finditer(user):
        items.append((m.group(1), m.group(2) or ""))
    return items


def weighted_answer(items) -> str:
    score = 0.0
    for text, desc in items:
        weight = 0.2 if UNRELIABLE.search(desc) else 1.0
        score += weight if lean(text) == "yes" else -weight
    return "yes" if score > 0 else "no"


def reply(request: ChatRequest) -> str:
    system = request.messages[0].content
    user = request.messages[-1].content
    if system == QUESTION_SYSTEM_PROMPT:
        claim = user.rsplit("Claim:", 1)[1].strip().rstrip(".")
        return f"Is it true that {claim[0].lower()}{claim[1:]}?"
    if system == STANCE_SYSTEM:
        if "URL:" in user and "Scraped Content:" not in user:
            return "Not enough evidence"
        content = user.split("Scraped Content:", 1)[1]
        label = "Reject" if lean(content) == "no" else "Support"
        if "Final answer" in user:
            return f"The text addresses the claim directly.\nFinal answer: {label}"
        return label
    if system == GENERATOR_SYSTEM:
        domain = re.search(r"media source (\S+?)[.\s]", user).group(1)
        findings = re.findall(r"^- (.*)$", user, re.M)
        failed = next((f for f in findings if re.search(r"fact check", f, re.I)), "No record found.")
        return (f"History: {domain} is an online publication.\n"
                f"Funded by/Ownership: {next((f for f in findings if 'fund' in f.lower() or 'run' in f.lower()), 'Unknown.')}\n"
                f"Analysis/Bias: {' '.join(findings[:2]) or 'No analysis available.'}\n"
                f"Failed Fact Checks: {failed}")
    if system == CLASSIFY_SYSTEM:
        target = user.rsplit("Target Media Description:", 1)[1]
        if re.search(r"rated false|does not disclose|conspiracy", target, re.I):
            return "low"
        if re.search(r"opinion|single author|critical", target, re.I):
            return "medium"
        return "high"
    # answer generation
    if "Supporting Evidence:" in user:
        sup = user.split("Supporting Evidence:", 1)[1].split("Refuting Evidence:", 1)[0]
        ref = user.split("Refuting Evidence:", 1)[1]
        n_sup = len(re.findall(r"^- Sentence:", sup, re.M)) - 0.8 * len(re.findall(r"unreliable", sup))
        n_ref = len(re.findall(r"^- Sentence:", ref, re.M)) - 0.8 * len(re.findall(r"unreliable", ref))
        answer = "yes" if n_sup > n_ref else "no"
        return f"Weighing the detailed, credible evidence on both sides.\nFinal Answer: {answer}"
    if "Media Background Analysis:" in user:
        text = user.split("\nEvidence: ", 1)[1].split("\nMedia Background Analysis:", 1)[0]
        desc = user.split("Media Background Analysis:", 1)[1].split("\n\n", 1)[0]
        note = "The source appears unreliable." if UNRELIABLE.search(desc) else "The source appears credible."
        return f"{note} The sentence {'refutes' if lean(text) == 'no' else 'supports'} the question.\nFinal Answer: {lean(text)}"
    items = evidence_items(user)
    answer = weighted_answer(items)
    if "#*# Final Answer" in user:
        return f"Analysis: The evidence is mixed; weighting by reliability.\n#*# Final Answer: {answer}"
    if "perturbed" in user:
        return f"Some passages look perturbed and were ignored.\nFinal Answer: {answer}"
    return answer.capitalize() + "."


def main() -> int:
    if STORE.exists():
        STORE.unlink()
    backend = RecordBackend(ScriptedBackend(reply, model_name=MODEL), STORE)
    records = load_dataset(DATA / "fixture_dataset.jsonl")
    for rec in records:
        with_question(rec, backend)
        annotate_claim(rec, backend)
    with tempfile.TemporaryDirectory() as tmp:
        for name in CONFIGS:
            cfg = load_config(DATA / name)
            cfg.backend = f"record:{STORE}"
            cfg.output_dir = Path(tmp) / name
            result = run_experiment(cfg, backend=backend)
            if result.failed:
                print("failed cells:", result.failed, file=sys.stderr)
                return 1
    print(f"wrote {sum(1 for _ in open(STORE))} entries to {STORE}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
