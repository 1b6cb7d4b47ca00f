"""Accuracy / macro-F1 scoring and report rendering."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from confact.corpus import Answer, ClaimRecord
from confact.generation import Verdict

CLASSES = (Answer.YES, Answer.NO)

FOOTNOTE = (
    "Unparseable answers count as wrong: they add to the gold class's recall "
    "denominator and to no class's predictions."
)


@dataclass(frozen=True)
class ScoreCard:
    n: int
    accuracy: float
    macro_f1: float
    confusion: tuple[tuple[int, int], tuple[int, int]]
    n_unparseable: int
    class_f1: tuple[float, float] = (0.0, 0.0)  # (yes, no)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "accuracy": self.accuracy,
            "macro_f1": self.macro_f1,
            "confusion": [list(row) for row in self.confusion],
            "n_unparseable": self.n_unparseable,
            "class_f1": list(self.class_f1),
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "ScoreCard":
        c = obj["confusion"]
        return cls(obj["n"], obj["accuracy"], obj["macro_f1"],
                   ((c[0][0], c[0][1]), (c[1][0], c[1][1])), obj["n_unparseable"],
                   tuple(obj.get("class_f1", (0.0, 0.0))))


def _class_f1(tp: int, predicted: int, gold: int) -> float:
    if tp == 0:
        return 0.0
    precision = tp / predicted
    recall = tp / gold
    return 2 * precision * recall / (precision + recall)


def score(verdicts: Sequence[Verdict], gold: Sequence[ClaimRecord]) -> ScoreCard:
    if not verdicts:
        raise ValueError("no verdicts to score")
    gold_by_id = {r.claim_id: r.gold_answer for r in gold}
    seen: set[str] = set()
    confusion = [[0, 0], [0, 0]]  # [gold][pred] over (yes, no)
    gold_counts = [0, 0]
    correct = 0
    unparseable = 0
    for v in verdicts:
        if v.claim_id not in gold_by_id:
            raise ValueError(f"verdict for unknown claim {v.claim_id!r}")
        if v.claim_id in seen:
            raise ValueError(f"duplicate verdict for claim {v.claim_id!r}")
        seen.add(v.claim_id)
        g = CLASSES.index(gold_by_id[v.claim_id])
        gold_counts[g] += 1
        if v.answer not in CLASSES:
            unparseable += 1
            continue
        p = CLASSES.index(v.answer)
        confusion[g][p] += 1
        correct += g == p
    n = len(verdicts)
    f1s = [
        _class_f1(confusion[k][k], confusion[0][k] + confusion[1][k], gold_counts[k])
        for k in range(2)
    ]
    return ScoreCard(
        n=n,
        accuracy=correct / n,
        macro_f1=sum(f1s) / 2,
        confusion=((confusion[0][0], confusion[0][1]), (confusion[1][0], confusion[1][1])),
        n_unparseable=unparseable,
        class_f1=(f1s[0], f1s[1]),
    )


CardKey = tuple[str, str, str]  # (strategy, provider, mode)


def render_report(cards: Mapping[CardKey, ScoreCard], title: str = "Results") -> str:
    """Markdown table, one row per (strategy, provider, mode), sorted by key."""
    if not cards:
        raise ValueError("no score cards to report")
    lines = [
        f"# {title}",
        "",
        "| Strategy | Provider | Mode | Acc. | F1 | N | Unparseable |",
        "|---|---|---|---:|---:|---:|---:|",
    ]
    for key in sorted(cards):
        c = cards[key]
        strategy, provider, mode = key
        lines.append(f"| {strategy} | {provider} | {mode} | {100 * c.accuracy:.2f} | "
                     f"{100 * c.macro_f1:.2f} | {c.n} | {c.n_unparseable} |")
    if any(c.n_unparseable for c in cards.values()):
        lines += ["", f"Note: {FOOTNOTE}"]
    return "\n".join(lines) + "\n"


def report_records(cards: Mapping[CardKey, ScoreCard]) -> list[dict]:
    return [
        {"strategy": k[0], "provider": k[1], "mode": k[2], **cards[k].to_dict()}
        for k in sorted(cards)
    ]


def write_report(cards: Mapping[CardKey, ScoreCard], out: str | Path, title: str = "Results") -> Path:
    """Write the markdown report to ``out`` and its JSONL companion next to it."""
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(render_report(cards, title), encoding="utf-8")
    companion = out.with_suffix(".jsonl")
    with open(companion, "w", encoding="utf-8") as fh:
        for rec in report_records(cards):
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    return companion


def read_verdicts(path: str | Path) -> list[Verdict]:
    with open(path, encoding="utf-8") as fh:
        return [Verdict.from_dict(json.loads(line)) for line in fh if line.strip()]


def write_verdicts(verdicts: Iterable[Verdict], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for v in verdicts:
            fh.write(v.to_json() + "\n")
