import json
import shutil

import pytest

from confact.cli import main
from confact.corpus import load_dataset


@pytest.fixture
def workdir(tmp_path, data_dir, monkeypatch):
    monkeypatch.chdir(tmp_path)
    for name in ("fixture_dataset.jsonl", "fixture_table.jsonl", "fixture_replay.jsonl",
                 "fixture_search.json", "fixture_gt.yaml"):
        shutil.copy(data_dir / name, tmp_path / name)
    return tmp_path


def test_validate(workdir, capsys):
    assert main(["validate", "fixture_dataset.jsonl", "--require-questions"]) == 0
    assert "ok: 10 records" in capsys.readouterr().out
    (workdir / "bad.jsonl").write_text('{"claim_id": "x"}\n')
    assert main(["validate", "bad.jsonl"]) == 1
    assert "gold_answer" in capsys.readouterr().err


def test_stats(workdir, capsys):
    assert main(["stats", "fixture_dataset.jsonl", "--split", "humc"]) == 0
    assert json.loads(capsys.readouterr().out) == {"split": "humc", "n_claims": 4, "n_yes": 1,
                                                   "n_no": 3, "n_sources": 12}


def test_chunk_then_rank(workdir):
    assert main(["chunk", "fixture_dataset.jsonl", "--out", "passages.jsonl"]) == 0
    rows = [json.loads(line) for line in open("passages.jsonl")]
    assert rows and all(r["word_count"] <= 256 for r in rows)
    assert main(["rank", "passages.jsonl", "--mode", "cw-hard", "--table", "fixture_table.jsonl",
                 "--top-k", "2", "--out", "ranked.jsonl"]) == 0
    ranked = [json.loads(line) for line in open("ranked.jsonl")]
    per_claim = {}
    for r in ranked:
        per_claim.setdefault(r["claim_id"], []).append(r["rank"])
    assert all(ranks == [1, 2] for ranks in per_claim.values())
    assert len(per_claim) == 10


def test_rank_needs_table(workdir, capsys):
    main(["chunk", "fixture_dataset.jsonl", "--out", "passages.jsonl"])
    assert main(["rank", "passages.jsonl", "--mode", "sf"]) == 2


def test_background(workdir, capsys):
    assert main(["background", "www.bbc.co.uk", "--table", "fixture_table.jsonl"]) == 0
    assert json.loads(capsys.readouterr().out)["level"] == "high"
    assert main(["background", "academic.oup.com", "--provider", "hybrid", "--table",
                 "fixture_table.jsonl", "--backend", "replay:fixture_replay.jsonl",
                 "--model", "fixture-standin", "--search", "fixture_search.json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["provenance"] == "generated" and "Failed Fact Checks" in out["description"]


def test_annotate_replay_and_conflicts(workdir, capsys):
    assert main(["annotate", "fixture_dataset.jsonl", "--backend", "replay:fixture_replay.jsonl",
                 "--model", "fixture-standin", "--out", "annotated.jsonl"]) == 0
    assert load_dataset("annotated.jsonl") == load_dataset("fixture_dataset.jsonl")
    assert main(["conflicts", "annotated.jsonl"]) == 0
    assert capsys.readouterr().out.split()


def test_run_eval_report(workdir, capsys):
    assert main(["run", "--config", "fixture_gt.yaml", "--out", "out"]) == 0
    cell = workdir / "out" / "humc" / "gt" / "cw-hard" / "sba-ens"
    assert (cell / "scorecard.json").exists()
    assert main(["eval", str(cell / "verdicts.jsonl"), "fixture_dataset.jsonl", "--provider", "gt",
                 "--mode", "cw-hard", "--out", "eval.md"]) == 0
    assert "| sba-ens | gt | cw-hard |" in (workdir / "eval.md").read_text()
    capsys.readouterr()
    assert main(["report", "out"]) == 0
    printed = capsys.readouterr().out
    assert "# Split: humc" in printed and "# Split: modc" in printed


def test_run_config_errors(workdir, capsys):
    assert main(["run", "fixture_dataset.jsonl"]) == 2
    assert main(["run", "fixture_dataset.jsonl", "--backend", "replay:x.jsonl"]) == 2
    assert main(["run", "fixture_dataset.jsonl", "--backend", "replay:fixture_replay.jsonl",
                 "--strategy", "sba-cot"]) == 2
    assert "config error" in capsys.readouterr().err


def test_run_unrecorded_request_is_cell_failure(workdir, capsys):
    code = main(["run", "fixture_dataset.jsonl", "--backend", "replay:fixture_replay.jsonl",
                 "--model", "other-model", "--out", "out"])
    assert code == 1
    assert "failed: modc/none/rel/dira" in capsys.readouterr().err


def test_report_without_cards(workdir):
    (workdir / "empty").mkdir()
    assert main(["report", "empty"]) == 1
