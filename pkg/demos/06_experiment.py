"""Run a full experiment grid from a config and print the report.

The grid covers both splits, all four ranking modes and five strategies,
replayed offline. Rerunning into the same directory skips finished cells.
"""

import tempfile
from pathlib import Path

from _common import DATA
from confact.experiment import load_config, run_experiment

with tempfile.TemporaryDirectory() as tmp:
    cfg = load_config(DATA / "fixture_gt.yaml")
    cfg.output_dir = Path(tmp)
    result = run_experiment(cfg)
    print((cfg.output_dir / "report.md").read_text())
    again = run_experiment(cfg)
    print(f"second run skipped {len(again.skipped)} finished cells")
