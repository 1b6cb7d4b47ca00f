from importlib import resources
from pathlib import Path

from confact.llm import ReplayBackend

DATA = Path(str(resources.files("confact.data")))
MODEL = "fixture-standin"


def replay() -> ReplayBackend:
    """Offline backend serving the bundled recorded responses."""
    return ReplayBackend(DATA / "fixture_replay.jsonl", model_name=MODEL)


def heading(text: str) -> None:
    print(f"\n== {text}")
