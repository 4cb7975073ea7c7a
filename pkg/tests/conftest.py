import sys
from pathlib import Path

import pytest

REPO = Path(__file__).resolve().parent.parent
SCENARIOS = REPO / "scenarios"

sys.path.insert(0, str(Path(__file__).resolve().parent))


@pytest.fixture(scope="session")
def scenario_dir() -> Path:
    return SCENARIOS


@pytest.fixture(scope="session")
def fixture_paths() -> dict[str, Path]:
    return {
        "dual-path": SCENARIOS / "dual-path.json",
        "transatlantic-pubsub": SCENARIOS / "transatlantic-pubsub.json",
        "two-domains-weighted": SCENARIOS / "two-domains-weighted.json",
        "flooding-20": SCENARIOS / "flooding-20.json",
    }
