import sys
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parents[1]
FIXTURE_DIR = REPO_ROOT / "fixtures"


@pytest.fixture(scope="session")
def dataset_dir() -> Path:
    d = FIXTURE_DIR / "dataset"
    if not d.exists() or not any(d.glob("*.gd")):
        pytest.skip("fixture dataset not present")
    return d
