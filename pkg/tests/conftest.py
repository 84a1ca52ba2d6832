from __future__ import annotations

from pathlib import Path

import pytest

import corpus

REPO_ROOT = Path(__file__).resolve().parent.parent
DEMO_DIR = REPO_ROOT / "demo"


@pytest.fixture(scope="session")
def demo_records_path() -> Path:
    return DEMO_DIR / "refactorings.jsonl"


@pytest.fixture(scope="session")
def demo_ages_path() -> Path:
    return DEMO_DIR / "project_ages.json"


@pytest.fixture(scope="session")
def demo_commit_log_path() -> Path:
    return DEMO_DIR / "commit_log_mpandroidchart.tsv"


@pytest.fixture
def corpus_file(tmp_path) -> Path:
    """The demo corpus written into the test's own directory."""
    path = tmp_path / "refactorings.jsonl"
    path.write_text(corpus.to_jsonl(corpus.DEMO_CORPUS), encoding="utf-8")
    return path
