from pathlib import Path

import pytest

FIXTURES = Path(__file__).resolve().parent / "fixtures"


@pytest.fixture(scope="session")
def patches_path() -> Path:
    return FIXTURES / "patches_576x8.trimt"


@pytest.fixture(scope="session")
def text_path() -> Path:
    return FIXTURES / "text_8.trimt"
