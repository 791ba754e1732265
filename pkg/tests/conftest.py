import sys
from pathlib import Path

import hypothesis
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

hypothesis.settings.register_profile(
    "suite", derandomize=True, deadline=None, max_examples=60
)
hypothesis.settings.load_profile("suite")

KB_DIR = Path(__file__).resolve().parents[1] / "kbs"


@pytest.fixture(scope="session")
def toddler_path() -> Path:
    return KB_DIR / "toddler.kb"


@pytest.fixture(scope="session")
def two_year_old_path() -> Path:
    return KB_DIR / "two_year_old.kb"


@pytest.fixture(scope="session")
def toddler_query_path() -> Path:
    return KB_DIR / "queries" / "toddler_is_adult.kb"


@pytest.fixture(scope="session")
def toddler_kb(toddler_path):
    from probel.kbformat import parse_kb

    result = parse_kb(toddler_path.read_text())
    assert not result.errors
    return result.kb


@pytest.fixture(scope="session")
def two_year_old_kb(two_year_old_path):
    from probel.kbformat import parse_kb

    result = parse_kb(two_year_old_path.read_text())
    assert not result.errors
    return result.kb
