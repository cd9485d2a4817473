import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import pytest

FIXTURES = Path(__file__).parent / "fixtures"

_EXPECT = re.compile(r"^//\s*expect:\s*(\S+)(?:\s+(subject|context))?\s*$", re.M)
_RESULT = re.compile(r"^//\s*expect-result:\s*(.+?)\s*$", re.M)


@dataclass
class Fixture:
    path: Path
    text: str
    status: str
    party: Optional[str]
    result: Optional[str]

    @property
    def name(self) -> str:
        return self.path.stem


def load_fixture(path: Path) -> Fixture:
    text = path.read_text(encoding="utf-8")
    m = _EXPECT.search(text)
    if m is None:
        raise ValueError(f"{path.name} has no expect header")
    r = _RESULT.search(text)
    return Fixture(path, text, m.group(1), m.group(2), r.group(1) if r else None)


def all_fixtures():
    return [load_fixture(p) for p in sorted(FIXTURES.glob("*.ljc"))]


@pytest.fixture
def fixture_dir() -> Path:
    return FIXTURES
