from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ideoscale.config import Settings  # noqa: E402
from ideoscale.gateway import Gateway, ResponseCache, SyntheticAnnotator  # noqa: E402
from ideoscale.gateway.synthetic import AnnotatorConfig  # noqa: E402
from ideoscale.model import validate_roster  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def make_roster(n: int, *, prefix: str = "Entity"):
    parties = ("Democrat", "Republican")
    return validate_roster([
        {"id": f"e{i:03d}", "display_name": f"{prefix} {i:03d}", "party": parties[i % 2]}
        for i in range(n)
    ])


def make_settings(tmp_path: Path, **changes) -> Settings:
    settings = Settings(provider="synthetic", cache_dir=str(tmp_path / "cache"), workers=1)
    for key, value in changes.items():
        setattr(settings, key, value)
    return settings.validate()


def synthetic_gateway(config: AnnotatorConfig, cache_dir: Path | None = None) -> Gateway:
    cache = ResponseCache(cache_dir) if cache_dir is not None else None
    return Gateway(SyntheticAnnotator(config), cache=cache)


@pytest.fixture
def small_roster():
    return make_roster(12)
