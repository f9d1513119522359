"""Versioned prompt text assets with a checksum manifest."""

from __future__ import annotations

import enum
import hashlib
import json
import string
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

MANIFEST_NAME = "MANIFEST.json"


class Family(str, enum.Enum):
    IDEAL_POINT_LIST = "ideal_point_list"
    TWEET_ALL = "tweet_all"
    TWEET_IDEOLOGICAL = "tweet_ideological"
    TWEET_IDEOLOGICAL_COT = "tweet_ideological_cot"
    # The binary gate reuses the ideological-tweet wording verbatim.
    BINARY_IDEOLOGICAL = "tweet_ideological"
    DOG_WHISTLE = "dogwhistle"
    DOG_WHISTLE_COT = "dogwhistle_cot"
    VIGNETTE = "vignette"
    PLATFORM_GENERATE = "platform_generate"
    PLATFORM_SCORE = "platform_score"


@dataclass(frozen=True)
class PromptTemplate:
    family: Family
    text: str

    @property
    def placeholders(self) -> set[str]:
        return {name for _, name, _, _ in string.Formatter().parse(self.text) if name}

    def render(self, **values: object) -> str:
        missing = self.placeholders - values.keys()
        if missing:
            raise KeyError(f"{self.family.value}: unbound placeholders {sorted(missing)}")
        return self.text.format_map(values)


def _asset_dir():
    return resources.files(__package__).joinpath("templates")


@lru_cache(maxsize=None)
def load_template(family: Family) -> PromptTemplate:
    text = _asset_dir().joinpath(f"{family.value}.txt").read_text(encoding="utf-8")
    return PromptTemplate(family, text.rstrip("\n"))


def template_checksums() -> dict[str, str]:
    out = {}
    for entry in sorted(_asset_dir().iterdir(), key=lambda p: p.name):
        if entry.name.endswith(".txt"):
            out[entry.name] = hashlib.sha256(entry.read_bytes()).hexdigest()
    return out


def pinned_checksums() -> dict[str, str]:
    return json.loads(_asset_dir().joinpath(MANIFEST_NAME).read_text(encoding="utf-8"))


def drifted_templates() -> list[str]:
    """Names of template files whose content no longer matches the manifest."""
    current, pinned = template_checksums(), pinned_checksums()
    names = sorted(current.keys() | pinned.keys())
    return [name for name in names if current.get(name) != pinned.get(name)]
