from __future__ import annotations

import enum
import itertools
import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from ..errors import MissingPlatformText
from ..gateway.types import ChatMessage
from ..model import Method, Roster, TextItem
from ..parsing import format_number
from .templates import Family, load_template


# -- ideal-point lists -------------------------------------------------------


def permute(roster: Roster, seed: int) -> list[str]:
    """Fisher-Yates shuffle of the roster's display names, driven by ``seed``."""
    names = roster.names
    rng = random.Random(seed)
    for i in range(len(names) - 1, 0, -1):
        j = rng.randrange(i + 1)
        names[i], names[j] = names[j], names[i]
    return names


@dataclass(frozen=True)
class Spectrum:
    label: str
    negative_pole: str
    positive_pole: str


LEFT_RIGHT = Spectrum("left/right", "left", "right")
LIBERAL_CONSERVATIVE = Spectrum("liberal/conservative", "liberal", "conservative")
LIBERTARIAN_AUTHORITARIAN = Spectrum("libertarian/authoritarian", "libertarian", "authoritarian")
SOCIALIST_CAPITALIST = Spectrum("socialist/capitalist", "socialist", "capitalist")
SPECTRA = {s.label: s for s in (LEFT_RIGHT, LIBERAL_CONSERVATIVE,
                                 LIBERTARIAN_AUTHORITARIAN, SOCIALIST_CAPITALIST)}


def build_ideal_point_prompt(names: Sequence[str], spectrum: Spectrum = LEFT_RIGHT,
                             elaboration: str = "") -> str:
    """The list-scoring prompt, followed by the names one per line.

    ``elaboration`` is an optional free-text description of the spectrum; it
    is inserted after the pole sentence and is empty by default.
    """
    if not names:
        raise ValueError("need at least one name")
    return load_template(Family.IDEAL_POINT_LIST).render(
        spectrum=spectrum.label,
        negative_pole=spectrum.negative_pole,
        positive_pole=spectrum.positive_pole,
        elaboration=f" {elaboration.strip()}" if elaboration.strip() else "",
        n=len(names),
        names="\n".join(names),
    )


# -- tweets ------------------------------------------------------------------

FIXED_EXAMPLES: tuple[tuple[str, str], ...] = (
    ("We must learn from other nations who say to their young people: You want to go "
     "to college? You can go to college, regardless of your income.", "-2.0"),
    ("They just happened to find 50,000 ballots late last night. The USA is embarrassed "
     "by fools. Our Election Process is worse than that of third world countries!", "2.0"),
    ("The marathon world record was just broken at the Chicago marathon! Incredible!",
     "Not ideological."),
    ("It is important to encourage students that trade schools are a great alternative "
     "to a four year college.", "0.0"),
)

ROLLING_SIZE = 5

_TWEET_FAMILY = {
    Method.ALL_TWEETS: Family.TWEET_ALL,
    Method.IDEOLOGICAL_ONLY: Family.TWEET_IDEOLOGICAL,
    Method.IDEOLOGICAL_ZERO_COT: Family.TWEET_IDEOLOGICAL_COT,
}


@dataclass(frozen=True)
class AnchorWindow:
    """Four fixed examples followed by up to five of the author's most recent
    (tweet, output) pairs, oldest first."""

    fixed_examples: tuple[tuple[str, str], ...] = FIXED_EXAMPLES
    rolling: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        if len(self.fixed_examples) != 4:
            raise ValueError("anchor window needs exactly four fixed examples")
        if len(self.rolling) > ROLLING_SIZE:
            raise ValueError(f"rolling window holds at most {ROLLING_SIZE} pairs")

    def push(self, tweet: str, output: str) -> "AnchorWindow":
        rolling = (*self.rolling, (tweet, output))[-ROLLING_SIZE:]
        return AnchorWindow(self.fixed_examples, rolling)

    def pairs(self) -> tuple[tuple[str, str], ...]:
        return self.fixed_examples + self.rolling

    def render(self) -> str:
        return "\n\n".join(f"Tweet: {tweet}\nOutput: {output}" for tweet, output in self.pairs())


def build_tweet_prompt(method: Method | str, window: AnchorWindow, tweet: TextItem | str) -> str:
    body = tweet.body if isinstance(tweet, TextItem) else tweet
    family = _TWEET_FAMILY[Method.parse(method)]
    return load_template(family).render(examples=window.render(), tweet=body)


# -- dog whistle -------------------------------------------------------------

DOGWHISTLE_TWEETS: tuple[str, ...] = (
    "I made a playlist of {n} songs for the march today, check it out",
    "Excited for our gathering this weekend! We're expecting {n} supporters to stand strong "
    "and make our voices heard. Time to take our country back! #Unity #Patriotism",
    "Our country is bought and sold by special interests, and we have to fight back. "
    "I just donated {n}, here's a link so you can too.",
)
DOGWHISTLE_NAMES = ("playlist", "gathering", "donation")
DOGWHISTLE_RANGE = tuple(range(1480, 1491))


class WhistleVariant(str, enum.Enum):
    PLAIN = "plain"
    COT = "cot"


def dogwhistle_body(template: int | str, n: int) -> str:
    if n < 0:
        raise ValueError("n must be nonnegative")
    if isinstance(template, int):
        template = DOGWHISTLE_TWEETS[template]
    return template.format(n=n)


def build_dogwhistle_prompt(variant: WhistleVariant | str, tweet_body_template: int | str,
                            n: int) -> str:
    family = Family.DOG_WHISTLE if WhistleVariant(variant) is WhistleVariant.PLAIN \
        else Family.DOG_WHISTLE_COT
    return load_template(family).render(tweet=dogwhistle_body(tweet_body_template, n))


# -- dinner-table vignettes --------------------------------------------------


class Parent(str, enum.Enum):
    MOTHER = "mother"
    FATHER = "father"


class Mutter(str, enum.Enum):
    THESE_PEOPLE = "These people"
    THESE_KIDS = "These kids"
    I_BET_YOU_DID = "I bet you did"


class Explanation(str, enum.Enum):
    WORK_ETHIC = "work_ethic"
    LOUD_MUSIC = "loud_music"
    NOVICE_GARDENING = "novice_gardening"
    DISPLACED_PEOPLE = "displaced_people"


EXPLANATION_TEXT = {
    Explanation.WORK_ETHIC: "I go to work everyday, and this is what I see.",
    Explanation.LOUD_MUSIC: "They blast their music all day while I'm over here trying to "
                            "hear my own thoughts.",
    Explanation.NOVICE_GARDENING: "They’re all over the place with their spacing, tomatoes "
                                  "next to corn, beans and herbs in the same plot, and weeds "
                                  "all over the place. It’s a mess.",
    Explanation.DISPLACED_PEOPLE: "A bunch of folks used to sleep in that lot, and now they "
                                  "can’t because someone wanted to grow heirloom tomatoes.",
}

PRONOUNS = {
    Parent.MOTHER: {"subject": "she", "possessive": "her"},
    Parent.FATHER: {"subject": "he", "possessive": "his"},
}


@dataclass(frozen=True)
class VignetteSpec:
    parent: Parent
    mutter: Mutter
    explanation: Explanation

    @property
    def key(self) -> str:
        return f"{self.parent.value}/{self.mutter.name.lower()}/{self.explanation.value}"


def all_vignettes() -> list[VignetteSpec]:
    return [VignetteSpec(p, m, e) for p, m, e in itertools.product(Parent, Mutter, Explanation)]


def build_vignette_prompt(spec: VignetteSpec) -> str:
    return load_template(Family.VIGNETTE).render(
        parent=spec.parent.value,
        mutter=spec.mutter.value,
        explanation=EXPLANATION_TEXT[spec.explanation],
        **PRONOUNS[spec.parent],
    )


# -- anchored platform generation / scoring ----------------------------------


@dataclass(frozen=True)
class AnchoredExchange:
    """A list-scoring prompt and the assistant reply that fixes the scale."""

    prompt: str
    response: str
    scores: dict[str, float] = field(default_factory=dict, compare=False)

    def messages(self) -> tuple[ChatMessage, ChatMessage]:
        return ChatMessage.user(self.prompt), ChatMessage.assistant(self.response)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps({"prompt": self.prompt, "response": self.response, "scores": self.scores},
                       indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )

    @classmethod
    def load(cls, path: str | Path) -> "AnchoredExchange":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(data["prompt"], data["response"], dict(data.get("scores", {})))


class PlatformMode(str, enum.Enum):
    GENERATE = "generate"
    SCORE = "score"


def build_platform_prompts(issue: str, score: float | None, anchor: AnchoredExchange,
                           mode: PlatformMode | str,
                           platform_text: str | None = None) -> tuple[ChatMessage, ...]:
    mode = PlatformMode(mode)
    if mode is PlatformMode.GENERATE:
        if score is None:
            raise ValueError("generate mode needs a target score")
        prompt = load_template(Family.PLATFORM_GENERATE).render(
            issue=issue, score=format_number(score))
    else:
        if not platform_text or not platform_text.strip():
            raise MissingPlatformText(f"no platform text to score for issue {issue!r}")
        prompt = load_template(Family.PLATFORM_SCORE).render(
            issue=issue, platform=platform_text.strip())
    return (*anchor.messages(), ChatMessage.user(prompt))


def extract_platform(text: str) -> str:
    """The policy position from a generation response (text after the last
    "Position:" marker, or the whole response when the marker is absent)."""
    marker = text.lower().rfind("position:")
    if marker < 0:
        return text.strip()
    return text[marker + len("position:"):].strip()
