"""Exception hierarchy.

The CLI maps the three top-level families onto exit codes: ``DataError`` -> 2,
``ProviderError`` -> 3. Everything else that escapes is a bug.
"""

from __future__ import annotations


class IdeoscaleError(Exception):
    pass


# -- data / validation -------------------------------------------------------


class DataError(IdeoscaleError):
    pass


class RosterError(DataError):
    """Raised by roster validation; ``failures`` holds every problem found."""

    def __init__(self, message: str, failures: list["RosterError"] | None = None):
        super().__init__(message)
        self.failures = failures if failures is not None else [self]


class DuplicateName(RosterError):
    pass


class EmptyName(RosterError):
    pass


class UnknownParty(RosterError):
    pass


class FileUnreadable(DataError):
    pass


class NoValidRecords(DataError):
    pass


class MissingPlatformText(DataError):
    pass


# -- providers ---------------------------------------------------------------


class ProviderError(IdeoscaleError):
    pass


class TransientError(ProviderError):
    """A retryable failure: rate limiting, 5xx, timeouts, dropped connections."""


class AuthError(ProviderError):
    pass


class TransientExhausted(ProviderError):
    pass


class ProviderMismatch(ProviderError):
    pass


class MissingSidecar(ProviderError):
    pass


class UnknownKind(ProviderError):
    pass


class GenerationRefused(ProviderError):
    pass


# -- parsing -----------------------------------------------------------------


class ParseError(IdeoscaleError):
    pass


class NoScoreMarker(ParseError):
    pass


class MalformedNumber(ParseError):
    pass


# -- aggregation / statistics ------------------------------------------------


class AggregateError(IdeoscaleError):
    pass


class TooFewScores(AggregateError):
    pass


class DegenerateRun(AggregateError):
    pass


class EmptyMatrix(AggregateError):
    pass


class AllRunsDropped(AggregateError):
    pass


class StatsError(IdeoscaleError):
    pass


class LengthMismatch(StatsError):
    pass


class DegenerateInput(StatsError):
    pass


class EmptySamples(StatsError):
    pass


class EmptyJoin(StatsError):
    pass


class NewtonDiverged(StatsError):
    pass


class SingularKernel(StatsError):
    pass
