"""Exception taxonomy shared across the package."""

from __future__ import annotations


class CraftBenchError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(CraftBenchError):
    """Invalid world-gen, recipe, or trial configuration."""


class WorldGenError(CraftBenchError):
    """World generation could not satisfy its resource guarantees."""


class UnknownRecipeError(CraftBenchError):
    """Recipe id or produced item not present in the recipe table."""


class ParseError(CraftBenchError):
    """Planner output did not match the response grammar.

    ``code`` is one of: missing_task, unknown_verb, unknown_item,
    bad_count, missing_response1, missing_response2, empty_steps.
    """

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class AdoptError(CraftBenchError):
    """Adoption policy asked for a response the proposal does not carry."""


class StatsError(CraftBenchError):
    """Metric computed over an empty eligible set."""


class TransportError(CraftBenchError):
    """HTTP backend failure after retries.

    ``kind`` is one of: timeout, connection, status, malformed.
    """

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


class BackendError(CraftBenchError):
    """Backend cannot serve the given prompt bundle."""


class PlaybackError(CraftBenchError):
    """Transcript playback failed.

    ``kind`` is one of: exhausted, hash_mismatch, corrupt.
    """

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind
