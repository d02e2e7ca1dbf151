"""Transcript playback backend: regression replay of recorded runs."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from craftbench.curriculum import PromptBundle, bundle_hash
from craftbench.errors import PlaybackError
from craftbench.planner.base import BackendDescriptor
from craftbench.planner.transcript import Transcript


@dataclass(frozen=True)
class HashMismatch:
    iteration: int
    recorded: str
    computed: str


class PlaybackBackend:
    """Replays recorded responses in order, verifying prompt hashes.

    Strict mode raises on the first hash mismatch; lenient mode records the
    divergence and keeps returning the recorded responses.
    """

    def __init__(self, transcript: Transcript | str | Path, strict: bool = True):
        if not isinstance(transcript, Transcript):
            transcript = Transcript.load(transcript)
        self.transcript = transcript
        self.strict = strict
        self.cursor = 0
        self.mismatches: list[HashMismatch] = []
        self.descriptor = BackendDescriptor(
            name="playback",
            model=str(transcript.header.get("backend", {}).get("model", "recorded")),
            deterministic=True,
            multimodal=True,  # returns whatever was recorded, frames included
        )

    def propose(self, bundle: PromptBundle) -> str:
        if self.cursor >= len(self.transcript.iterations):
            raise PlaybackError(
                "exhausted",
                f"transcript has {len(self.transcript.iterations)} iterations; "
                f"iteration {self.cursor + 1} requested",
            )
        record = self.transcript.iterations[self.cursor]
        computed = bundle_hash(bundle)
        if record["prompt_hash"] != computed:
            mismatch = HashMismatch(
                iteration=self.cursor + 1,
                recorded=record["prompt_hash"],
                computed=computed,
            )
            self.mismatches.append(mismatch)
            if self.strict:
                raise PlaybackError(
                    "hash_mismatch",
                    f"prompt hash mismatch at iteration {mismatch.iteration}",
                )
        self.cursor += 1
        raw = record.get("raw_response")
        if raw is None:
            raise PlaybackError(
                "corrupt", f"iteration {self.cursor} recorded no response"
            )
        return raw
