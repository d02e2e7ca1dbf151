"""Transcript replay: re-run a recorded trial and diff the outcomes."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from craftbench.craftworld.recipes import RecipeTable
from craftbench.errors import PlaybackError
from craftbench.harness.config import TrialConfig
from craftbench.harness.trial import TrialRecord, run_trial
from craftbench.planner.playback import PlaybackBackend
from craftbench.planner.transcript import Transcript


@dataclass(frozen=True)
class Divergence:
    iteration: int
    what: str
    recorded: object
    replayed: object


@dataclass
class DivergenceReport:
    divergences: list[Divergence] = field(default_factory=list)
    prompt_mismatches: int = 0

    @property
    def clean(self) -> bool:
        return not self.divergences and self.prompt_mismatches == 0

    @property
    def first(self) -> Divergence | None:
        return self.divergences[0] if self.divergences else None


def replay(
    transcript_path: str | Path,
    *,
    strict: bool = False,
    recipes: RecipeTable | None = None,
) -> tuple[TrialRecord, DivergenceReport]:
    """Re-execute a recorded trial through the playback backend.

    Verifies the recorded adopted tasks, outcomes and milestone hits against
    the re-run; strict mode raises on the first prompt-hash mismatch.
    """
    transcript = Transcript.load(transcript_path)
    config = TrialConfig.from_json(transcript.header["config"])
    backend = PlaybackBackend(transcript, strict=strict)
    record = run_trial(config, backend, recipes=recipes)

    report = DivergenceReport(prompt_mismatches=len(backend.mismatches))
    recorded = transcript.iterations
    for index in range(max(len(recorded), len(record.iterations))):
        if index >= len(recorded):
            report.divergences.append(
                Divergence(index + 1, "extra_replayed_iteration", None, "present")
            )
            continue
        if index >= len(record.iterations):
            report.divergences.append(
                Divergence(index + 1, "missing_replayed_iteration", "present", None)
            )
            continue
        old, new = recorded[index], record.iterations[index]
        for what in ("adopted", "outcome", "milestones"):
            recorded_value = old.get(what)
            replayed_value = getattr(new, what)
            if recorded_value != replayed_value:
                report.divergences.append(
                    Divergence(index + 1, what, recorded_value, replayed_value)
                )
    return record, report


def replay_clean(transcript_path: str | Path) -> bool:
    try:
        _, report = replay(transcript_path, strict=True)
    except PlaybackError:
        return False
    return report.clean
