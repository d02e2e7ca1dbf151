"""The curriculum loop: observe, encode, prompt, propose, parse, adopt, act."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

from craftbench.craftworld import execute_task, generate_world, goal_reached
from craftbench.craftworld.items import display_name
from craftbench.craftworld.recipes import RecipeTable
from craftbench.craftworld.state import WorldState
from craftbench.curriculum import (
    HistoryEntry,
    adopt,
    build_prompt,
    bundle_hash,
    milestone_check,
    parse_planner_output,
)
from craftbench.errors import (
    AdoptError,
    BackendError,
    ParseError,
    PlaybackError,
    TransportError,
)
from craftbench.harness.config import TrialConfig
from craftbench.perception import encode_elements, encode_free, observe_cheat, render_frame
from craftbench.planner.transcript import (
    IterationRecord,
    Transcript,
    TranscriptWriter,
    bundle_to_json,
    dual_from_json,
    dual_to_json,
    task_from_json,
    task_to_json,
)

_BACKEND_FAILURES = (TransportError, BackendError, PlaybackError)


@dataclass
class TrialRecord:
    config: TrialConfig
    iterations: list[IterationRecord] = field(default_factory=list)
    milestone_first_hit: dict[str, int | None] = field(default_factory=dict)
    reached_goal: bool = False
    aborted: bool = False

    @property
    def iterations_used(self) -> int:
        return len(self.iterations)

    def parsed_duals(self):
        return [dual_from_json(r.parsed) for r in self.iterations]

    @classmethod
    def from_transcript(cls, path: str | Path) -> "TrialRecord":
        transcript = Transcript.load(path)
        config = TrialConfig.from_json(transcript.header["config"])
        record = cls(config=config)
        achieved: dict[str, int] = {}
        for raw in transcript.iterations:
            body = {
                k: raw[k]
                for k in IterationRecord.__dataclass_fields__
                if k in raw
            }
            rec = IterationRecord(**body)
            record.iterations.append(rec)
            for m in rec.milestones:
                achieved.setdefault(m, rec.iteration)
            if rec.backend_error:
                record.aborted = True
            adopted = task_from_json(rec.adopted)
            if (
                adopted is not None
                and rec.outcome
                and rec.outcome.get("success")
                and config.goal_item in achieved
            ):
                record.reached_goal = True
        record.milestone_first_hit = {
            m: achieved.get(m) for m in config.milestones
        }
        record.reached_goal = config.goal_item in achieved
        return record


def _encode_vision(state: WorldState, config: TrialConfig, backend, goal_text: str):
    """Per-mode vision encoding; returns (vision payload, N/A flags)."""
    if config.vision_mode == "none":
        return None, {}
    frame = render_frame(state, config.window_size)
    if config.vision_mode == "direct":
        return frame, {}
    if config.vision_mode == "element_extraction":
        report = encode_elements(frame)
        return report, report.na_flags()
    try:
        text = encode_free(frame, goal_text, backend)
    except BackendError:
        # encoding failed: the iteration proceeds without vision
        return None, {"free_description": True}
    return text, {"free_description": text.strip() == "N/A"}


def run_trial(
    config: TrialConfig,
    backend,
    *,
    initial_state: WorldState | None = None,
    transcript_path: str | Path | None = None,
    recipes: RecipeTable | None = None,
    clock=time.time,
) -> TrialRecord:
    """Run one trial to the goal or the iteration cap.

    Loops observe -> encode -> prompt -> propose -> parse -> adopt ->
    execute, recording every iteration. Parse failures consume an iteration
    (after the configured retries); backend failures abort the trial with the
    partial record flagged.
    """
    config.validate()
    recipes = recipes or RecipeTable()
    state = initial_state if initial_state is not None else generate_world(
        config.seed, config.world
    )
    goal_text = f"craft a {display_name(config.goal_item)}"
    record = TrialRecord(config=config)
    history: list[HistoryEntry] = []
    achieved: dict[str, int] = {}

    writer = TranscriptWriter(transcript_path) if transcript_path else None
    if writer:
        writer.write_header(
            config.to_json(),
            {
                "name": backend.descriptor.name,
                "model": backend.descriptor.model,
                "deterministic": backend.descriptor.deterministic,
            },
        )

    try:
        for iteration in range(1, config.max_iterations + 1):
            started = clock()
            obs = observe_cheat(state)
            vision, vision_na = _encode_vision(state, config, backend, goal_text)
            bundle = build_prompt(
                obs,
                vision,
                tuple(history),
                goal_text,
                config.prompt_mode,
                goal_item=config.goal_item,
            )

            raw = None
            dual = None
            parse_error = None
            backend_error = None
            try:
                raw = backend.propose(bundle)
            except _BACKEND_FAILURES as exc:
                backend_error = f"{type(exc).__name__}: {exc}"
            if raw is not None:
                for attempt in range(config.parse_retries + 1):
                    try:
                        dual = parse_planner_output(raw, config.prompt_mode)
                        parse_error = None
                        break
                    except ParseError as exc:
                        parse_error = exc.code
                        if attempt < config.parse_retries:
                            try:
                                raw = backend.propose(bundle)
                            except _BACKEND_FAILURES as retry_exc:
                                backend_error = (
                                    f"{type(retry_exc).__name__}: {retry_exc}"
                                )
                                break

            adopted = None
            outcome = None
            if dual is not None:
                try:
                    adopted = adopt(dual, config.prompt_mode).task
                except AdoptError:
                    parse_error = "missing_response2"
            if adopted is not None:
                state, outcome = execute_task(
                    state, adopted, config.step_budget, recipes
                )
                history.append(
                    HistoryEntry(adopted, outcome.success, outcome.reason.value)
                )

            new_milestones = sorted(
                milestone_check(state, config.milestones, set(achieved))
            )
            for m in new_milestones:
                achieved[m] = iteration

            record.iterations.append(
                IterationRecord(
                    iteration=iteration,
                    prompt_hash=bundle_hash(bundle),
                    bundle=bundle_to_json(bundle),
                    raw_response=raw,
                    parsed=dual_to_json(dual),
                    parse_error=parse_error,
                    adopted=task_to_json(adopted),
                    outcome=(
                        None
                        if outcome is None
                        else {
                            "success": outcome.success,
                            "reason": outcome.reason.value,
                            "steps_used": outcome.steps_used,
                        }
                    ),
                    milestones=new_milestones,
                    vision_na=vision_na,
                    backend_error=backend_error,
                    timestamps={"started": started, "finished": clock()},
                )
            )
            if writer:
                writer.write_iteration(record.iterations[-1])

            if backend_error is not None:
                record.aborted = True
                break
            if goal_reached(state, config.goal_item):
                record.reached_goal = True
                break
    finally:
        if writer:
            writer.close()

    record.milestone_first_hit = {m: achieved.get(m) for m in config.milestones}
    return record
