"""Trial transcript format: JSONL, one header record then one per iteration.

Wall-clock timestamps live in their own field and never enter any hash, so
replays of the same run compare byte-identical after stripping them.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from craftbench.craftworld.task import Task, Verb
from craftbench.curriculum import (
    DualProposal,
    PlanStep,
    PredictionPlan,
    PromptBundle,
    TaskProposal,
    bundle_hash,
)
from craftbench.errors import PlaybackError

SCHEMA_VERSION = 1


def task_to_json(task: Task | None) -> dict | None:
    if task is None:
        return None
    return {"verb": task.verb.value, "item": task.item, "count": task.count}


def task_from_json(body: dict | None) -> Task | None:
    if body is None:
        return None
    return Task(Verb(body["verb"]), body["item"], body["count"])


def dual_to_json(dual: DualProposal | None) -> dict | None:
    if dual is None:
        return None
    body: dict = {
        "response1": {
            "reasoning": dual.response1.reasoning,
            "task": task_to_json(dual.response1.task),
        },
        "response2": None,
    }
    if dual.response2 is not None:
        proposal, plan = dual.response2
        body["response2"] = {
            "reasoning": proposal.reasoning,
            "task": task_to_json(proposal.task),
            "steps": [
                {
                    "task": task_to_json(s.task),
                    "predicted_state": s.predicted_state,
                    "risks": s.risks,
                }
                for s in plan.steps
            ],
        }
    return body


def dual_from_json(body: dict | None) -> DualProposal | None:
    if body is None:
        return None
    r1 = TaskProposal(
        reasoning=body["response1"]["reasoning"],
        task=task_from_json(body["response1"]["task"]),
    )
    r2 = None
    if body.get("response2") is not None:
        raw = body["response2"]
        plan = PredictionPlan(
            steps=tuple(
                PlanStep(
                    task=task_from_json(s["task"]),
                    predicted_state=s["predicted_state"],
                    risks=s["risks"],
                )
                for s in raw["steps"]
            )
        )
        r2 = (TaskProposal(reasoning=raw["reasoning"], task=task_from_json(raw["task"])), plan)
    return DualProposal(response1=r1, response2=r2)


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    prompt_hash: str
    bundle: dict  # system_text/user_text/mode/attachment serialization
    raw_response: str | None
    parsed: dict | None  # dual_to_json output
    parse_error: str | None
    adopted: dict | None  # task_to_json output
    outcome: dict | None  # success/reason/steps_used
    milestones: list[str]
    vision_na: dict  # field -> bool, empty when no encoded vision
    backend_error: str | None = None
    timestamps: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        body = {"record": "iteration", "schema_version": SCHEMA_VERSION}
        body.update(asdict(self))
        return body


def bundle_to_json(bundle: PromptBundle) -> dict:
    return {
        "system_text": bundle.system_text,
        "user_text": bundle.user_text,
        "mode": bundle.mode,
        "attachment": bundle.attachment.serialize() if bundle.attachment else None,
    }


def header_record(config_json: dict, descriptor_json: dict) -> dict:
    return {
        "record": "header",
        "schema_version": SCHEMA_VERSION,
        "config": config_json,
        "backend": descriptor_json,
    }


class TranscriptWriter:
    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = self.path.open("w", encoding="utf-8")

    def write_header(self, config_json: dict, descriptor_json: dict) -> None:
        self._write(header_record(config_json, descriptor_json))

    def write_iteration(self, record: IterationRecord) -> None:
        self._write(record.to_json())

    def _write(self, body: dict) -> None:
        self._fh.write(json.dumps(body, sort_keys=True) + "\n")
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


@dataclass(frozen=True)
class Transcript:
    header: dict
    iterations: tuple[dict, ...]

    @classmethod
    def load(cls, path: str | Path) -> "Transcript":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        if not lines:
            raise PlaybackError("corrupt", f"empty transcript: {path}")
        records = [json.loads(line) for line in lines if line.strip()]
        if records[0].get("record") != "header":
            raise PlaybackError("corrupt", "first record is not a header")
        return cls(
            header=records[0],
            iterations=tuple(r for r in records[1:] if r.get("record") == "iteration"),
        )


def strip_timestamps(path: str | Path) -> str:
    """Canonical transcript text with wall-clock fields removed."""
    out_lines = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        record = json.loads(line)
        record.pop("timestamps", None)
        out_lines.append(json.dumps(record, sort_keys=True))
    return "\n".join(out_lines) + "\n"


__all__ = [
    "IterationRecord",
    "SCHEMA_VERSION",
    "Transcript",
    "TranscriptWriter",
    "bundle_hash",
    "bundle_to_json",
    "dual_from_json",
    "dual_to_json",
    "header_record",
    "strip_timestamps",
    "task_from_json",
    "task_to_json",
]
