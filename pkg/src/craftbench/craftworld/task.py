"""Canonical task and outcome types shared by the executor and the curriculum."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from craftbench.craftworld.items import is_known_item


class Verb(str, Enum):
    OBTAIN = "obtain"
    MINE = "mine"
    CRAFT = "craft"
    SMELT = "smelt"
    PLACE = "place"
    EXPLORE = "explore"


class OutcomeReason(str, Enum):
    COMPLETED = "completed"
    NO_STATION_PLACED = "no_station_placed"
    MISSING_INGREDIENTS = "missing_ingredients"
    TOOL_TIER_TOO_LOW = "tool_tier_too_low"
    TARGET_NOT_FOUND = "target_not_found"
    STEP_BUDGET_EXHAUSTED = "step_budget_exhausted"


@dataclass(frozen=True)
class Task:
    verb: Verb
    item: str
    count: int = 1

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ValueError(f"task count must be >= 1, got {self.count}")
        if not is_known_item(self.item):
            raise ValueError(f"unknown item: {self.item!r}")


@dataclass(frozen=True)
class TaskOutcome:
    success: bool
    reason: OutcomeReason
    steps_used: int = 0

    def __post_init__(self) -> None:
        if self.success != (self.reason is OutcomeReason.COMPLETED):
            raise ValueError("success exactly when reason is completed")
