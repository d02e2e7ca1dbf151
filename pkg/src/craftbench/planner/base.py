"""Uniform backend contract: raw response text from a prompt bundle."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, runtime_checkable

from craftbench.curriculum import PromptBundle


@dataclass(frozen=True)
class BackendDescriptor:
    name: str
    model: str
    deterministic: bool
    multimodal: bool = False


@runtime_checkable
class PlannerBackend(Protocol):
    descriptor: BackendDescriptor

    def propose(self, bundle: PromptBundle) -> str:
        """Produce raw planner text for the bundle; never mutates it."""
        ...
