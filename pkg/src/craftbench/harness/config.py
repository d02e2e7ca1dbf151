"""Trial configuration and the six standard experiment arms."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from craftbench.craftworld.gen import WorldConfig, from_dict as world_from_dict
from craftbench.curriculum import CONVENTIONAL, DEFAULT_MILESTONES, PREDICTIVE
from craftbench.errors import ConfigError

VISION_MODES = ("direct", "free_description", "element_extraction", "none")
PROMPT_MODES = (CONVENTIONAL, PREDICTIVE)

#: arm id -> (vision_mode, prompt_mode); 1-x arms vary vision under the
#: conventional prompt, 2-x arms vary the prompt without vision
ARMS = {
    "1-1": ("direct", CONVENTIONAL),
    "1-2": ("free_description", CONVENTIONAL),
    "1-3": ("element_extraction", CONVENTIONAL),
    "1-4": ("none", CONVENTIONAL),
    "2-1": ("none", CONVENTIONAL),
    "2-2": ("none", PREDICTIVE),
}


@dataclass(frozen=True)
class TrialConfig:
    arm: str = "2-1"
    seed: int = 7
    vision_mode: str = "none"
    prompt_mode: str = CONVENTIONAL
    backend: str = "oracle"
    max_iterations: int = 70
    goal_item: str = "golden_pickaxe"
    step_budget: int = 600
    trials: int = 3
    parse_retries: int = 1
    window_size: int = 11
    milestones: tuple[str, ...] = DEFAULT_MILESTONES
    world: WorldConfig = field(default_factory=WorldConfig)

    def validate(self) -> None:
        if self.vision_mode not in VISION_MODES:
            raise ConfigError(f"unknown vision mode: {self.vision_mode!r}")
        if self.prompt_mode not in PROMPT_MODES:
            raise ConfigError(f"unknown prompt mode: {self.prompt_mode!r}")
        if self.max_iterations < 1:
            raise ConfigError("max_iterations must be >= 1")
        if self.step_budget < 1:
            raise ConfigError("step_budget must be >= 1")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        self.world.validate()

    def to_json(self) -> dict:
        world = {
            k: (
                {kind.value: v for kind, v in getattr(self.world, k).items()}
                if k == "min_blocks"
                else getattr(self.world, k)
            )
            for k in WorldConfig.__dataclass_fields__
        }
        return {
            "arm": self.arm,
            "seed": self.seed,
            "vision_mode": self.vision_mode,
            "prompt_mode": self.prompt_mode,
            "backend": self.backend,
            "max_iterations": self.max_iterations,
            "goal_item": self.goal_item,
            "step_budget": self.step_budget,
            "trials": self.trials,
            "parse_retries": self.parse_retries,
            "window_size": self.window_size,
            "milestones": list(self.milestones),
            "world": world,
        }

    @classmethod
    def from_json(cls, body: dict) -> "TrialConfig":
        body = dict(body)
        world = world_from_dict(body.pop("world", {}))
        milestones = tuple(body.pop("milestones", DEFAULT_MILESTONES))
        return cls(world=world, milestones=milestones, **body)


def for_arm(arm: str, **overrides) -> TrialConfig:
    if arm not in ARMS:
        raise ConfigError(f"unknown arm {arm!r}; expected one of {sorted(ARMS)}")
    vision_mode, prompt_mode = ARMS[arm]
    config = TrialConfig(
        arm=arm, vision_mode=vision_mode, prompt_mode=prompt_mode, **overrides
    )
    config.validate()
    return config


def apply_config_file(config: TrialConfig, path: str | Path) -> TrialConfig:
    """Overlay a JSON config file; file values override the given config."""
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    trial_keys = raw.get("trial", {})
    unknown = set(trial_keys) - set(TrialConfig.__dataclass_fields__)
    if unknown:
        raise ConfigError(f"unknown trial config keys: {sorted(unknown)}")
    if "milestones" in trial_keys:
        trial_keys = dict(trial_keys, milestones=tuple(trial_keys["milestones"]))
    config = replace(config, **trial_keys)
    if "world" in raw:
        config = replace(config, world=world_from_dict(raw["world"]))
    config.validate()
    return config
