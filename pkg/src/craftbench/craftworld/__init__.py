"""Seeded grid world: blocks, recipes, primitive actions, task executor."""

from craftbench.craftworld.executor import execute_task
from craftbench.craftworld.gen import WorldConfig, generate_world
from craftbench.craftworld.items import item_class
from craftbench.craftworld.primitives import (
    Craft,
    Mine,
    Move,
    Place,
    Smelt,
    Wait,
    apply_primitive,
)
from craftbench.craftworld.recipes import Recipe, RecipeTable
from craftbench.craftworld.state import (
    BlockKind,
    WorldState,
    can_craft,
    goal_reached,
    nearby_blocks,
)
from craftbench.craftworld.task import Task, TaskOutcome, Verb

__all__ = [
    "BlockKind",
    "Craft",
    "Mine",
    "Move",
    "Place",
    "Recipe",
    "RecipeTable",
    "Smelt",
    "Task",
    "TaskOutcome",
    "Verb",
    "Wait",
    "WorldConfig",
    "WorldState",
    "apply_primitive",
    "can_craft",
    "execute_task",
    "generate_world",
    "goal_reached",
    "item_class",
    "nearby_blocks",
]
