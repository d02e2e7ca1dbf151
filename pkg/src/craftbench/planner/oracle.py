"""Deterministic stand-in for a live planner model.

Two policies over the same recipe graph:

* the materials-only policy chains backward from the goal, checking nothing
  but inventory contents (and stations it can currently see), so it happily
  proposes crafts and smelts whose station was never placed or whose fuel is
  missing;
* the plan-ahead policy forward-simulates the full step sequence to the
  goal — insertions of placement and fuel steps included — and proposes the
  first step, which is feasible in the state it runs from by construction.

The materials-only policy recovers from repeated failures the way a prompt
reader would: the failed-task list names the failure reason, and the next
proposal reacts to it (place the missing station, get fuel). Without that
channel a deterministic policy would re-propose the same impossible task
forever.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

from craftbench.craftworld.items import class_count, display_name, item_class
from craftbench.craftworld.recipes import Recipe, RecipeTable, TOOL_TIERS, best_tier
from craftbench.craftworld.task import Task, Verb
from craftbench.curriculum import (
    CONVENTIONAL,
    HistoryEntry,
    PromptBundle,
    render_task,
    task_match,
)
from craftbench.errors import BackendError, CraftBenchError
from craftbench.perception import Observation
from craftbench.planner.base import BackendDescriptor

_TOOL_FOR_TIER = {tier: tool for tool, tier in TOOL_TIERS.items()}


def _tool_for(tier: int) -> str:
    return _TOOL_FOR_TIER[tier]


# ---------------------------------------------------------------------------
# materials-only view
# ---------------------------------------------------------------------------

def _possesses_station(
    inventory: dict[str, int], nearby_kinds: set[str], station: str
) -> bool:
    """Inventory contents plus whatever stations are visible nearby."""
    return inventory.get(station, 0) > 0 or station in nearby_kinds


def next_material_task(
    inventory: dict[str, int],
    nearby_kinds: set[str],
    goal_item: str,
    recipes: RecipeTable,
) -> Task:
    """Deepest unmet prerequisite of the goal, materials view only.

    Depth-first over the recipe graph in table order; station placement and
    fuel are invisible. Always returns a task (the goal's own recipe when
    everything is met).
    """

    def visit(item: str, count: int) -> Task | None:
        have = class_count(inventory, item)
        if have >= count:
            return None
        deficit = count - have
        recipe = recipes.producing(item)
        if recipe is not None:
            applications = math.ceil(deficit / recipe.batch_size)
            for name, per_app in recipe.inputs:
                unmet = visit(name, per_app * applications)
                if unmet is not None:
                    return unmet
            if recipe.station is not None and not _possesses_station(
                inventory, nearby_kinds, recipe.station
            ):
                unmet = visit(recipe.station, 1)
                if unmet is not None:
                    return unmet
            if recipe.station == "furnace":
                raw = item_class(recipe.inputs[0][0])
                return Task(Verb.SMELT, raw, deficit)
            return Task(Verb.CRAFT, item_class(recipe.output_item), deficit)
        blocks = recipes.blocks_yielding(item)
        if blocks:
            tier_needed = min(recipes.mining_rule(b)[1] for b in blocks)
            if best_tier(inventory) < tier_needed:
                unmet = visit(_tool_for(tier_needed), 1)
                if unmet is not None:
                    return unmet
            if tier_needed == 0:
                return Task(Verb.OBTAIN, item_class(item), deficit)
            return Task(Verb.MINE, blocks[0], deficit)
        return Task(Verb.OBTAIN, item, deficit)

    return visit(goal_item, 1) or Task(Verb.CRAFT, goal_item, 1)


def _last_attempt_of(
    history: tuple[HistoryEntry, ...], task: Task
) -> HistoryEntry | None:
    """Most recent history entry matching the task's type, if any."""
    for entry in reversed(history):
        if task_match(entry.task, task):
            return entry
    return None


def _station_for(task: Task, recipes: RecipeTable) -> str | None:
    if task.verb is Verb.SMELT:
        return "furnace"
    if task.verb is Verb.CRAFT:
        recipe = recipes.producing(task.item)
        return recipe.station if recipe else None
    return None


def conventional_policy(
    obs: Observation,
    goal_item: str,
    recipes: RecipeTable,
    history: tuple[HistoryEntry, ...] = (),
) -> tuple[str, Task]:
    """(reasoning, task) under the materials-only view with failure recovery."""
    inventory = obs.inventory_dict()
    nearby_kinds = {kind.value for kind, _ in obs.nearby_blocks}
    task = next_material_task(inventory, nearby_kinds, goal_item, recipes)

    last = _last_attempt_of(history, task)
    if last is not None and not last.success:
        if last.reason == "no_station_placed":
            station = _station_for(task, recipes)
            if (
                station
                and station not in nearby_kinds
                and inventory.get(station, 0) > 0
            ):
                reasoning = (
                    f"The last attempt to {render_task(task).lower()} failed "
                    f"because no {display_name(station)} was placed; placing "
                    "it first."
                )
                return reasoning, Task(Verb.PLACE, station, 1)
        elif last.reason == "missing_ingredients" and task.verb is Verb.SMELT:
            fuel_short = task.count - recipes.fuel_count(inventory)
            if fuel_short > 0:
                logs_needed = math.ceil(fuel_short / 4)
                if class_count(inventory, "wood_log") >= logs_needed:
                    recovery = Task(Verb.CRAFT, "planks", 4 * logs_needed)
                else:
                    recovery = Task(Verb.OBTAIN, "wood_log", logs_needed)
                reasoning = (
                    f"The last attempt to {render_task(task).lower()} failed "
                    "for lack of ingredients; stocking fuel first."
                )
                return reasoning, recovery

    have = class_count(inventory, task.item)
    reasoning = (
        f"The goal is to craft a {display_name(goal_item)}. The first unmet "
        f"material along the chain is {display_name(task.item)} "
        f"(inventory holds {have}); acquiring it next."
    )
    return reasoning, task


def oracle_conventional(
    obs: Observation,
    goal_item: str,
    recipes: RecipeTable | None = None,
    history: tuple[HistoryEntry, ...] = (),
) -> str:
    """Materials-only proposal rendered in the response template."""
    recipes = recipes or RecipeTable()
    reasoning, task = conventional_policy(obs, goal_item, recipes, history)
    return f"Reasoning: {reasoning}\nTask: {render_task(task)}.\n"


# ---------------------------------------------------------------------------
# plan-ahead view
# ---------------------------------------------------------------------------

class PlanningError(CraftBenchError):
    pass


@dataclass(frozen=True)
class OraclePlanStep:
    task: Task
    predicted_state: str
    risks: str


@dataclass
class _Sim:
    """Abstract world for forward simulation: class-keyed inventory plus the
    set of station kinds known to be placed."""

    recipes: RecipeTable
    inv: Counter = field(default_factory=Counter)
    placed: set[str] = field(default_factory=set)
    steps: list[OraclePlanStep] = field(default_factory=list)

    def count(self, item: str) -> int:
        return self.inv[item_class(item)]

    def add(self, item: str, n: int) -> None:
        self.inv[item_class(item)] += n

    def take(self, item: str, n: int) -> None:
        key = item_class(item)
        if self.inv[key] < n:
            raise PlanningError(f"simulation short of {key}")
        self.inv[key] -= n

    def fuel(self) -> int:
        return self.inv["coal"] + self.inv["planks"]

    def take_fuel(self, n: int) -> None:
        burn_coal = min(self.inv["coal"], n)
        self.inv["coal"] -= burn_coal
        rest = n - burn_coal
        if self.inv["planks"] < rest:
            raise PlanningError("simulation short of fuel")
        self.inv["planks"] -= rest

    def tier(self) -> int:
        return max(
            (t for tool, t in TOOL_TIERS.items() if self.inv[tool] > 0), default=0
        )

    def emit(self, task: Task, predicted: str, risks: str) -> None:
        self.steps.append(OraclePlanStep(task, predicted, risks))


def _ensure_item(sim: _Sim, item: str, count: int) -> None:
    if sim.count(item) >= count:
        return
    deficit = count - sim.count(item)
    recipe = sim.recipes.producing(item)
    if recipe is not None:
        _ensure_recipe(sim, recipe, deficit)
        return
    blocks = sim.recipes.blocks_yielding(item)
    if not blocks:
        raise PlanningError(f"no way to produce {item}")
    tier_needed = min(sim.recipes.mining_rule(b)[1] for b in blocks)
    if sim.tier() < tier_needed:
        _ensure_item(sim, _tool_for(tier_needed), 1)
    yielded = sim.recipes.mining_rule(blocks[0])[0]
    if tier_needed == 0:
        task = Task(Verb.OBTAIN, item_class(item), deficit)
        risks = "the nearest deposit may take some walking to reach"
    else:
        task = Task(Verb.MINE, blocks[0], deficit)
        risks = f"requires at least a {display_name(_tool_for(tier_needed))}"
    sim.emit(
        task,
        f"inventory gains {deficit} {display_name(item_class(yielded))}",
        risks,
    )
    sim.add(yielded, deficit)


def _ensure_station(sim: _Sim, station: str) -> None:
    if station in sim.placed:
        return
    if sim.count(station) < 1:
        _ensure_item(sim, station, 1)
    sim.emit(
        Task(Verb.PLACE, station, 1),
        f"a {display_name(station)} stands next to the player",
        "needs a free adjacent cell",
    )
    sim.take(station, 1)
    sim.placed.add(station)


def _ensure_recipe(sim: _Sim, recipe: Recipe, deficit: int) -> None:
    applications = math.ceil(deficit / recipe.batch_size)
    fuel_needed = recipe.fuel_cost * applications
    for _ in range(16):
        satisfied = True
        for name, per_app in recipe.inputs:
            if sim.count(name) < per_app * applications:
                satisfied = False
                _ensure_item(sim, name, per_app * applications)
        if recipe.station is not None and recipe.station not in sim.placed:
            satisfied = False
            _ensure_station(sim, recipe.station)
        if fuel_needed and sim.fuel() < fuel_needed:
            satisfied = False
            _ensure_fuel(sim, fuel_needed)
        if satisfied:
            break
    else:
        raise PlanningError(f"prerequisites of {recipe.id} did not converge")

    produced = recipe.batch_size * applications
    if recipe.station == "furnace":
        raw = item_class(recipe.inputs[0][0])
        task = Task(Verb.SMELT, raw, deficit)
        risks = f"consumes {fuel_needed} fuel at the furnace"
    else:
        task = Task(Verb.CRAFT, item_class(recipe.output_item), deficit)
        risks = (
            f"needs the {display_name(recipe.station)} within reach"
            if recipe.station
            else "none significant"
        )
    sim.emit(
        task,
        f"inventory gains {produced} {display_name(recipe.output_item)}",
        risks,
    )
    for name, per_app in recipe.inputs:
        sim.take(name, per_app * applications)
    if fuel_needed:
        sim.take_fuel(fuel_needed)
    sim.add(recipe.output_item, produced)


def _ensure_fuel(sim: _Sim, units: int) -> None:
    """Plan fuel via the plank route; coal already held counts."""
    short = units - sim.fuel()
    if short <= 0:
        return
    batches = math.ceil(short / 4)
    _ensure_item(sim, "wood_log", batches)
    sim.emit(
        Task(Verb.CRAFT, "planks", 4 * batches),
        f"inventory gains {4 * batches} planks for fuel",
        "none significant",
    )
    sim.take("wood_log", batches)
    sim.add("planks", 4 * batches)


def plan_to_goal(
    obs: Observation,
    goal_item: str,
    recipes: RecipeTable,
    history: tuple[HistoryEntry, ...] = (),
) -> list[OraclePlanStep]:
    """Forward-simulated step list from the observed state to the goal.

    Station knowledge seeds from visible nearby blocks and from placements
    recorded as completed in the history; every step is feasible in the
    simulated state where it executes.
    """
    sim = _Sim(recipes=recipes)
    for name, n in obs.inventory_dict().items():
        sim.add(name, n)
    for kind, _ in obs.nearby_blocks:
        if kind.value in ("crafting_table", "furnace"):
            sim.placed.add(kind.value)
    for entry in history:
        if entry.success and entry.task.verb is Verb.PLACE:
            sim.placed.add(entry.task.item)
    _ensure_item(sim, goal_item, 1)
    if not sim.steps:
        # goal already held; propose crafting one more
        recipe = recipes.producing(goal_item)
        if recipe is None:
            raise PlanningError(f"{goal_item} has no producing recipe")
        _ensure_recipe(sim, recipe, 1)
    return sim.steps


def oracle_predictive(
    obs: Observation,
    goal_item: str,
    recipes: RecipeTable | None = None,
    history: tuple[HistoryEntry, ...] = (),
) -> str:
    """Dual response: materials-only Response1, plan-grounded Response2."""
    recipes = recipes or RecipeTable()
    conventional = oracle_conventional(obs, goal_item, recipes, history)
    steps = plan_to_goal(obs, goal_item, recipes, history)
    lines = ["Response1:", conventional.rstrip(), "", "Response2:", "Steps:"]
    for i, step in enumerate(steps, start=1):
        lines.append(
            f"{i}. Task: {render_task(step.task)}. "
            f"Predicted State: {step.predicted_state}. "
            f"Risks: {step.risks}."
        )
    first = steps[0]
    lines += [
        (
            f"Reasoning: The plan reaches the {display_name(goal_item)} in "
            f"{len(steps)} steps; the first step is feasible now."
        ),
        f"Task: {render_task(first.task)}.",
        "",
    ]
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# backend
# ---------------------------------------------------------------------------

class OracleBackend:
    """Drop-in planner backend running the two oracle policies."""

    def __init__(self, recipes: RecipeTable | None = None):
        self.descriptor = BackendDescriptor(
            name="oracle", model="recipe-chainer-v1", deterministic=True
        )
        self.recipes = recipes or RecipeTable()

    def propose(self, bundle: PromptBundle) -> str:
        ctx = bundle.context
        if ctx is None:
            raise BackendError("oracle backend requires the structured context")
        goal_item = getattr(ctx, "goal_item", None) or ctx.goal
        if bundle.mode == CONVENTIONAL:
            return oracle_conventional(
                ctx.observation, goal_item, self.recipes, ctx.history
            )
        return oracle_predictive(
            ctx.observation, goal_item, self.recipes, ctx.history
        )
