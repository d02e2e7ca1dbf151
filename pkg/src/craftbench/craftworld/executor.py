"""Maps canonical tasks onto primitive-action loops.

The executor owns motor control: pathfinding, exploration, walking to a
placed station. Task-level feasibility (is a station placed at all, are the
ingredients present) is prechecked before any primitive runs, so infeasible
craft/smelt tasks fail without touching the world. Failures come back as a
:class:`TaskOutcome` rather than an exception so the curriculum can record
failed tasks.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from craftbench.craftworld.items import class_count, item_class
from craftbench.craftworld.primitives import (
    Action,
    Craft,
    Mine,
    Move,
    Place,
    apply_primitive,
)
from craftbench.craftworld.recipes import Recipe, RecipeTable, best_tier
from craftbench.craftworld.state import (
    BlockKind,
    KIND_CODES,
    Position,
    STATION_RADIUS,
    WALKABLE_KINDS,
    WorldState,
    stations_of_kind,
)
from craftbench.craftworld.task import OutcomeReason, Task, TaskOutcome, Verb

_NEIGHBOR_ORDER = (("north", (0, -1)), ("east", (1, 0)), ("south", (0, 1)), ("west", (-1, 0)))
_CHEBYSHEV_RING = ((0, -1), (1, 0), (0, 1), (-1, 0), (1, -1), (1, 1), (-1, 1), (-1, -1))


class _Exhausted(Exception):
    pass


@dataclass
class _Run:
    state: WorldState
    recipes: RecipeTable
    budget: int
    steps: int = 0
    errors: list[str] = field(default_factory=list)

    def apply(self, action: Action):
        if self.steps >= self.budget:
            raise _Exhausted()
        self.steps += 1
        self.state, result = apply_primitive(self.state, action, self.recipes)
        if not result.ok:
            self.errors.append(result.error or "")
        return result

    def done(self, reason: OutcomeReason) -> tuple[WorldState, TaskOutcome]:
        return self.state, TaskOutcome(
            reason is OutcomeReason.COMPLETED, reason, self.steps
        )


def _passable(state: WorldState, recipes: RecipeTable, pos: Position) -> bool:
    """Routable: walkable directly, or solid but mineable at the current tier.

    Placed stations are never routed through; demolishing them to save a few
    steps would be absurd motor control.
    """
    kind = state.kind_at(pos)
    if kind in WALKABLE_KINDS:
        return True
    if pos in state.placed_stations:
        return False
    rule = recipes.mining_rule(kind.value)
    return rule is not None and rule[1] <= best_tier(state.inventory)


def _bfs_path(
    state: WorldState, recipes: RecipeTable, goals: set[Position]
) -> list[Position] | None:
    """Shortest 4-connected route from the player to any goal cell.

    Non-destructive routes are preferred: a walkable-only search runs first
    and mining-through is only considered when open ground cannot reach any
    goal. Deterministic: fixed neighbor order, FIFO expansion. Returns the
    cells to traverse (excluding the start), or None when unreachable.
    """

    def search(allow_mining: bool) -> list[Position] | None:
        start = state.player.pos
        if start in goals:
            return []
        parent: dict[Position, Position] = {start: start}
        queue = deque([start])
        while queue:
            cur = queue.popleft()
            for _, (dx, dy) in _NEIGHBOR_ORDER:
                nxt = (cur[0] + dx, cur[1] + dy)
                if nxt in parent or not state.in_bounds(nxt):
                    continue
                ok = (
                    _passable(state, recipes, nxt)
                    if allow_mining
                    else state.is_walkable(nxt)
                )
                if not ok:
                    continue
                parent[nxt] = cur
                if nxt in goals:
                    path = [nxt]
                    while parent[path[-1]] != path[-1]:
                        path.append(parent[path[-1]])
                    path.reverse()
                    return path[1:]
                queue.append(nxt)
        return None

    return search(allow_mining=False) or search(allow_mining=True)


def _walk(run: _Run, path: list[Position]) -> bool:
    """Follow a route, mining solid cells as they come up."""
    for cell in path:
        px, py = run.state.player.pos
        if run.state.is_solid(cell):
            result = run.apply(Mine(cell))
            if not result.ok:
                return False
        direction = None
        for name, (dx, dy) in _NEIGHBOR_ORDER:
            if (px + dx, py + dy) == cell:
                direction = name
                break
        if direction is None:
            return False
        if not run.apply(Move(direction)).ok:
            return False
    return True


def _cells_of_kinds(state: WorldState, kinds: tuple[str, ...]) -> list[Position]:
    out: list[Position] = []
    for name in kinds:
        ys, xs = np.nonzero(state.grid == KIND_CODES[BlockKind(name)])
        out.extend((int(x), int(y)) for x, y in zip(xs, ys))
    return sorted(out, key=lambda p: (p[1], p[0]))


def _adjacent_goals(
    state: WorldState, recipes: RecipeTable, cells: list[Position]
) -> set[Position]:
    goals = set()
    for cx, cy in cells:
        for dx, dy in _CHEBYSHEV_RING:
            pos = (cx + dx, cy + dy)
            if state.in_bounds(pos) and _passable(state, recipes, pos):
                goals.add(pos)
    return goals


def execute_task(
    state: WorldState,
    task: Task,
    step_budget: int,
    recipes: RecipeTable | None = None,
) -> tuple[WorldState, TaskOutcome]:
    """Run ``task`` for at most ``step_budget`` primitives.

    Precheck failures (missing ingredients, no station placed anywhere,
    insufficient tool tier) return the input state untouched.
    """
    if step_budget < 1:
        raise ValueError("step_budget must be >= 1")
    recipes = recipes or RecipeTable()
    run = _Run(state=state, recipes=recipes, budget=step_budget)
    try:
        if task.verb in (Verb.OBTAIN, Verb.MINE):
            return _acquire(run, task)
        if task.verb is Verb.CRAFT:
            return _recipe_task(run, recipes.producing(task.item), task.count)
        if task.verb is Verb.SMELT:
            recipe = recipes.smelting_from(task.item) or recipes.producing(task.item)
            if recipe is not None and recipe.station != "furnace":
                recipe = None
            return _recipe_task(run, recipe, task.count)
        if task.verb is Verb.PLACE:
            return _place_task(run, task)
        if task.verb is Verb.EXPLORE:
            return _explore(run, task)
    except _Exhausted:
        return run.done(OutcomeReason.STEP_BUDGET_EXHAUSTED)
    return run.done(OutcomeReason.TARGET_NOT_FOUND)


def _acquire(run: _Run, task: Task) -> tuple[WorldState, TaskOutcome]:
    """obtain/mine: explore-until-found and mine, with craft/smelt fallback."""
    recipes = run.recipes
    if task.item == "rotten_flesh":
        return _collect_drops(run, task)
    blocks = recipes.blocks_yielding(task.item)
    if not blocks:
        # not a mineable class: fall back to whatever rule produces it
        return _recipe_task(run, recipes.producing(task.item), task.count)
    tier_needed = min(recipes.mining_rule(b)[1] for b in blocks)
    if best_tier(run.state.inventory) < tier_needed:
        return run.done(OutcomeReason.TOOL_TIER_TOO_LOW)
    target_class = item_class(recipes.mining_rule(blocks[0])[0])
    start_count = class_count(run.state.inventory, target_class)
    while class_count(run.state.inventory, target_class) - start_count < task.count:
        cells = _cells_of_kinds(run.state, blocks)
        if not cells:
            return run.done(OutcomeReason.TARGET_NOT_FOUND)
        goals = _adjacent_goals(run.state, recipes, cells)
        path = _bfs_path(run.state, recipes, goals)
        if path is None:
            return run.done(OutcomeReason.TARGET_NOT_FOUND)
        if not _walk(run, path):
            return run.done(OutcomeReason.TARGET_NOT_FOUND)
        px, py = run.state.player.pos
        mined_one = False
        for dx, dy in _CHEBYSHEV_RING:
            pos = (px + dx, py + dy)
            if run.state.in_bounds(pos) and run.state.kind_at(pos).value in blocks:
                if run.apply(Mine(pos)).ok:
                    mined_one = True
                break
        if not mined_one:
            # landed next to nothing mineable (should not happen); burn a step
            run.apply(Move("north"))
    return run.done(OutcomeReason.COMPLETED)


def _collect_drops(run: _Run, task: Task) -> tuple[WorldState, TaskOutcome]:
    start = run.state.inventory.get("rotten_flesh", 0)
    while run.state.inventory.get("rotten_flesh", 0) - start < task.count:
        zombies = [e.pos for e in run.state.entities if e.kind == "zombie"]
        if not zombies:
            return run.done(OutcomeReason.TARGET_NOT_FOUND)
        path = _bfs_path(run.state, run.recipes, set(zombies))
        if path is None or not _walk(run, path):
            return run.done(OutcomeReason.TARGET_NOT_FOUND)
    return run.done(OutcomeReason.COMPLETED)


def _recipe_task(
    run: _Run, recipe: Recipe | None, count: int
) -> tuple[WorldState, TaskOutcome]:
    """Station-gated craft/smelt of ``count`` output units."""
    recipes = run.recipes
    if recipe is None:
        return run.done(OutcomeReason.TARGET_NOT_FOUND)
    applications = math.ceil(count / recipe.batch_size)

    # precheck before any movement: station existence first (matches the
    # conventional-planner failure mode), then ingredients and fuel
    if recipe.station is not None:
        if not stations_of_kind(run.state, BlockKind(recipe.station)):
            return run.done(OutcomeReason.NO_STATION_PLACED)
    for name, per_app in recipe.inputs:
        if class_count(run.state.inventory, name) < per_app * applications:
            return run.done(OutcomeReason.MISSING_INGREDIENTS)
    if recipe.fuel_cost:
        if recipes.fuel_count(run.state.inventory) < recipe.fuel_cost * applications:
            return run.done(OutcomeReason.MISSING_INGREDIENTS)

    if recipe.station is not None:
        if not _goto_station(run, BlockKind(recipe.station)):
            return run.done(OutcomeReason.TARGET_NOT_FOUND)
    for _ in range(applications):
        result = run.apply(Craft(recipe.id))
        if not result.ok:
            reason = {
                "no_station_placed": OutcomeReason.NO_STATION_PLACED,
                "missing_ingredients": OutcomeReason.MISSING_INGREDIENTS,
            }.get(result.error or "", OutcomeReason.TARGET_NOT_FOUND)
            return run.done(reason)
    return run.done(OutcomeReason.COMPLETED)


def _goto_station(run: _Run, kind: BlockKind) -> bool:
    """Walk until some placed station of ``kind`` is within use range."""
    positions = stations_of_kind(run.state, kind)
    px, py = run.state.player.pos
    if any(
        max(abs(x - px), abs(y - py)) <= STATION_RADIUS for x, y in positions
    ):
        return True
    goals = set()
    for sx, sy in positions:
        for dx in range(-STATION_RADIUS, STATION_RADIUS + 1):
            for dy in range(-STATION_RADIUS, STATION_RADIUS + 1):
                pos = (sx + dx, sy + dy)
                if run.state.in_bounds(pos) and _passable(run.state, run.recipes, pos):
                    goals.add(pos)
    path = _bfs_path(run.state, run.recipes, goals)
    if path is None:
        return False
    return _walk(run, path)


def _place_task(run: _Run, task: Task) -> tuple[WorldState, TaskOutcome]:
    try:
        kind = BlockKind(task.item)
    except ValueError:
        return run.done(OutcomeReason.TARGET_NOT_FOUND)
    if kind not in (BlockKind.CRAFTING_TABLE, BlockKind.FURNACE):
        return run.done(OutcomeReason.TARGET_NOT_FOUND)
    already = len(stations_of_kind(run.state, kind))
    if already >= task.count:
        return run.done(OutcomeReason.COMPLETED)
    needed = task.count - already
    if run.state.inventory.get(task.item, 0) < needed:
        return run.done(OutcomeReason.MISSING_INGREDIENTS)
    for _ in range(needed):
        result = run.apply(Place(task.item))
        if result.ok:
            continue
        if result.error != "no_space":
            return run.done(OutcomeReason.TARGET_NOT_FOUND)
        # crowded: walk to the nearest cell with a free adjacent ground spot
        goals = _free_place_spots(run)
        path = _bfs_path(run.state, run.recipes, goals)
        if path is None or not _walk(run, path):
            return run.done(OutcomeReason.TARGET_NOT_FOUND)
        if not run.apply(Place(task.item)).ok:
            return run.done(OutcomeReason.TARGET_NOT_FOUND)
    return run.done(OutcomeReason.COMPLETED)


def _free_place_spots(run: _Run) -> set[Position]:
    state = run.state
    goals = set()
    for y in range(state.height):
        for x in range(state.width):
            if not _passable(state, run.recipes, (x, y)):
                continue
            for dx, dy in _CHEBYSHEV_RING:
                spot = (x + dx, y + dy)
                if (
                    state.is_walkable(spot)
                    and state.entity_at(spot) is None
                    and spot != (x, y)
                ):
                    goals.add((x, y))
                    break
    return goals


def _explore(run: _Run, task: Task) -> tuple[WorldState, TaskOutcome]:
    """Seeded wander; derives its RNG from (world seed, tick) so identical
    states explore identically."""
    rng = np.random.default_rng((run.state.rng_seed, run.state.tick))
    steps = min(25 * task.count, run.budget - run.steps)
    for _ in range(steps):
        options = [
            name
            for name, (dx, dy) in _NEIGHBOR_ORDER
            if run.state.is_walkable(
                (run.state.player.pos[0] + dx, run.state.player.pos[1] + dy)
            )
        ]
        if not options:
            break
        run.apply(Move(options[int(rng.integers(len(options)))]))
    return run.done(OutcomeReason.COMPLETED)
