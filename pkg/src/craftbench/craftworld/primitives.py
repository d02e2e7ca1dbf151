"""Primitive world actions and their pure transition function."""

from __future__ import annotations

from dataclasses import dataclass

from craftbench.craftworld.recipes import (
    RecipeTable,
    best_tier,
    resolve_species_output,
)
from craftbench.craftworld.state import (
    BlockKind,
    KIND_CODES,
    Player,
    Position,
    WorldState,
    auto_equipped,
    can_craft,
)

DIRECTIONS = {
    "north": (0, -1),
    "south": (0, 1),
    "west": (-1, 0),
    "east": (1, 0),
}

# fixed order in which placement spots around the player are tried
PLACE_OFFSETS = (
    (0, -1), (1, 0), (0, 1), (-1, 0), (1, -1), (1, 1), (-1, 1), (-1, -1),
)


@dataclass(frozen=True)
class Move:
    direction: str


@dataclass(frozen=True)
class Mine:
    target: Position


@dataclass(frozen=True)
class Craft:
    recipe_id: str


@dataclass(frozen=True)
class Smelt:
    item: str  # raw input item


@dataclass(frozen=True)
class Place:
    station: str  # "crafting_table" | "furnace"


@dataclass(frozen=True)
class Wait:
    pass


Action = Move | Mine | Craft | Smelt | Place | Wait


@dataclass(frozen=True)
class PrimitiveResult:
    ok: bool
    error: str | None = None
    detail: str = ""


def _with_item(inventory: dict[str, int], item: str, count: int) -> dict[str, int]:
    inv = dict(inventory)
    inv[item] = inv.get(item, 0) + count
    if inv[item] == 0:
        del inv[item]
    return inv


def _fail(state: WorldState, error: str, detail: str = ""):
    return state, PrimitiveResult(False, error, detail)


def _ok(state: WorldState, detail: str = ""):
    return state.evolve(tick=state.tick + 1), PrimitiveResult(True, detail=detail)


def apply_primitive(
    state: WorldState, action: Action, recipes: RecipeTable | None = None
) -> tuple[WorldState, PrimitiveResult]:
    """Apply one primitive. Failures return the input state unchanged;
    successes return a fresh state with the tick advanced."""
    recipes = recipes or RecipeTable()
    if isinstance(action, Move):
        return _move(state, action)
    if isinstance(action, Mine):
        return _mine(state, action, recipes)
    if isinstance(action, Craft):
        return _craft(state, action, recipes)
    if isinstance(action, Smelt):
        return _smelt(state, action, recipes)
    if isinstance(action, Place):
        return _place(state, action)
    if isinstance(action, Wait):
        return _ok(state)
    return _fail(state, "invalid_action", repr(action))


def _move(state: WorldState, action: Move):
    if action.direction not in DIRECTIONS:
        return _fail(state, "invalid_action", action.direction)
    dx, dy = DIRECTIONS[action.direction]
    px, py = state.player.pos
    target = (px + dx, py + dy)
    if not state.in_bounds(target):
        return _fail(state, "out_of_bounds")
    if not state.is_walkable(target):
        return _fail(state, "blocked", state.kind_at(target).value)
    inventory = state.inventory
    entities = state.entities
    entity = state.entity_at(target)
    if entity is not None and entity.kind == "zombie":
        # walking over a zombie despawns it and drops rotten flesh
        if state.slots_used() < state.capacity or "rotten_flesh" in inventory:
            inventory = _with_item(inventory, "rotten_flesh", 1)
            entities = tuple(e for e in entities if e is not entity)
    player = Player(
        pos=target, facing=action.direction, equipped=auto_equipped(inventory)
    )
    return _ok(
        state.evolve(player=player, inventory=inventory, entities=entities)
    )


def _mine(state: WorldState, action: Mine, recipes: RecipeTable):
    target = action.target
    if not state.in_bounds(target):
        return _fail(state, "out_of_bounds")
    px, py = state.player.pos
    if max(abs(target[0] - px), abs(target[1] - py)) != 1:
        return _fail(state, "not_adjacent")
    kind = state.kind_at(target)
    rule = recipes.mining_rule(kind.value)
    if rule is None:
        return _fail(state, "invalid_target", kind.value)
    yielded, required_tier = rule
    if best_tier(state.inventory) < required_tier:
        return _fail(state, "tool_tier_too_low", kind.value)
    if yielded not in state.inventory and state.slots_used() >= state.capacity:
        return _fail(state, "inventory_full")
    grid = state.grid.copy()
    grid[target[1], target[0]] = KIND_CODES[BlockKind.GROUND]
    inventory = _with_item(state.inventory, yielded, 1)
    stations = state.placed_stations
    if target in stations:
        stations = {p: k for p, k in stations.items() if p != target}
    player = Player(
        pos=state.player.pos,
        facing=state.player.facing,
        equipped=auto_equipped(inventory),
    )
    return _ok(
        state.evolve(
            grid=grid, inventory=inventory, placed_stations=stations, player=player
        ),
        detail=yielded,
    )


def _craft(state: WorldState, action: Craft, recipes: RecipeTable):
    recipe = recipes.by_id(action.recipe_id)
    feasible, missing = can_craft(state, action.recipe_id, recipes)
    if not feasible:
        stations = [m for m in missing if m.kind == "station"]
        if stations:
            return _fail(state, "no_station_placed", str(stations[0]))
        return _fail(
            state, "missing_ingredients", ", ".join(str(m) for m in missing)
        )
    inventory = dict(state.inventory)
    consumed: list[str] = []
    for name, count in recipe.inputs:
        consumed.extend(recipes.consume_input(inventory, name, count))
    if recipe.fuel_cost:
        recipes.consume_fuel(inventory, recipe.fuel_cost)
    for item, count in recipe.outputs:
        concrete = (
            resolve_species_output(item, consumed) if recipe.species_output else item
        )
        if concrete not in inventory and sum(
            1 for v in inventory.values() if v > 0
        ) >= state.capacity:
            return _fail(state, "inventory_full")
        inventory[concrete] = inventory.get(concrete, 0) + count
    player = Player(
        pos=state.player.pos,
        facing=state.player.facing,
        equipped=auto_equipped(inventory),
    )
    return _ok(
        state.evolve(inventory=inventory, player=player), detail=recipe.id
    )


def _smelt(state: WorldState, action: Smelt, recipes: RecipeTable):
    recipe = recipes.smelting_from(action.item)
    if recipe is None:
        return _fail(state, "invalid_target", action.item)
    return _craft(state, Craft(recipe.id), recipes)


def _place(state: WorldState, action: Place):
    try:
        kind = BlockKind(action.station)
    except ValueError:
        return _fail(state, "invalid_target", action.station)
    if kind not in (BlockKind.CRAFTING_TABLE, BlockKind.FURNACE):
        return _fail(state, "invalid_target", action.station)
    if state.inventory.get(action.station, 0) < 1:
        return _fail(state, "item_not_in_inventory", action.station)
    px, py = state.player.pos
    spot = None
    for dx, dy in PLACE_OFFSETS:
        candidate = (px + dx, py + dy)
        if state.is_walkable(candidate) and state.entity_at(candidate) is None:
            spot = candidate
            break
    if spot is None:
        return _fail(state, "no_space")
    grid = state.grid.copy()
    grid[spot[1], spot[0]] = KIND_CODES[kind]
    inventory = _with_item(state.inventory, action.station, -1)
    stations = dict(state.placed_stations)
    stations[spot] = kind
    player = Player(
        pos=state.player.pos,
        facing=state.player.facing,
        equipped=auto_equipped(inventory),
    )
    return _ok(
        state.evolve(
            grid=grid, inventory=inventory, placed_stations=stations, player=player
        ),
        detail=f"{action.station}@{spot}",
    )
