"""World state value type and read-only queries over it."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from craftbench.craftworld.items import class_count
from craftbench.craftworld.recipes import RecipeTable, best_tool
from craftbench.errors import UnknownRecipeError

STATION_RADIUS = 3  # Chebyshev distance within which a placed station is usable
DAY_LENGTH = 600  # ticks per day or night phase


class BlockKind(str, Enum):
    GROUND = "ground"
    WATER = "water"
    STONE = "stone"
    IRON_ORE = "iron_ore"
    GOLD_ORE = "gold_ore"
    COAL_ORE = "coal_ore"
    OAK_LOG = "oak_log"
    SPRUCE_LOG = "spruce_log"
    CRAFTING_TABLE = "crafting_table"
    FURNACE = "furnace"
    AIR = "air"
    UNKNOWN = "unknown"


# stable grid encoding (order is part of the serialized format)
KIND_ORDER = [
    BlockKind.GROUND,
    BlockKind.WATER,
    BlockKind.STONE,
    BlockKind.IRON_ORE,
    BlockKind.GOLD_ORE,
    BlockKind.COAL_ORE,
    BlockKind.OAK_LOG,
    BlockKind.SPRUCE_LOG,
    BlockKind.CRAFTING_TABLE,
    BlockKind.FURNACE,
    BlockKind.AIR,
    BlockKind.UNKNOWN,
]
KIND_CODES = {kind: i for i, kind in enumerate(KIND_ORDER)}

#: Solid kinds: block line of sight and movement, and can be mined.
SOLID_KINDS = frozenset(
    {
        BlockKind.STONE,
        BlockKind.IRON_ORE,
        BlockKind.GOLD_ORE,
        BlockKind.COAL_ORE,
        BlockKind.OAK_LOG,
        BlockKind.SPRUCE_LOG,
        BlockKind.CRAFTING_TABLE,
        BlockKind.FURNACE,
    }
)

WALKABLE_KINDS = frozenset({BlockKind.GROUND})

BIOMES = ("forest", "plains", "mountains", "wetlands")

Position = tuple[int, int]


@dataclass(frozen=True)
class Entity:
    kind: str  # "zombie" | "sheep"
    pos: Position


@dataclass(frozen=True)
class Player:
    pos: Position
    facing: str = "north"
    equipped: str = "hand"


@dataclass(eq=False)
class WorldState:
    """Value-semantics snapshot of the whole world.

    Transitions never mutate; :func:`craftbench.craftworld.primitives.
    apply_primitive` returns fresh instances sharing unchanged containers.
    """

    grid: np.ndarray  # uint8 codes, shape (height, width), row-major
    entities: tuple[Entity, ...]
    player: Player
    inventory: dict[str, int]
    placed_stations: dict[Position, BlockKind]
    biome_map: dict[str, str]  # quadrant ("nw","ne","sw","se") -> biome
    rng_seed: int
    tick: int = 0
    capacity: int = 36

    @property
    def width(self) -> int:
        return self.grid.shape[1]

    @property
    def height(self) -> int:
        return self.grid.shape[0]

    @property
    def time_of_day(self) -> str:
        return "day" if (self.tick // DAY_LENGTH) % 2 == 0 else "night"

    def in_bounds(self, pos: Position) -> bool:
        x, y = pos
        return 0 <= x < self.width and 0 <= y < self.height

    def kind_at(self, pos: Position) -> BlockKind:
        x, y = pos
        return KIND_ORDER[int(self.grid[y, x])]

    def is_walkable(self, pos: Position) -> bool:
        return self.in_bounds(pos) and self.kind_at(pos) in WALKABLE_KINDS

    def is_solid(self, pos: Position) -> bool:
        return self.in_bounds(pos) and self.kind_at(pos) in SOLID_KINDS

    def biome_at(self, pos: Position) -> str:
        x, y = pos
        quadrant = ("n" if y < self.height // 2 else "s") + (
            "w" if x < self.width // 2 else "e"
        )
        return self.biome_map[quadrant]

    def entity_at(self, pos: Position) -> Entity | None:
        for e in self.entities:
            if e.pos == pos:
                return e
        return None

    def slots_used(self) -> int:
        return sum(1 for v in self.inventory.values() if v > 0)

    def evolve(self, **changes) -> "WorldState":
        return replace(self, **changes)

    # -- equality / fingerprint ------------------------------------------

    def _key(self):
        return (
            self.grid.tobytes(),
            self.entities,
            self.player,
            tuple(sorted(self.inventory.items())),
            tuple(sorted(self.placed_stations.items())),
            tuple(sorted(self.biome_map.items())),
            self.rng_seed,
            self.tick,
            self.capacity,
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, WorldState) and self._key() == other._key()

    def fingerprint(self) -> str:
        """Stable content hash used by determinism checks."""
        payload = {
            "grid": self.grid.tobytes().hex(),
            "entities": [[e.kind, list(e.pos)] for e in self.entities],
            "player": [list(self.player.pos), self.player.facing, self.player.equipped],
            "inventory": sorted(self.inventory.items()),
            "stations": sorted(
                (list(p), k.value) for p, k in self.placed_stations.items()
            ),
            "biomes": sorted(self.biome_map.items()),
            "seed": self.rng_seed,
            "tick": self.tick,
            "capacity": self.capacity,
        }
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


def auto_equipped(inventory: dict[str, int]) -> str:
    return best_tool(inventory)


def nearby_blocks(
    state: WorldState, radius: int
) -> list[tuple[BlockKind, Position]]:
    """Ground-truth blocks within Chebyshev ``radius`` of the player.

    Plain ground and air cells are omitted; results are sorted row-major for
    determinism.
    """
    if radius < 1:
        raise ValueError("radius must be >= 1")
    px, py = state.player.pos
    found = []
    for y in range(max(0, py - radius), min(state.height, py + radius + 1)):
        for x in range(max(0, px - radius), min(state.width, px + radius + 1)):
            if (x, y) == (px, py):
                continue
            kind = state.kind_at((x, y))
            if kind in (BlockKind.GROUND, BlockKind.AIR):
                continue
            found.append((kind, (x, y)))
    return found


def nearby_entities(
    state: WorldState, radius: int
) -> list[tuple[str, Position]]:
    px, py = state.player.pos
    out = []
    for e in sorted(state.entities, key=lambda e: (e.pos[1], e.pos[0], e.kind)):
        if max(abs(e.pos[0] - px), abs(e.pos[1] - py)) <= radius:
            out.append((e.kind, e.pos))
    return out


def stations_of_kind(state: WorldState, kind: BlockKind) -> list[Position]:
    return sorted(
        pos for pos, k in state.placed_stations.items() if k == kind
    )


def station_within(
    state: WorldState, kind: BlockKind, radius: int = STATION_RADIUS
) -> bool:
    px, py = state.player.pos
    return any(
        max(abs(x - px), abs(y - py)) <= radius
        for x, y in stations_of_kind(state, kind)
    )


@dataclass(frozen=True)
class Requirement:
    """One unmet precondition reported by :func:`can_craft`."""

    kind: str  # "item" | "station"
    name: str
    count: int = 1

    def __str__(self) -> str:
        if self.kind == "station":
            return f"station {self.name} not placed"
        return f"{self.name} x{self.count}"


def can_craft(
    state: WorldState, recipe_id: str, recipes: RecipeTable | None = None
) -> tuple[bool, list[Requirement]]:
    """Whether one application of ``recipe_id`` can run right now.

    True requires the inputs in inventory (class-aware), enough fuel for
    furnace recipes, and the required station placed within
    ``STATION_RADIUS`` of the player; possession of an unplaced station does
    not count.
    """
    recipes = recipes or RecipeTable()
    recipe = recipes.by_id(recipe_id)  # raises UnknownRecipeError
    missing: list[Requirement] = []
    for name, count in recipe.inputs:
        have = class_count(state.inventory, name)
        if have < count:
            missing.append(Requirement("item", name, count - have))
    if recipe.fuel_cost:
        short = recipe.fuel_cost - recipes.fuel_count(state.inventory)
        if short > 0:
            missing.append(Requirement("item", "fuel", short))
    if recipe.station is not None:
        if not station_within(state, BlockKind(recipe.station)):
            missing.append(Requirement("station", recipe.station))
    return (not missing, missing)


def goal_reached(state: WorldState, goal_item: str = "golden_pickaxe") -> bool:
    return state.inventory.get(goal_item, 0) >= 1


__all__ = [
    "BlockKind",
    "DAY_LENGTH",
    "Entity",
    "KIND_CODES",
    "KIND_ORDER",
    "Player",
    "Position",
    "Requirement",
    "SOLID_KINDS",
    "STATION_RADIUS",
    "WALKABLE_KINDS",
    "WorldState",
    "auto_equipped",
    "can_craft",
    "goal_reached",
    "nearby_blocks",
    "nearby_entities",
    "station_within",
    "stations_of_kind",
]
