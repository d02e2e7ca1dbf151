"""Recipe table, mining yields, tool tiers, and fuel accounting.

The table below is the single source of truth for crafting, smelting and
mining semantics; the oracle planners chain over it and the executor applies
it, so both sides always agree. Input order within a recipe and recipe order
within the table are fixed: backward chaining visits them in this order,
which keeps transcripts stable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from craftbench.craftworld.items import (
    INVENTORY_ITEMS,
    class_count,
    inventory_members,
    item_class,
)
from craftbench.errors import ConfigError, UnknownRecipeError

# tool tiers; mining a kind needs the listed tier or better
TIER_HAND = 0
TIER_WOODEN = 1
TIER_STONE = 2
TIER_IRON = 3
TIER_GOLDEN = 4

TOOL_TIERS = {
    "wooden_pickaxe": TIER_WOODEN,
    "stone_pickaxe": TIER_STONE,
    "iron_pickaxe": TIER_IRON,
    "golden_pickaxe": TIER_GOLDEN,
}

TIER_NAMES = {
    TIER_HAND: "hand",
    TIER_WOODEN: "wooden",
    TIER_STONE: "stone",
    TIER_IRON: "iron",
    TIER_GOLDEN: "golden",
}


def best_tier(inventory: dict[str, int]) -> int:
    """Tier of the best pickaxe held; bare hands otherwise."""
    tiers = [t for tool, t in TOOL_TIERS.items() if inventory.get(tool, 0) > 0]
    return max(tiers, default=TIER_HAND)


def best_tool(inventory: dict[str, int]) -> str:
    """Name of the best pickaxe held, or ``hand``."""
    tier = best_tier(inventory)
    for tool, t in TOOL_TIERS.items():
        if t == tier:
            return tool
    return "hand"


@dataclass(frozen=True)
class Recipe:
    """One crafting or smelting rule.

    ``inputs`` may name item classes (``planks`` matches any species).
    ``species_output`` marks outputs that inherit the species of the first
    consumed input (log -> matching planks).
    """

    id: str
    inputs: tuple[tuple[str, int], ...]
    outputs: tuple[tuple[str, int], ...]
    station: str | None = None
    fuel_cost: int = 0
    species_output: bool = False

    def __post_init__(self) -> None:
        if not self.outputs:
            raise ConfigError(f"recipe {self.id}: outputs must be non-empty")
        if (self.fuel_cost > 0) != (self.station == "furnace"):
            raise ConfigError(
                f"recipe {self.id}: fuel_cost > 0 exactly for furnace recipes"
            )

    @property
    def output_item(self) -> str:
        return self.outputs[0][0]

    @property
    def batch_size(self) -> int:
        return self.outputs[0][1]


_DEFAULT_RECIPES = (
    Recipe("planks", (("wood_log", 1),), (("planks", 4),), species_output=True),
    Recipe("stick", (("planks", 2),), (("stick", 4),)),
    Recipe("crafting_table", (("planks", 4),), (("crafting_table", 1),)),
    Recipe(
        "wooden_pickaxe",
        (("planks", 3), ("stick", 2)),
        (("wooden_pickaxe", 1),),
        station="crafting_table",
    ),
    Recipe(
        "stone_pickaxe",
        (("cobblestone", 3), ("stick", 2)),
        (("stone_pickaxe", 1),),
        station="crafting_table",
    ),
    Recipe(
        "furnace",
        (("cobblestone", 8),),
        (("furnace", 1),),
        station="crafting_table",
    ),
    Recipe(
        "iron_pickaxe",
        (("iron_ingot", 3), ("stick", 2)),
        (("iron_pickaxe", 1),),
        station="crafting_table",
    ),
    Recipe(
        "golden_pickaxe",
        (("gold_ingot", 3), ("stick", 2)),
        (("golden_pickaxe", 1),),
        station="crafting_table",
    ),
    Recipe(
        "smelt_iron",
        (("raw_iron", 1),),
        (("iron_ingot", 1),),
        station="furnace",
        fuel_cost=1,
    ),
    Recipe(
        "smelt_gold",
        (("raw_gold", 1),),
        (("gold_ingot", 1),),
        station="furnace",
        fuel_cost=1,
    ),
)

# block kind name -> (yielded item, required tier)
_DEFAULT_MINING = {
    "oak_log": ("oak_log", TIER_HAND),
    "spruce_log": ("spruce_log", TIER_HAND),
    "stone": ("cobblestone", TIER_WOODEN),
    "coal_ore": ("coal", TIER_WOODEN),
    "iron_ore": ("raw_iron", TIER_STONE),
    "gold_ore": ("raw_gold", TIER_IRON),
    "crafting_table": ("crafting_table", TIER_HAND),
    "furnace": ("furnace", TIER_HAND),
}

# consumed as smelting fuel in this order: coal first, then planks by species
_DEFAULT_FUEL = ("coal", "oak_planks", "spruce_planks")


@dataclass(frozen=True)
class RecipeTable:
    """Crafting/smelting/mining rules plus fuel ordering."""

    recipes: tuple[Recipe, ...] = _DEFAULT_RECIPES
    mining: dict[str, tuple[str, int]] = field(
        default_factory=lambda: dict(_DEFAULT_MINING)
    )
    fuel_order: tuple[str, ...] = _DEFAULT_FUEL

    def by_id(self, recipe_id: str) -> Recipe:
        for r in self.recipes:
            if r.id == recipe_id:
                return r
        raise UnknownRecipeError(recipe_id)

    def producing(self, item: str) -> Recipe | None:
        """First recipe whose output class matches ``item``'s class."""
        target = item_class(item)
        for r in self.recipes:
            if item_class(r.output_item) == target:
                return r
        return None

    def smelting_from(self, raw_item: str) -> Recipe | None:
        """Furnace recipe consuming ``raw_item``'s class, if any."""
        target = item_class(raw_item)
        for r in self.recipes:
            if r.station == "furnace" and item_class(r.inputs[0][0]) == target:
                return r
        return None

    def mining_rule(self, block_name: str) -> tuple[str, int] | None:
        return self.mining.get(block_name)

    def blocks_yielding(self, item: str) -> tuple[str, ...]:
        """Block kinds whose mining yield falls in ``item``'s class."""
        target = item_class(item)
        return tuple(
            kind
            for kind, (yielded, _) in self.mining.items()
            if item_class(yielded) == target
        )

    def fuel_count(self, inventory: dict[str, int]) -> int:
        return sum(inventory.get(f, 0) for f in self.fuel_order)

    def consume_fuel(self, inventory: dict[str, int], units: int) -> None:
        """Burn ``units`` of fuel in the table's preference order (in place).

        The executor and the plan simulator share this helper so their fuel
        bookkeeping can never drift apart.
        """
        remaining = units
        for f in self.fuel_order:
            take = min(inventory.get(f, 0), remaining)
            if take:
                inventory[f] -= take
                if inventory[f] == 0:
                    del inventory[f]
                remaining -= take
            if remaining == 0:
                return
        raise ConfigError(f"consume_fuel: short by {remaining} units")

    def consume_input(
        self, inventory: dict[str, int], name: str, count: int
    ) -> list[str]:
        """Consume ``count`` of ``name`` (class-aware, alphabetical members).

        Returns the concrete items consumed, in order. Raises if short.
        """
        if class_count(inventory, name) < count:
            raise ConfigError(f"consume_input: short of {name}")
        consumed = []
        remaining = count
        for member in sorted(inventory_members(name)):
            take = min(inventory.get(member, 0), remaining)
            for _ in range(take):
                consumed.append(member)
            if take:
                inventory[member] -= take
                if inventory[member] == 0:
                    del inventory[member]
                remaining -= take
            if remaining == 0:
                break
        return consumed


def resolve_species_output(item: str, consumed: list[str]) -> str:
    """Specialize a class output to the species of the first consumed log."""
    for c in consumed:
        if c.endswith("_log"):
            species = c[: -len("_log")]
            candidate = f"{species}_planks" if item == "planks" else item
            if candidate in INVENTORY_ITEMS:
                return candidate
    return item


def load_recipe_table(path: str | Path | None = None) -> RecipeTable:
    """Recipe table from a JSON config file; defaults when ``path`` is None.

    Schema: {"recipes": [{"id", "inputs": {item: n}, "outputs": {item: n},
    "station", "fuel_cost", "species_output"}], "mining": {block: [item,
    tier]}, "fuel_order": [item, ...]} — any top-level key may be omitted to
    keep its default.
    """
    if path is None:
        return RecipeTable()
    raw = json.loads(Path(path).read_text())
    recipes: tuple[Recipe, ...] = _DEFAULT_RECIPES
    if "recipes" in raw:
        recipes = tuple(
            Recipe(
                id=r["id"],
                inputs=tuple((k, int(v)) for k, v in r["inputs"].items()),
                outputs=tuple((k, int(v)) for k, v in r["outputs"].items()),
                station=r.get("station"),
                fuel_cost=int(r.get("fuel_cost", 0)),
                species_output=bool(r.get("species_output", False)),
            )
            for r in raw["recipes"]
        )
    mining = dict(_DEFAULT_MINING)
    if "mining" in raw:
        mining = {k: (v[0], int(v[1])) for k, v in raw["mining"].items()}
    fuel = tuple(raw.get("fuel_order", _DEFAULT_FUEL))
    return RecipeTable(recipes=recipes, mining=mining, fuel_order=fuel)
