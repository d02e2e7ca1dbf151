"""Closed item vocabulary and the equivalence classes used for task matching.

Two layers of names exist:

* concrete inventory items (``spruce_log``, ``cobblestone``, ...) that can
  actually sit in a slot, and
* task-level names that additionally include mineable block targets
  (``iron_ore``, ``stone``) and species-generic class representatives
  (``wood_log``, ``planks``).

``item_class`` collapses both layers onto one canonical representative per
acquisition intent, so that e.g. obtaining a spruce log and mining a generic
wood log count as the same item type.
"""

from __future__ import annotations

LOG_ITEMS = ("oak_log", "spruce_log")
PLANK_ITEMS = ("oak_planks", "spruce_planks")

#: Items that can occupy an inventory slot.
INVENTORY_ITEMS = LOG_ITEMS + PLANK_ITEMS + (
    "stick",
    "cobblestone",
    "raw_iron",
    "raw_gold",
    "coal",
    "iron_ingot",
    "gold_ingot",
    "crafting_table",
    "furnace",
    "wooden_pickaxe",
    "stone_pickaxe",
    "iron_pickaxe",
    "golden_pickaxe",
    "rotten_flesh",
)

#: Extra names that may appear in task sentences but never in inventories:
#: block targets and species-generic class representatives.
TASK_ONLY_ITEMS = (
    "wood_log",
    "planks",
    "stone",
    "iron_ore",
    "gold_ore",
    "coal_ore",
    "area",
)

TASK_ITEMS = INVENTORY_ITEMS + TASK_ONLY_ITEMS

# class representative -> members (items sharing it are "the same item type")
_CLASS_MEMBERS = {
    "wood_log": ("wood_log",) + LOG_ITEMS,
    "planks": ("planks",) + PLANK_ITEMS,
    "stone": ("stone", "cobblestone"),
    "raw_iron": ("raw_iron", "iron_ore"),
    "raw_gold": ("raw_gold", "gold_ore"),
    "coal": ("coal", "coal_ore"),
}

_CLASS_OF = {m: rep for rep, members in _CLASS_MEMBERS.items() for m in members}


def is_known_item(name: str) -> bool:
    return name in TASK_ITEMS


def item_class(name: str) -> str:
    """Canonical class representative for an item or block-target name."""
    return _CLASS_OF.get(name, name)


def class_members(rep: str) -> tuple[str, ...]:
    """All names belonging to a class; a singleton for unclassed items."""
    return _CLASS_MEMBERS.get(rep, (rep,))


def inventory_members(name: str) -> tuple[str, ...]:
    """Concrete inventory items satisfying ``name`` (class-aware)."""
    return tuple(
        m for m in class_members(item_class(name)) if m in INVENTORY_ITEMS
    )


def class_count(inventory: dict[str, int], name: str) -> int:
    """Total inventory count over every member of ``name``'s class."""
    return sum(inventory.get(m, 0) for m in inventory_members(name))


def display_name(item: str) -> str:
    """Human-readable form used in task sentences (underscores to spaces)."""
    return item.replace("_", " ")


def from_display(text: str) -> str:
    """Inverse of :func:`display_name`, tolerating case and a plural 's'."""
    name = "_".join(text.strip().lower().split())
    if name in TASK_ITEMS:
        return name
    if name.endswith("s") and name[:-1] in TASK_ITEMS:
        return name[:-1]
    raise KeyError(text)
