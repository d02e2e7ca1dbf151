"""Seeded procedural world generation with resource-reachability guarantees."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from craftbench.craftworld.state import (
    BIOMES,
    BlockKind,
    Entity,
    KIND_CODES,
    Player,
    WorldState,
)
from craftbench.errors import ConfigError, WorldGenError

# block kinds the tech tree cannot do without; generation guarantees at least
# one reachable deposit of each
REQUIRED_KINDS = (
    BlockKind.STONE,
    BlockKind.IRON_ORE,
    BlockKind.GOLD_ORE,
    BlockKind.COAL_ORE,
    BlockKind.OAK_LOG,
    BlockKind.SPRUCE_LOG,
)

_DEFAULT_MIN_BLOCKS = {
    BlockKind.STONE: 40,
    BlockKind.IRON_ORE: 8,
    BlockKind.GOLD_ORE: 8,
    BlockKind.COAL_ORE: 6,
    BlockKind.OAK_LOG: 10,
    BlockKind.SPRUCE_LOG: 10,
}


@dataclass(frozen=True)
class WorldConfig:
    """World generation parameters.

    Densities are approximate cell fractions per feature; sizes non-canonical
    defaults tuned for sub-minute trials.
    """

    width: int = 64
    height: int = 64
    stone_density: float = 0.06
    iron_density: float = 0.012
    gold_density: float = 0.010
    coal_density: float = 0.012
    tree_density: float = 0.035
    water_density: float = 0.02
    entity_count: int = 8
    capacity: int = 36
    min_blocks: dict = field(default_factory=lambda: dict(_DEFAULT_MIN_BLOCKS))

    def validate(self) -> None:
        if self.width < 16 or self.height < 16:
            raise ConfigError("world dimensions must be at least 16x16")
        named = {
            "stone_density": self.stone_density,
            "iron_density": self.iron_density,
            "gold_density": self.gold_density,
            "coal_density": self.coal_density,
            "tree_density": self.tree_density,
        }
        for name, value in named.items():
            if not (0.0 < value < 1.0):
                raise ConfigError(
                    f"{name} must lie in (0, 1); the tech tree is unreachable "
                    f"without it (got {value})"
                )
        if not (0.0 <= self.water_density < 1.0):
            raise ConfigError("water_density must lie in [0, 1)")
        if self.capacity < 1:
            raise ConfigError("inventory capacity must be positive")


def from_dict(raw: dict) -> WorldConfig:
    """Build a config from a plain dict (config-file section)."""
    known = {f for f in WorldConfig.__dataclass_fields__}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown world config keys: {sorted(unknown)}")
    if "min_blocks" in raw:
        raw = dict(raw)
        raw["min_blocks"] = {
            BlockKind(k): int(v) for k, v in raw["min_blocks"].items()
        }
    return WorldConfig(**raw)


def _grow_cluster(
    rng: np.random.Generator,
    grid: np.ndarray,
    start: tuple[int, int],
    code: int,
    size: int,
) -> int:
    """Random-walk blob growth onto ground cells; returns cells written."""
    height, width = grid.shape
    ground = KIND_CODES[BlockKind.GROUND]
    x, y = start
    written = 0
    for _ in range(size * 4):
        if written >= size:
            break
        if grid[y, x] == ground:
            grid[y, x] = code
            written += 1
        dx, dy = [(1, 0), (-1, 0), (0, 1), (0, -1)][int(rng.integers(4))]
        x = int(np.clip(x + dx, 0, width - 1))
        y = int(np.clip(y + dy, 0, height - 1))
    return written


def _scatter(
    rng: np.random.Generator,
    grid: np.ndarray,
    kind: BlockKind,
    density: float,
) -> None:
    height, width = grid.shape
    target = max(1, int(round(density * width * height)))
    placed = 0
    attempts = 0
    while placed < target and attempts < target * 20:
        attempts += 1
        x = int(rng.integers(width))
        y = int(rng.integers(height))
        size = int(rng.integers(3, 7))
        placed += _grow_cluster(rng, grid, (x, y), KIND_CODES[kind], size)


def _reachable_mask(grid: np.ndarray, start: tuple[int, int]) -> np.ndarray:
    """Cells reachable from ``start`` walking 4-directionally over ground."""
    height, width = grid.shape
    ground = KIND_CODES[BlockKind.GROUND]
    seen = np.zeros_like(grid, dtype=bool)
    sx, sy = start
    if grid[sy, sx] != ground:
        return seen
    stack = [(sx, sy)]
    seen[sy, sx] = True
    while stack:
        x, y = stack.pop()
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nx, ny = x + dx, y + dy
            if 0 <= nx < width and 0 <= ny < height and not seen[ny, nx]:
                if grid[ny, nx] == ground:
                    seen[ny, nx] = True
                    stack.append((nx, ny))
    return seen


def _kind_reachable(
    grid: np.ndarray, reach: np.ndarray, kind: BlockKind
) -> bool:
    """A deposit is reachable if some reached cell is 8-adjacent to it."""
    ys, xs = np.nonzero(grid == KIND_CODES[kind])
    height, width = grid.shape
    for x, y in zip(xs, ys):
        y0, y1 = max(0, y - 1), min(height, y + 2)
        x0, x1 = max(0, x - 1), min(width, x + 2)
        if reach[y0:y1, x0:x1].any():
            return True
    return False


def _carve_to(
    grid: np.ndarray, start: tuple[int, int], kind: BlockKind
) -> None:
    """Carve an L-shaped ground corridor from ``start`` next to the nearest
    ``kind`` cell, never destroying cells of required kinds."""
    ys, xs = np.nonzero(grid == KIND_CODES[kind])
    if len(xs) == 0:
        raise WorldGenError(f"no {kind.value} cells to carve toward")
    sx, sy = start
    dists = np.abs(xs - sx) + np.abs(ys - sy)
    i = int(np.argmin(dists))
    tx, ty = int(xs[i]), int(ys[i])
    ground = KIND_CODES[BlockKind.GROUND]
    protected = {KIND_CODES[k] for k in REQUIRED_KINDS}
    path = []
    x, y = sx, sy
    while x != tx:
        x += 1 if tx > x else -1
        path.append((x, y))
    while y != ty:
        y += 1 if ty > y else -1
        path.append((x, y))
    for x, y in path[:-1]:  # stop short of the deposit itself
        if grid[y, x] not in protected:
            grid[y, x] = ground


def generate_world(seed: int, config: WorldConfig | None = None) -> WorldState:
    """Deterministic world as a pure function of ``(seed, config)``.

    Guarantees at least ``config.min_blocks[kind]`` cells of every required
    resource kind and a walkable route from the spawn to at least one deposit
    of each.
    """
    config = config or WorldConfig()
    config.validate()
    rng = np.random.default_rng(seed)

    grid = np.full(
        (config.height, config.width), KIND_CODES[BlockKind.GROUND], dtype=np.uint8
    )

    quadrants = ("nw", "ne", "sw", "se")
    labels = list(BIOMES)
    rng.shuffle(labels)
    biome_map = dict(zip(quadrants, labels))

    _scatter(rng, grid, BlockKind.WATER, config.water_density)
    _scatter(rng, grid, BlockKind.STONE, config.stone_density)
    _scatter(rng, grid, BlockKind.COAL_ORE, config.coal_density)
    _scatter(rng, grid, BlockKind.IRON_ORE, config.iron_density)
    _scatter(rng, grid, BlockKind.GOLD_ORE, config.gold_density)
    _scatter(rng, grid, BlockKind.SPRUCE_LOG, config.tree_density / 2)
    _scatter(rng, grid, BlockKind.OAK_LOG, config.tree_density / 2)

    # clear the spawn area
    cx, cy = config.width // 2, config.height // 2
    grid[cy - 1 : cy + 2, cx - 1 : cx + 2] = KIND_CODES[BlockKind.GROUND]

    # top up scarce kinds, then guarantee reachability
    for _ in range(30):
        short = [
            kind
            for kind in REQUIRED_KINDS
            if int((grid == KIND_CODES[kind]).sum()) < config.min_blocks.get(kind, 1)
        ]
        if not short:
            break
        for kind in short:
            x = int(rng.integers(config.width))
            y = int(rng.integers(config.height))
            _grow_cluster(rng, grid, (x, y), KIND_CODES[kind], int(rng.integers(3, 7)))
    else:
        raise WorldGenError("could not satisfy minimum block counts")

    for _ in range(20):
        reach = _reachable_mask(grid, (cx, cy))
        blocked = [
            kind
            for kind in REQUIRED_KINDS
            if not _kind_reachable(grid, reach, kind)
        ]
        if not blocked:
            break
        for kind in blocked:
            _carve_to(grid, (cx, cy), kind)
    else:
        raise WorldGenError("could not carve routes to all required resources")

    # decorative entities on reachable ground, away from the spawn cell
    reach = _reachable_mask(grid, (cx, cy))
    ys, xs = np.nonzero(reach)
    candidates = [
        (int(x), int(y))
        for x, y in zip(xs, ys)
        if (int(x), int(y)) != (cx, cy)
    ]
    entities = []
    kinds = ["zombie", "sheep"]
    for i in range(min(config.entity_count, len(candidates))):
        pos = candidates[int(rng.integers(len(candidates)))]
        if any(e.pos == pos for e in entities):
            continue
        entities.append(Entity(kind=kinds[i % 2], pos=pos))

    return WorldState(
        grid=grid,
        entities=tuple(entities),
        player=Player(pos=(cx, cy)),
        inventory={},
        placed_stations={},
        biome_map=biome_map,
        rng_seed=seed,
        capacity=config.capacity,
    )
