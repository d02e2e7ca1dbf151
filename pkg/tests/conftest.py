"""Shared fixtures: seeded worlds and the canonical failure-mode fixture state."""

from __future__ import annotations

import numpy as np
import pytest

from craftbench.craftworld import WorldConfig, generate_world
from craftbench.craftworld.state import BlockKind, KIND_CODES, Player, WorldState


@pytest.fixture(scope="session")
def default_config() -> WorldConfig:
    return WorldConfig()


@pytest.fixture(scope="session")
def world7(default_config) -> WorldState:
    return generate_world(7, default_config)


@pytest.fixture()
def smelt_fixture_state(world7) -> WorldState:
    """Raw gold in hand, sticks, a furnace possessed but not placed.

    The canonical state where a materials-only planner proposes an
    impossible smelt while a plan-ahead planner proposes placing the
    furnace first.
    """
    return world7.evolve(
        inventory={"raw_gold": 3, "stick": 2, "furnace": 1},
        placed_stations={},
    )


def flat_world(size: int = 15, inventory: dict | None = None) -> WorldState:
    """All-ground world with the player centered; handy for perception tests."""
    grid = np.full((size, size), KIND_CODES[BlockKind.GROUND], dtype=np.uint8)
    return WorldState(
        grid=grid,
        entities=(),
        player=Player(pos=(size // 2, size // 2)),
        inventory=dict(inventory or {}),
        placed_stations={},
        biome_map={"nw": "forest", "ne": "plains", "sw": "mountains", "se": "wetlands"},
        rng_seed=0,
    )
