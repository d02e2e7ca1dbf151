"""Curriculum inputs: cheat observations, symbolic frames, vision encoders.

The "image" is a symbolic cell grid rather than pixels: one glyph per cell,
player-centered, with line-of-sight occlusion rendered as the unknown glyph
and a HUD row carrying time-of-day and biome glyphs. Element extraction and
free description read only what the frame shows; the cheat observation reads
the world directly.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from importlib import resources

from craftbench.craftworld.state import (
    BlockKind,
    Position,
    SOLID_KINDS,
    WorldState,
    nearby_blocks,
    nearby_entities,
)
from craftbench.errors import BackendError, StatsError

CHEAT_RADIUS = 8  # Chebyshev radius of the ground-truth observation
DEFAULT_WINDOW = 11  # frame edge length; odd, smaller than the cheat window

KIND_GLYPHS = {
    BlockKind.GROUND: ".",
    BlockKind.WATER: "~",
    BlockKind.STONE: "#",
    BlockKind.IRON_ORE: "i",
    BlockKind.GOLD_ORE: "g",
    BlockKind.COAL_ORE: "c",
    BlockKind.OAK_LOG: "O",
    BlockKind.SPRUCE_LOG: "S",
    BlockKind.CRAFTING_TABLE: "T",
    BlockKind.FURNACE: "F",
    BlockKind.AIR: ".",
    BlockKind.UNKNOWN: "?",
}
GLYPH_KINDS = {g: k for k, g in KIND_GLYPHS.items() if k is not BlockKind.AIR}

ENTITY_GLYPHS = {"zombie": "z", "sheep": "s"}
GLYPH_ENTITIES = {g: e for e, g in ENTITY_GLYPHS.items()}

PLAYER_GLYPH = "@"
UNKNOWN_GLYPH = "?"

TIME_GLYPHS = {"day": "d", "night": "n"}
GLYPH_TIMES = {g: t for t, g in TIME_GLYPHS.items()}
BIOME_GLYPHS = {"forest": "f", "plains": "p", "mountains": "m", "wetlands": "w"}
GLYPH_BIOMES = {g: b for b, g in BIOME_GLYPHS.items()}


# ---------------------------------------------------------------------------
# line of sight
# ---------------------------------------------------------------------------

def interior_cells(x0: int, y0: int, x1: int, y1: int) -> list[Position]:
    """Grid cells the open segment between two cell centers properly crosses.

    Endpoint cells are excluded; cells touched only at a lattice corner are
    not crossed (the traversal takes a diagonal step there). Integer-exact.
    """
    dx, dy = x1 - x0, y1 - y0
    if dx == 0 and dy == 0:
        return []
    sx = (dx > 0) - (dx < 0)
    sy = (dy > 0) - (dy < 0)
    nx, ny = abs(dx), abs(dy)
    ix, iy = x0, y0
    kx = ky = 0
    cells: list[Position] = []
    while (ix, iy) != (x1, y1):
        if ny == 0:
            ix += sx
            kx += 1
        elif nx == 0:
            iy += sy
            ky += 1
        else:
            lhs = (2 * kx + 1) * ny  # next x-boundary crossing, cross-multiplied
            rhs = (2 * ky + 1) * nx  # next y-boundary crossing
            if lhs < rhs:
                ix += sx
                kx += 1
            elif lhs > rhs:
                iy += sy
                ky += 1
            else:  # exact corner: step diagonally, skipping the side cells
                ix += sx
                iy += sy
                kx += 1
                ky += 1
        if (ix, iy) != (x1, y1):
            cells.append((ix, iy))
    return cells


def is_visible(state: WorldState, origin: Position, target: Position) -> bool:
    """Target cell visible from origin: no solid cell strictly between them."""
    for cell in interior_cells(*origin, *target):
        if not state.in_bounds(cell):
            return False
        if state.kind_at(cell) in SOLID_KINDS:
            return False
    return True


# ---------------------------------------------------------------------------
# observation (cheat channel)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Observation:
    """Lossless projection of the world onto the curriculum's input fields."""

    inventory: tuple[tuple[str, int], ...]
    equipment: str
    health: int
    hunger: int
    position: Position
    nearby_blocks: tuple[tuple[BlockKind, Position], ...]
    nearby_entities: tuple[tuple[str, Position], ...]
    time_of_day: str
    biome: str

    def inventory_dict(self) -> dict[str, int]:
        return dict(self.inventory)


def observe_cheat(state: WorldState, radius: int = CHEAT_RADIUS) -> Observation:
    return Observation(
        inventory=tuple(sorted(state.inventory.items())),
        equipment=state.player.equipped,
        health=20,
        hunger=20,
        position=state.player.pos,
        nearby_blocks=tuple(nearby_blocks(state, radius)),
        nearby_entities=tuple(nearby_entities(state, radius)),
        time_of_day=state.time_of_day,
        biome=state.biome_at(state.player.pos),
    )


# ---------------------------------------------------------------------------
# visual frame
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VisualFrame:
    """Player-centered glyph window plus a HUD glyph row.

    Serializes as one row per line, row-major, HUD line last (format
    ``hud <time_glyph> <biome_glyph>``).
    """

    rows: tuple[str, ...]
    hud: str

    @property
    def size(self) -> int:
        return len(self.rows)

    def serialize(self) -> str:
        return "\n".join(self.rows + (self.hud,))

    @classmethod
    def parse(cls, text: str) -> "VisualFrame":
        lines = text.splitlines()
        return cls(rows=tuple(lines[:-1]), hud=lines[-1])

    def glyph_at(self, dx: int, dy: int) -> str:
        half = self.size // 2
        return self.rows[dy + half][dx + half]

    def fully_unknown(self) -> bool:
        half = self.size // 2
        return all(
            self.glyph_at(dx, dy) == UNKNOWN_GLYPH
            for dy in range(-half, half + 1)
            for dx in range(-half, half + 1)
            if (dx, dy) != (0, 0)
        )


def _hud_dropout(state: WorldState, rate: float) -> bool:
    """Deterministic per-frame dropout: stable hash of (seed, tick)."""
    if rate <= 0.0:
        return False
    if rate >= 1.0:
        return True
    h = zlib.crc32(f"{state.rng_seed}:{state.tick}".encode())
    return (h % 10_000) / 10_000.0 < rate


def render_frame(
    state: WorldState,
    window_size: int = DEFAULT_WINDOW,
    *,
    night_time_glyph_hidden: float = 1.0,
    hud_dropout: float = 0.0,
) -> VisualFrame:
    """Deterministic symbolic rendering of the player's surroundings.

    Cells blocked by solid kinds along the line of sight render as the
    unknown glyph, as do out-of-world cells. The HUD time glyph is hidden at
    night for a ``night_time_glyph_hidden`` fraction of frames (all of them
    by default); ``hud_dropout`` optionally hides the whole HUD on a seeded
    fraction of frames for extraction-rate calibration.
    """
    if window_size < 5 or window_size % 2 == 0:
        raise ValueError("window_size must be odd and >= 5")
    half = window_size // 2
    px, py = state.player.pos
    rows = []
    for dy in range(-half, half + 1):
        row = []
        for dx in range(-half, half + 1):
            if (dx, dy) == (0, 0):
                row.append(PLAYER_GLYPH)
                continue
            cell = (px + dx, py + dy)
            if not state.in_bounds(cell) or not is_visible(state, (px, py), cell):
                row.append(UNKNOWN_GLYPH)
                continue
            entity = state.entity_at(cell)
            if entity is not None:
                row.append(ENTITY_GLYPHS[entity.kind])
            else:
                row.append(KIND_GLYPHS[state.kind_at(cell)])
        rows.append("".join(row))

    time_glyph = TIME_GLYPHS[state.time_of_day]
    if state.time_of_day == "night" and _hud_dropout(state, night_time_glyph_hidden):
        time_glyph = UNKNOWN_GLYPH
    biome_glyph = BIOME_GLYPHS[state.biome_at(state.player.pos)]
    if _hud_dropout(state, hud_dropout):
        time_glyph = UNKNOWN_GLYPH
        biome_glyph = UNKNOWN_GLYPH
    return VisualFrame(rows=tuple(rows), hud=f"hud {time_glyph} {biome_glyph}")


# ---------------------------------------------------------------------------
# element extraction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ElementReport:
    """Per-element extraction with independent N/A (None) per field.

    ``nearby_blocks``/``nearby_entities`` hold (name, offset-from-player)
    pairs read from visible frame cells only.
    """

    biome: str | None
    time: str | None
    nearby_blocks: tuple[tuple[str, Position], ...] | None
    nearby_entities: tuple[tuple[str, Position], ...] | None

    FIELDS = ("biome", "time", "nearby_blocks", "nearby_entities")

    def na_flags(self) -> dict[str, bool]:
        return {f: getattr(self, f) is None for f in self.FIELDS}


def encode_elements(frame: VisualFrame) -> ElementReport:
    """Read the four cheat-equivalent fields out of a frame.

    A field is N/A when its source glyphs are absent (HUD) or every relevant
    cell is unknown (window).
    """
    hud_parts = frame.hud.split()
    time_glyph = hud_parts[1] if len(hud_parts) > 1 else UNKNOWN_GLYPH
    biome_glyph = hud_parts[2] if len(hud_parts) > 2 else UNKNOWN_GLYPH
    time = GLYPH_TIMES.get(time_glyph)
    biome = GLYPH_BIOMES.get(biome_glyph)

    if frame.fully_unknown():
        return ElementReport(biome=biome, time=time, nearby_blocks=None, nearby_entities=None)

    half = frame.size // 2
    blocks: list[tuple[str, Position]] = []
    entities: list[tuple[str, Position]] = []
    for dy in range(-half, half + 1):
        for dx in range(-half, half + 1):
            if (dx, dy) == (0, 0):
                continue
            glyph = frame.glyph_at(dx, dy)
            if glyph in (UNKNOWN_GLYPH, PLAYER_GLYPH):
                continue
            if glyph in GLYPH_ENTITIES:
                entities.append((GLYPH_ENTITIES[glyph], (dx, dy)))
                continue
            kind = GLYPH_KINDS.get(glyph)
            if kind is not None and kind not in (BlockKind.GROUND, BlockKind.AIR):
                blocks.append((kind.value, (dx, dy)))
    return ElementReport(
        biome=biome,
        time=time,
        nearby_blocks=tuple(blocks),
        nearby_entities=tuple(entities),
    )


# ---------------------------------------------------------------------------
# free description
# ---------------------------------------------------------------------------

def vision_prompt_text() -> str:
    """The exact prompt shipped to live multimodal backends, byte for byte."""
    return (
        resources.files("craftbench.prompts")
        .joinpath("vision_free_description_v1.txt")
        .read_text(encoding="utf-8")
    )


def describe_elements(report: ElementReport, goal: str, max_chars: int = 600) -> str:
    """Deterministic free-text description derived from an element report.

    Every fact mentioned comes from the report, so element extraction always
    carries at least as much information as the free description.
    """
    if (
        report.nearby_blocks is None
        and report.nearby_entities is None
        and report.biome is None
        and report.time is None
    ):
        return "N/A"
    parts: list[str] = []
    if report.nearby_blocks is not None:
        counts: dict[str, int] = {}
        for name, _ in report.nearby_blocks:
            counts[name] = counts.get(name, 0) + 1
        if counts:
            listed = ", ".join(
                f"{n} {name.replace('_', ' ')}" for name, n in sorted(counts.items())
            )
            parts.append(f"Visible resources: {listed}.")
        else:
            parts.append("No notable blocks are visible.")
    if report.nearby_entities is not None and report.nearby_entities:
        names = sorted({name for name, _ in report.nearby_entities})
        parts.append("Creatures nearby: " + ", ".join(names) + ".")
    if report.time is not None:
        parts.append(f"It is {report.time}.")
    if report.biome is not None:
        parts.append(f"The area is {report.biome}.")
    parts.append(f"Goal: {goal}.")
    text = " ".join(parts)
    return text[:max_chars]


def encode_free(
    frame: VisualFrame,
    goal: str,
    backend=None,
    max_chars: int = 600,
) -> str:
    """Free-description encoding of a frame.

    Deterministic template (derived from the element report) unless a
    multimodal backend is supplied, in which case the stored vision prompt is
    sent verbatim with the frame attached and the backend's text returned.
    Transport failures surface as :class:`BackendError` so the caller can
    count the iteration with an empty vision field.
    """
    if frame.fully_unknown():
        return "N/A"
    if backend is not None and getattr(backend.descriptor, "multimodal", False):
        from craftbench.curriculum import PromptBundle

        bundle = PromptBundle(
            system_text="",
            user_text=vision_prompt_text(),
            mode="conventional",
            attachment=frame,
        )
        try:
            return backend.propose(bundle)[:max_chars]
        except Exception as exc:  # propagate as encoding-failed
            raise BackendError(f"free-description encoding failed: {exc}") from exc
    return describe_elements(encode_elements(frame), goal, max_chars)


# ---------------------------------------------------------------------------
# extraction stats
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExtractionStats:
    """Per-field (non-N/A, total) counts over a run of vision encodings."""

    counts: tuple[tuple[str, tuple[int, int]], ...]

    def rate(self, field: str) -> float:
        for name, (hit, total) in self.counts:
            if name == field:
                return hit / total
        raise KeyError(field)

    def overall_rate(self) -> float:
        hit = sum(h for _, (h, _) in self.counts)
        total = sum(t for _, (_, t) in self.counts)
        return hit / total

    def as_dict(self) -> dict[str, dict[str, float]]:
        return {
            name: {"non_na": h, "total": t, "rate": h / t}
            for name, (h, t) in self.counts
        }


def extraction_stats(reports) -> ExtractionStats:
    """Rates of non-N/A outputs over element reports and/or free-text strings."""
    reports = list(reports)
    if not reports:
        raise StatsError("extraction_stats over an empty sequence")
    tallies: dict[str, list[int]] = {}
    for r in reports:
        if isinstance(r, ElementReport):
            for field, is_na in r.na_flags().items():
                hit_total = tallies.setdefault(field, [0, 0])
                hit_total[0] += 0 if is_na else 1
                hit_total[1] += 1
        elif isinstance(r, str):
            hit_total = tallies.setdefault("free_description", [0, 0])
            hit_total[0] += 0 if r.strip() == "N/A" or not r.strip() else 1
            hit_total[1] += 1
        else:
            raise TypeError(f"unsupported report type: {type(r)!r}")
    return ExtractionStats(
        counts=tuple(sorted((k, (v[0], v[1])) for k, v in tallies.items()))
    )
