"""Curriculum prompts, the task sentence grammar, and proposal parsing.

Response templates pin exact section labels (``Reasoning:``, ``Task:``,
``Steps:``, ``Predicted State:``, ``Risks:``); the parser is whitespace- and
case-tolerant on the labels only, while task sentences follow a closed
verb/count/item grammar.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from importlib import resources

from craftbench.craftworld.items import display_name, from_display
from craftbench.craftworld.task import Task, Verb
from craftbench.errors import AdoptError, ParseError, StatsError
from craftbench.perception import ElementReport, Observation, VisualFrame

TEMPLATE_VERSION = "v1"

CONVENTIONAL = "conventional"
PREDICTIVE = "predictive"

_VOWELS = "aeiou"
_COUNT_WORDS = {"a": 1, "an": 1, "the": 1, "one": 1}


# ---------------------------------------------------------------------------
# history entries
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HistoryEntry:
    """One completed or failed task from earlier iterations."""

    task: Task
    success: bool
    reason: str = "completed"  # OutcomeReason value, or parse/backend marker


_REASON_PHRASES = {
    "completed": "completed",
    "no_station_placed": "no station placed",
    "missing_ingredients": "missing ingredients",
    "tool_tier_too_low": "tool tier too low",
    "target_not_found": "target not found",
    "step_budget_exhausted": "step budget exhausted",
}


# ---------------------------------------------------------------------------
# task sentence grammar
# ---------------------------------------------------------------------------

def render_task(task: Task) -> str:
    """Canonical task sentence (no trailing period).

    ``Place`` with count 1 uses "the"; obtain/mine with count 1 use an
    article; everything else uses the numeral. Explore is count-free.
    """
    noun = display_name(task.item)
    verb = task.verb.value.capitalize()
    if task.verb is Verb.EXPLORE:
        return "Explore the area"
    if task.verb is Verb.PLACE and task.count == 1:
        return f"Place the {noun}"
    if task.verb in (Verb.OBTAIN, Verb.MINE) and task.count == 1:
        article = "an" if noun[0] in _VOWELS else "a"
        return f"{verb} {article} {noun}"
    return f"{verb} {task.count} {noun}"


_TASK_RE = re.compile(
    r"^\s*(?P<verb>[A-Za-z]+)\s+(?:(?P<word>a|an|the|one)\s+)?(?:(?P<count>\d+)\s+)?"
    r"(?P<noun>[A-Za-z_ ]+?)\s*\.?\s*$"
)


def parse_task_sentence(text: str) -> Task:
    """Parse one task sentence into a canonical :class:`Task`.

    Species-generic nouns stay generic ("wood log" -> ``wood_log``); counts
    default to 1; unparseable verbs/items raise typed :class:`ParseError`.
    """
    m = _TASK_RE.match(text)
    if not m:
        raise ParseError("missing_task", f"not a task sentence: {text!r}")
    verb_word = m.group("verb").lower()
    try:
        verb = Verb(verb_word)
    except ValueError:
        raise ParseError("unknown_verb", f"unknown verb: {verb_word!r}") from None
    if verb is Verb.EXPLORE:
        return Task(verb, "area", 1)
    count = 1
    if m.group("count"):
        count = int(m.group("count"))
        if count < 1:
            raise ParseError("bad_count", f"count must be positive: {text!r}")
    elif m.group("word"):
        count = _COUNT_WORDS[m.group("word")]
    try:
        item = from_display(m.group("noun"))
    except KeyError:
        raise ParseError(
            "unknown_item", f"unknown item: {m.group('noun')!r}"
        ) from None
    return Task(verb, item, count)


# ---------------------------------------------------------------------------
# prompt bundle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PromptContext:
    """Structured view of the state behind a prompt.

    Carried alongside the rendered text so deterministic backends can plan
    from the same information a live model reads out of the prompt. Excluded
    from the prompt hash; the wire format never ships it.
    """

    observation: Observation
    goal: str
    history: tuple[HistoryEntry, ...] = ()
    goal_item: str | None = None  # canonical item id behind the goal text


@dataclass(frozen=True)
class PromptBundle:
    system_text: str
    user_text: str
    mode: str  # conventional | predictive
    attachment: VisualFrame | None = None
    context: PromptContext | None = None

    def __post_init__(self):
        if self.mode not in (CONVENTIONAL, PREDICTIVE):
            raise ValueError(f"unknown prompt mode: {self.mode!r}")


def bundle_hash(bundle: PromptBundle) -> str:
    payload = {
        "system": bundle.system_text,
        "user": bundle.user_text,
        "mode": bundle.mode,
        "attachment": bundle.attachment.serialize() if bundle.attachment else None,
    }
    return hashlib.sha256(
        json.dumps(payload, sort_keys=True).encode()
    ).hexdigest()


def _load_template(name: str) -> str:
    return (
        resources.files("craftbench.prompts")
        .joinpath(f"{name}_{TEMPLATE_VERSION}.txt")
        .read_text(encoding="utf-8")
    )


def _render_observation(obs: Observation) -> str:
    inv = obs.inventory_dict()
    inv_text = (
        "{"
        + ", ".join(f"'{k}': {v}" for k, v in sorted(inv.items()))
        + "}"
    )
    blocks = ", ".join(
        f"{kind.value}@{pos}" for kind, pos in obs.nearby_blocks
    ) or "none"
    entities = ", ".join(
        f"{kind}@{pos}" for kind, pos in obs.nearby_entities
    ) or "none"
    return "\n".join(
        [
            f"Inventory ({len(inv)}/36): {inv_text}",
            f"Equipment: {obs.equipment}",
            f"Health: {obs.health}/20",
            f"Hunger: {obs.hunger}/20",
            f"Position: {obs.position}",
            f"Time: {obs.time_of_day}",
            f"Biome: {obs.biome}",
            f"Nearby blocks: {blocks}",
            f"Nearby entities: {entities}",
        ]
    )


def _render_elements(report: ElementReport) -> str:
    def fmt_list(values) -> str:
        if values is None:
            return "N/A"
        if not values:
            return "none"
        counts: dict[str, int] = {}
        for name, _ in values:
            counts[name] = counts.get(name, 0) + 1
        return ", ".join(f"{name} x{n}" for name, n in sorted(counts.items()))

    return "\n".join(
        [
            f"Biome: {report.biome if report.biome is not None else 'N/A'}",
            f"Time: {report.time if report.time is not None else 'N/A'}",
            f"Nearby blocks: {fmt_list(report.nearby_blocks)}",
            f"Nearby entities: {fmt_list(report.nearby_entities)}",
        ]
    )


def _render_history(history: tuple[HistoryEntry, ...]) -> tuple[str, str]:
    completed = [h for h in history if h.success]
    failed = [h for h in history if not h.success]

    def lines(entries, with_reason: bool) -> str:
        if not entries:
            return "none"
        out = []
        for h in entries:
            line = f"- {render_task(h.task)}"
            if with_reason:
                line += f" (failed: {_REASON_PHRASES.get(h.reason, h.reason)})"
            out.append(line)
        return "\n".join(out)

    return lines(completed, False), lines(failed, True)


def build_prompt(
    obs: Observation,
    vision: ElementReport | VisualFrame | str | None,
    history: tuple[HistoryEntry, ...],
    goal: str,
    mode: str,
    goal_item: str | None = None,
) -> PromptBundle:
    """Assemble the curriculum prompt for one iteration.

    ``vision`` selects the section: an :class:`ElementReport` renders the
    four element lines, a string is a free description, a
    :class:`VisualFrame` ships as an attachment, None omits the section.
    """
    if not goal:
        raise ValueError("goal must be non-empty")
    system_text = _load_template(
        "system_conventional" if mode == CONVENTIONAL else "system_predictive"
    )
    sections = ["Current state:", _render_observation(obs)]
    attachment = None
    if isinstance(vision, VisualFrame):
        attachment = vision
        sections += [
            "",
            "Visual information (direct): play-screen frame attached.",
        ]
    elif isinstance(vision, ElementReport):
        sections += ["", "Visual information (element extraction):", _render_elements(vision)]
    elif isinstance(vision, str):
        sections += ["", "Visual information (free description):", vision]
    completed, failed = _render_history(history)
    sections += [
        "",
        "Completed tasks:",
        completed,
        "",
        "Failed tasks:",
        failed,
        "",
        f"Final goal: {goal}.",
    ]
    return PromptBundle(
        system_text=system_text,
        user_text="\n".join(sections),
        mode=mode,
        attachment=attachment,
        context=PromptContext(
            observation=obs,
            goal=goal,
            history=tuple(history),
            goal_item=goal_item,
        ),
    )


# ---------------------------------------------------------------------------
# proposal parsing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TaskProposal:
    reasoning: str
    task: Task


@dataclass(frozen=True)
class PlanStep:
    task: Task
    predicted_state: str
    risks: str


@dataclass(frozen=True)
class PredictionPlan:
    steps: tuple[PlanStep, ...]

    @property
    def tasks(self) -> tuple[Task, ...]:
        return tuple(s.task for s in self.steps)


@dataclass(frozen=True)
class DualProposal:
    response1: TaskProposal
    response2: tuple[TaskProposal, PredictionPlan] | None = None


_SECTION_RE = re.compile(r"^\s*response\s*([12])\s*:?\s*$", re.IGNORECASE | re.MULTILINE)
_LABEL_RES = {
    "reasoning": re.compile(r"^\s*reasoning\s*:\s*", re.IGNORECASE),
    "task": re.compile(r"^\s*task\s*:\s*", re.IGNORECASE),
    "steps": re.compile(r"^\s*steps\s*:\s*$", re.IGNORECASE),
}
_STEP_RE = re.compile(
    r"^\s*\d+\.\s*task\s*:\s*(?P<task>[^.]+)\.?\s*"
    r"(?:predicted\s+state\s*:\s*(?P<state>.*?)\.?\s*)?"
    r"(?:risks\s*:\s*(?P<risks>.*?)\.?\s*)?$",
    re.IGNORECASE,
)


def _split_sections(text: str) -> dict[str, str]:
    matches = list(_SECTION_RE.finditer(text))
    if not matches:
        return {}
    sections = {}
    for i, m in enumerate(matches):
        end = matches[i + 1].start() if i + 1 < len(matches) else len(text)
        sections[m.group(1)] = text[m.end() : end]
    return sections


def _parse_single(section: str) -> TaskProposal:
    reasoning_lines: list[str] = []
    task_line: str | None = None
    in_reasoning = False
    for line in section.splitlines():
        if _LABEL_RES["task"].match(line):
            task_line = _LABEL_RES["task"].sub("", line).strip()
            in_reasoning = False
            continue
        if _LABEL_RES["reasoning"].match(line):
            reasoning_lines.append(_LABEL_RES["reasoning"].sub("", line).strip())
            in_reasoning = True
            continue
        if _LABEL_RES["steps"].match(line):
            in_reasoning = False
            continue
        if in_reasoning and line.strip():
            reasoning_lines.append(line.strip())
    if task_line is None:
        raise ParseError("missing_task", "no Task: line found")
    return TaskProposal(
        reasoning=" ".join(reasoning_lines).strip(),
        task=parse_task_sentence(task_line),
    )


def _parse_steps(section: str) -> PredictionPlan:
    lines = section.splitlines()
    start = None
    for i, line in enumerate(lines):
        if _LABEL_RES["steps"].match(line):
            start = i + 1
            break
    if start is None:
        raise ParseError("empty_steps", "Response2 carries no Steps: block")
    steps: list[PlanStep] = []
    for line in lines[start:]:
        if not line.strip():
            continue
        if _LABEL_RES["reasoning"].match(line) or _LABEL_RES["task"].match(line):
            break
        m = _STEP_RE.match(line)
        if not m:
            break
        steps.append(
            PlanStep(
                task=parse_task_sentence(m.group("task")),
                predicted_state=(m.group("state") or "").strip(),
                risks=(m.group("risks") or "").strip(),
            )
        )
    if not steps:
        raise ParseError("empty_steps", "Response2 steps list is empty")
    return PredictionPlan(steps=tuple(steps))


def parse_planner_output(text: str, mode: str) -> DualProposal:
    """Parse raw planner text into a :class:`DualProposal`.

    Conventional mode accepts a bare Reasoning/Task pair (a labeled
    Response1 section also works). Predictive mode demands both labeled
    sections, with Response2 carrying a non-empty Steps block.
    """
    sections = _split_sections(text)
    if mode == CONVENTIONAL:
        body = sections.get("1", text if not sections else None)
        if body is None:
            raise ParseError("missing_response1", "no Response1 section")
        return DualProposal(response1=_parse_single(body))
    if "1" not in sections:
        raise ParseError("missing_response1", "predictive output lacks Response1")
    if "2" not in sections:
        raise ParseError("missing_response2", "predictive output lacks Response2")
    response1 = _parse_single(sections["1"])
    # strip the Steps block before reading Response2's own Reasoning/Task
    plan = _parse_steps(sections["2"])
    tail_lines = []
    seen_steps = False
    for line in sections["2"].splitlines():
        if _LABEL_RES["steps"].match(line):
            seen_steps = True
            continue
        if seen_steps and _STEP_RE.match(line):
            continue
        tail_lines.append(line)
    response2 = _parse_single("\n".join(tail_lines))
    return DualProposal(response1=response1, response2=(response2, plan))


def adopt(dual: DualProposal, mode: str) -> TaskProposal:
    """Adoption policy: Response1 in conventional mode, Response2 otherwise."""
    if mode == CONVENTIONAL:
        return dual.response1
    if dual.response2 is None:
        raise AdoptError("predictive adoption requires Response2")
    return dual.response2[0]


# ---------------------------------------------------------------------------
# task matching
# ---------------------------------------------------------------------------

_VERB_CLASS = {
    Verb.OBTAIN: "acquire",
    Verb.MINE: "acquire",
    Verb.CRAFT: "craft",
    Verb.SMELT: "smelt",
    Verb.PLACE: "place",
    Verb.EXPLORE: "explore",
}


def task_match(a: Task, b: Task) -> bool:
    """Same task type on the same item type; counts ignored.

    Obtain and mine are both acquisition; item classes merge species
    variants and block-vs-drop naming.
    """
    from craftbench.craftworld.items import item_class

    return _VERB_CLASS[a.verb] == _VERB_CLASS[b.verb] and item_class(
        a.item
    ) == item_class(b.item)


@dataclass(frozen=True)
class MatchStats:
    pairs_total: int
    pairs_matched: int
    excluded: int  # duals without a parsed Response2

    @property
    def rate(self) -> float:
        return self.pairs_matched / self.pairs_total


def match_rate(duals) -> MatchStats:
    """Match rate over duals carrying both responses.

    Duals without a Response2 (conventional outputs, parse failures) are
    excluded from the denominator and reported via ``excluded``.
    """
    total = matched = excluded = 0
    for dual in duals:
        if dual is None or dual.response2 is None:
            excluded += 1
            continue
        total += 1
        if task_match(dual.response1.task, dual.response2[0].task):
            matched += 1
    if total == 0:
        raise StatsError("match_rate: no dual carries both responses")
    return MatchStats(pairs_total=total, pairs_matched=matched, excluded=excluded)


# ---------------------------------------------------------------------------
# milestones
# ---------------------------------------------------------------------------

DEFAULT_MILESTONES = (
    "wooden_pickaxe",
    "stone_pickaxe",
    "furnace",
    "iron_pickaxe",
    "gold_ingot",
    "golden_pickaxe",
)


def milestone_check(state, milestones, achieved: set[str]) -> set[str]:
    """Milestones newly reached: first time the item count goes >= 1."""
    new = {
        item
        for item in milestones
        if item not in achieved and state.inventory.get(item, 0) >= 1
    }
    return new
