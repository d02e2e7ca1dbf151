"""Task grammar, prompt assembly, dual-response parsing, match metric."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from craftbench.craftworld.items import TASK_ITEMS
from craftbench.craftworld.task import Task, Verb
from craftbench.curriculum import (
    CONVENTIONAL,
    DEFAULT_MILESTONES,
    DualProposal,
    HistoryEntry,
    MatchStats,
    PREDICTIVE,
    TaskProposal,
    adopt,
    build_prompt,
    match_rate,
    milestone_check,
    parse_planner_output,
    parse_task_sentence,
    render_task,
    task_match,
)
from craftbench.errors import AdoptError, ParseError, StatsError
from craftbench.perception import observe_cheat, render_frame, encode_elements

TABLE_PROPOSAL_WOOD = """Reasoning: The main goal is to create a golden pickaxe. One of the essential steps in this process is to have the necessary crafting tools, such as a crafting table and sticks for crafting. Currently, we are in a forested area with spruce trees, which provides an opportunity to gather wood.

Task: Obtain a wood log.
"""

TABLE_PROPOSAL_SMELT = """Reasoning: The player has mined gold ore but has not smelted it yet. Since the player's ultimate goal is to create a golden pickaxe, they need to smelt the gold ore to obtain gold ingots. The player has a furnace in their inventory, so they can use it to smelt the gold ore.

Task: Smelt 3 raw gold.
"""

TABLE_PROPOSAL_PLACE = """Reasoning: The player has raw gold and sticks in the inventory, and a furnace. The player can smelt the raw gold into gold ingots using the furnace, and then use the gold ingots and sticks to craft a golden pickaxe.

Task: Place the furnace.
"""


class TestTaskSentences:
    @pytest.mark.parametrize(
        "text,expected",
        [
            ("Obtain a wood log.", Task(Verb.OBTAIN, "wood_log", 1)),
            ("Smelt 3 raw gold.", Task(Verb.SMELT, "raw_gold", 3)),
            ("Place the furnace.", Task(Verb.PLACE, "furnace", 1)),
            ("Craft 1 golden pickaxe.", Task(Verb.CRAFT, "golden_pickaxe", 1)),
            ("mine 5 iron ore", Task(Verb.MINE, "iron_ore", 5)),
            ("Obtain an oak log", Task(Verb.OBTAIN, "oak_log", 1)),
            ("Craft 4 sticks", Task(Verb.CRAFT, "stick", 4)),
            ("Explore the area.", Task(Verb.EXPLORE, "area", 1)),
        ],
    )
    def test_parse_examples(self, text, expected):
        assert parse_task_sentence(text) == expected

    def test_unknown_verb(self):
        with pytest.raises(ParseError) as err:
            parse_task_sentence("Destroy 3 furnaces")
        assert err.value.code == "unknown_verb"

    def test_unknown_item(self):
        with pytest.raises(ParseError) as err:
            parse_task_sentence("Craft 1 diamond sword")
        assert err.value.code == "unknown_item"

    @given(
        verb=st.sampled_from([v for v in Verb if v is not Verb.EXPLORE]),
        item=st.sampled_from([i for i in TASK_ITEMS if i != "area"]),
        count=st.integers(min_value=1, max_value=64),
    )
    @settings(max_examples=200)
    def test_render_parse_round_trip(self, verb, item, count):
        task = Task(verb, item, count)
        assert parse_task_sentence(render_task(task)) == task

    def test_explore_round_trip(self):
        task = Task(Verb.EXPLORE, "area", 1)
        assert parse_task_sentence(render_task(task)) == task


class TestParsePlannerOutput:
    def test_table_text_wood(self):
        dual = parse_planner_output(TABLE_PROPOSAL_WOOD, CONVENTIONAL)
        assert dual.response1.task == Task(Verb.OBTAIN, "wood_log", 1)
        assert dual.response2 is None
        assert dual.response1.reasoning.startswith("The main goal")

    def test_table_text_smelt(self):
        dual = parse_planner_output(TABLE_PROPOSAL_SMELT, CONVENTIONAL)
        assert dual.response1.task == Task(Verb.SMELT, "raw_gold", 3)

    def test_table_text_place(self):
        dual = parse_planner_output(TABLE_PROPOSAL_PLACE, CONVENTIONAL)
        assert dual.response1.task == Task(Verb.PLACE, "furnace", 1)

    def test_missing_task_line(self):
        with pytest.raises(ParseError) as err:
            parse_planner_output("Reasoning: nothing to see here.", CONVENTIONAL)
        assert err.value.code == "missing_task"

    def test_predictive_requires_response2(self):
        with pytest.raises(ParseError) as err:
            parse_planner_output(TABLE_PROPOSAL_SMELT, PREDICTIVE)
        assert err.value.code in ("missing_response1", "missing_response2")

    def test_full_dual_output(self):
        text = """Response1:
Reasoning: materials first.
Task: Smelt 3 raw gold.

Response2:
Steps:
1. Task: Place the furnace. Predicted State: furnace placed next to the player. Risks: none.
2. Task: Smelt 3 raw gold. Predicted State: 3 gold ingots in inventory. Risks: needs fuel.
Reasoning: the furnace must come first.
Task: Place the furnace.
"""
        dual = parse_planner_output(text, PREDICTIVE)
        assert dual.response1.task == Task(Verb.SMELT, "raw_gold", 3)
        proposal, plan = dual.response2
        assert proposal.task == Task(Verb.PLACE, "furnace", 1)
        assert plan.tasks == (
            Task(Verb.PLACE, "furnace", 1),
            Task(Verb.SMELT, "raw_gold", 3),
        )
        assert plan.steps[1].risks == "needs fuel"

    def test_predictive_empty_steps(self):
        text = """Response1:
Task: Obtain a wood log.

Response2:
Steps:
Reasoning: none.
Task: Obtain a wood log.
"""
        with pytest.raises(ParseError) as err:
            parse_planner_output(text, PREDICTIVE)
        assert err.value.code == "empty_steps"

    def test_labels_case_and_whitespace_tolerant(self):
        text = "  REASONING:  because.\n  TASK :  Craft 1 furnace.  "
        dual = parse_planner_output(text, CONVENTIONAL)
        assert dual.response1.task == Task(Verb.CRAFT, "furnace", 1)


class TestAdopt:
    def _dual(self, t1: Task, t2: Task | None):
        from craftbench.curriculum import PlanStep, PredictionPlan

        r2 = None
        if t2 is not None:
            r2 = (
                TaskProposal("r2", t2),
                PredictionPlan((PlanStep(t2, "", ""),)),
            )
        return DualProposal(response1=TaskProposal("r1", t1), response2=r2)

    def test_conventional_takes_response1(self):
        dual = self._dual(
            Task(Verb.SMELT, "raw_gold", 3), Task(Verb.PLACE, "furnace", 1)
        )
        assert adopt(dual, CONVENTIONAL).task == Task(Verb.SMELT, "raw_gold", 3)

    def test_predictive_takes_response2(self):
        dual = self._dual(
            Task(Verb.SMELT, "raw_gold", 3), Task(Verb.PLACE, "furnace", 1)
        )
        assert adopt(dual, PREDICTIVE).task == Task(Verb.PLACE, "furnace", 1)

    def test_agreeing_dual_either_mode(self):
        task = Task(Verb.CRAFT, "stick", 4)
        dual = self._dual(task, task)
        assert adopt(dual, CONVENTIONAL).task == task
        assert adopt(dual, PREDICTIVE).task == task

    def test_predictive_without_response2(self):
        dual = self._dual(Task(Verb.CRAFT, "stick", 4), None)
        with pytest.raises(AdoptError):
            adopt(dual, PREDICTIVE)

    @given(
        t1=st.sampled_from(
            [Task(Verb.MINE, "stone", 2), Task(Verb.CRAFT, "stick", 4)]
        ),
        t2=st.sampled_from(
            [Task(Verb.MINE, "stone", 2), Task(Verb.CRAFT, "stick", 4)]
        ),
    )
    def test_adoptions_differ_exactly_when_tasks_differ(self, t1, t2):
        dual = self._dual(t1, t2)
        differs = adopt(dual, CONVENTIONAL).task != adopt(dual, PREDICTIVE).task
        assert differs == (t1 != t2)


class TestTaskMatch:
    def test_smelt_vs_place_differ(self):
        assert not task_match(
            Task(Verb.SMELT, "raw_gold", 3), Task(Verb.PLACE, "furnace", 1)
        )

    def test_counts_ignored(self):
        assert task_match(
            Task(Verb.MINE, "iron_ore", 3), Task(Verb.MINE, "iron_ore", 5)
        )

    def test_reflexive(self):
        task = Task(Verb.CRAFT, "furnace", 1)
        assert task_match(task, task)

    def test_obtain_and_mine_merge(self):
        assert task_match(
            Task(Verb.OBTAIN, "wood_log", 1), Task(Verb.MINE, "spruce_log", 2)
        )

    def test_block_and_drop_merge(self):
        assert task_match(
            Task(Verb.MINE, "iron_ore", 3), Task(Verb.OBTAIN, "raw_iron", 3)
        )

    @given(
        a=st.sampled_from(
            [
                Task(Verb.MINE, "iron_ore", 1),
                Task(Verb.SMELT, "raw_gold", 3),
                Task(Verb.PLACE, "furnace", 1),
                Task(Verb.OBTAIN, "wood_log", 2),
            ]
        ),
        b=st.sampled_from(
            [
                Task(Verb.MINE, "iron_ore", 5),
                Task(Verb.SMELT, "raw_gold", 1),
                Task(Verb.CRAFT, "stick", 4),
            ]
        ),
    )
    def test_symmetric(self, a, b):
        assert task_match(a, b) == task_match(b, a)


class TestMatchRate:
    def _dual(self, t1, t2):
        from craftbench.curriculum import PlanStep, PredictionPlan

        return DualProposal(
            response1=TaskProposal("", t1),
            response2=(
                TaskProposal("", t2),
                PredictionPlan((PlanStep(t2, "", ""),)),
            ),
        )

    def test_one_of_four(self):
        same = Task(Verb.CRAFT, "stick", 4)
        duals = [
            self._dual(same, same),
            self._dual(Task(Verb.SMELT, "raw_gold", 3), Task(Verb.PLACE, "furnace", 1)),
            self._dual(Task(Verb.MINE, "stone", 3), Task(Verb.CRAFT, "furnace", 1)),
            self._dual(Task(Verb.OBTAIN, "wood_log", 1), Task(Verb.CRAFT, "planks", 4)),
        ]
        stats = match_rate(duals)
        assert stats == MatchStats(pairs_total=4, pairs_matched=1, excluded=0)
        assert stats.rate == 0.25

    def test_all_identical(self):
        task = Task(Verb.MINE, "iron_ore", 3)
        duals = [self._dual(task, task) for _ in range(5)]
        assert match_rate(duals).rate == 1.0

    def test_zero_eligible_raises(self):
        duals = [DualProposal(response1=TaskProposal("", Task(Verb.CRAFT, "stick", 4)))]
        with pytest.raises(StatsError):
            match_rate(duals)

    def test_excluded_counted(self):
        task = Task(Verb.CRAFT, "stick", 4)
        duals = [
            self._dual(task, task),
            DualProposal(response1=TaskProposal("", task)),
            None,
        ]
        stats = match_rate(duals)
        assert stats.pairs_total == 1 and stats.excluded == 2


class TestBuildPrompt:
    def test_conventional_has_no_response2_block(self, world7):
        obs = observe_cheat(world7)
        bundle = build_prompt(obs, None, (), "craft a golden pickaxe", CONVENTIONAL)
        assert "Response2" not in bundle.system_text
        assert "Inventory (0/36)" in bundle.user_text
        assert "Final goal: craft a golden pickaxe." in bundle.user_text
        assert bundle.attachment is None

    def test_predictive_differs_only_in_instructions(self, world7):
        obs = observe_cheat(world7)
        conventional = build_prompt(obs, None, (), "craft a golden pickaxe", CONVENTIONAL)
        predictive = build_prompt(obs, None, (), "craft a golden pickaxe", PREDICTIVE)
        assert "Response2" in predictive.system_text
        assert conventional.user_text == predictive.user_text

    def test_element_vision_renders_four_lines(self, world7):
        obs = observe_cheat(world7)
        report = encode_elements(render_frame(world7))
        bundle = build_prompt(obs, report, (), "goal", CONVENTIONAL)
        for label in ("Biome:", "Time:", "Nearby blocks:", "Nearby entities:"):
            assert label in bundle.user_text

    def test_direct_vision_attaches_frame(self, world7):
        obs = observe_cheat(world7)
        frame = render_frame(world7)
        bundle = build_prompt(obs, frame, (), "goal", CONVENTIONAL)
        assert bundle.attachment == frame
        assert "frame attached" in bundle.user_text

    def test_history_sections(self, world7):
        obs = observe_cheat(world7)
        history = (
            HistoryEntry(Task(Verb.OBTAIN, "wood_log", 1), True),
            HistoryEntry(
                Task(Verb.SMELT, "raw_gold", 3), False, "no_station_placed"
            ),
        )
        bundle = build_prompt(obs, None, history, "goal", CONVENTIONAL)
        assert "- Obtain a wood log" in bundle.user_text
        assert "- Smelt 3 raw gold (failed: no station placed)" in bundle.user_text

    def test_empty_goal_rejected(self, world7):
        with pytest.raises(ValueError):
            build_prompt(observe_cheat(world7), None, (), "", CONVENTIONAL)


class TestMilestones:
    def test_first_hit(self, world7):
        state = world7.evolve(inventory={"wooden_pickaxe": 1})
        assert milestone_check(state, DEFAULT_MILESTONES, set()) == {"wooden_pickaxe"}

    def test_no_change(self, world7):
        state = world7.evolve(inventory={"wooden_pickaxe": 1})
        assert milestone_check(state, DEFAULT_MILESTONES, {"wooden_pickaxe"}) == set()

    def test_goal_milestone(self, world7):
        state = world7.evolve(inventory={"golden_pickaxe": 1})
        achieved = {"wooden_pickaxe", "stone_pickaxe"}
        assert milestone_check(state, DEFAULT_MILESTONES, achieved) == {
            "golden_pickaxe"
        }
