"""Aggregation: per-arm milestone means, match rates, extraction rates.

Means run over achieved trials only; censored milestones (not reached within
the cap) stay out of the mean and show up through achieved/total counts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from craftbench.curriculum import MatchStats, task_match
from craftbench.errors import StatsError
from craftbench.harness.trial import TrialRecord
from craftbench.perception import ExtractionStats
from craftbench.planner.transcript import dual_from_json


@dataclass(frozen=True)
class MilestoneCell:
    mean_iterations: float | None  # None when no trial achieved it
    achieved: int
    total: int

    def rendered_mean(self) -> str:
        if self.mean_iterations is None:
            return "—"
        return f"{self.mean_iterations:.2f}"


@dataclass
class ArmStats:
    milestones: dict[str, MilestoneCell] = field(default_factory=dict)
    match: MatchStats | None = None
    extraction: ExtractionStats | None = None
    trials: int = 0
    reached_goal: int = 0
    aborted: int = 0


@dataclass
class MilestoneTable:
    arms: dict[str, ArmStats] = field(default_factory=dict)
    milestones: tuple[str, ...] = ()
    notes: tuple[str, ...] = (
        "means computed over achieved trials only; censored milestones are "
        "disclosed as achieved/total",
    )


def _match_stats(records: list[TrialRecord]) -> MatchStats | None:
    duals = []
    for record in records:
        for rec in record.iterations:
            duals.append(dual_from_json(rec.parsed))
    try:
        return match_rate_over(duals)
    except StatsError:
        return None


def match_rate_over(duals) -> MatchStats:
    total = matched = excluded = 0
    for dual in duals:
        if dual is None or dual.response2 is None:
            excluded += 1
            continue
        total += 1
        if task_match(dual.response1.task, dual.response2[0].task):
            matched += 1
    if total == 0:
        raise StatsError("no duals with both responses")
    return MatchStats(pairs_total=total, pairs_matched=matched, excluded=excluded)


def _extraction_stats(records: list[TrialRecord]) -> ExtractionStats | None:
    tallies: dict[str, list[int]] = {}
    for record in records:
        for rec in record.iterations:
            for fieldname, is_na in rec.vision_na.items():
                hit_total = tallies.setdefault(fieldname, [0, 0])
                hit_total[0] += 0 if is_na else 1
                hit_total[1] += 1
    if not tallies:
        return None
    return ExtractionStats(
        counts=tuple(sorted((k, (v[0], v[1])) for k, v in tallies.items()))
    )


def aggregate(records) -> MilestoneTable:
    """Build the per-arm milestone table from trial records."""
    records = list(records)
    if not records:
        raise StatsError("aggregate over zero records")
    by_arm: dict[str, list[TrialRecord]] = {}
    for record in records:
        by_arm.setdefault(record.config.arm, []).append(record)

    milestones = records[0].config.milestones
    table = MilestoneTable(milestones=milestones)
    for arm, arm_records in sorted(by_arm.items()):
        stats = ArmStats(trials=len(arm_records))
        stats.reached_goal = sum(1 for r in arm_records if r.reached_goal)
        stats.aborted = sum(1 for r in arm_records if r.aborted)
        for milestone in milestones:
            hits = [
                r.milestone_first_hit.get(milestone)
                for r in arm_records
                if r.milestone_first_hit.get(milestone) is not None
            ]
            stats.milestones[milestone] = MilestoneCell(
                mean_iterations=(sum(hits) / len(hits)) if hits else None,
                achieved=len(hits),
                total=len(arm_records),
            )
        stats.match = _match_stats(arm_records)
        stats.extraction = _extraction_stats(arm_records)
        table.arms[arm] = stats
    return table
