"""Experiment runner: wires world, perception, curriculum and planner."""

from craftbench.harness.config import ARMS, TrialConfig
from craftbench.harness.experiment import run_experiment
from craftbench.harness.metrics import MilestoneTable, aggregate
from craftbench.harness.replay import DivergenceReport, replay
from craftbench.harness.report import export_report
from craftbench.harness.trial import TrialRecord, run_trial

__all__ = [
    "ARMS",
    "DivergenceReport",
    "MilestoneTable",
    "TrialConfig",
    "TrialRecord",
    "aggregate",
    "export_report",
    "replay",
    "run_experiment",
    "run_trial",
]
