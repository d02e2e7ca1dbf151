"""Batched trials: derived seeds, optional parallelism, isolated worlds."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

from craftbench.harness.config import TrialConfig
from craftbench.harness.trial import TrialRecord, run_trial


def run_experiment(
    configs,
    backend_factory,
    *,
    parallelism: int = 1,
    out_dir: str | Path | None = None,
    recipes=None,
) -> list[TrialRecord]:
    """Run every config's trials; results ordered by (arm, trial index).

    Trial ``i`` of a config runs on seed ``config.seed + i`` in its own
    world. ``backend_factory`` is called once per trial so stateful backends
    stay trial-local; deterministic backends make the result set identical
    for every parallelism degree. A trial that raises is recorded as aborted
    and the experiment continues.
    """
    jobs: list[tuple[TrialConfig, int]] = []
    for config in configs:
        config.validate()
        for index in range(config.trials):
            jobs.append((replace(config, seed=config.seed + index), index))

    def run_one(job) -> TrialRecord:
        config, index = job
        path = None
        if out_dir is not None:
            path = Path(out_dir) / config.arm / f"trial-{index}.jsonl"
        try:
            return run_trial(
                config,
                backend_factory(),
                transcript_path=path,
                recipes=recipes,
            )
        except Exception:
            failed = TrialRecord(config=config, aborted=True)
            failed.milestone_first_hit = {m: None for m in config.milestones}
            return failed

    if parallelism <= 1:
        records = [run_one(job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            records = list(pool.map(run_one, jobs))

    paired = sorted(zip(jobs, records), key=lambda jr: (jr[0][0].arm, jr[0][1]))
    return [record for _, record in paired]
