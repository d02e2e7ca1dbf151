"""Command-line interface: run experiments, build reports, replay transcripts.

Exit codes: 0 success, 1 configuration error, 2 backend failure,
3 divergence on strict replay.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from craftbench.errors import ConfigError, CraftBenchError, PlaybackError
from craftbench.harness.config import ARMS, apply_config_file, for_arm
from craftbench.harness.experiment import run_experiment
from craftbench.harness.metrics import aggregate
from craftbench.harness.replay import replay
from craftbench.harness.report import export_report
from craftbench.harness.trial import TrialRecord
from craftbench.planner.http import EndpointConfig, HttpBackend
from craftbench.planner.oracle import OracleBackend

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_BACKEND = 2
EXIT_DIVERGENCE = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="craftbench",
        description="Crafting-world curriculum benchmark harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run trials for one experiment arm")
    run.add_argument("--arm", required=True, choices=sorted(ARMS))
    run.add_argument("--seed", type=int, default=7)
    run.add_argument("--trials", type=int, default=3)
    run.add_argument("--backend", choices=("oracle", "http"), default="oracle")
    run.add_argument("--cap", type=int, default=70, help="max iterations per trial")
    run.add_argument("--step-budget", type=int, default=600)
    run.add_argument("--out-dir", required=True)
    run.add_argument("--parallelism", type=int, default=1)
    run.add_argument("--config", help="JSON config file; overrides flags")

    report = sub.add_parser("report", help="aggregate transcripts into reports")
    report.add_argument("--in-dir", required=True)
    report.add_argument("--format", choices=("csv", "json", "both"), default="both")
    report.add_argument("--out-dir", help="defaults to --in-dir")

    rep = sub.add_parser("replay", help="re-execute a recorded transcript")
    rep.add_argument("--transcript", required=True)
    rep.add_argument("--strict", action="store_true")
    return parser


def _backend_factory(args, config):
    if args.backend == "oracle":
        backend = OracleBackend()
        return lambda: backend
    endpoint = EndpointConfig(url="", model="")
    if args.config:
        raw = json.loads(Path(args.config).read_text())
        if "endpoint" not in raw:
            raise ConfigError("http backend requires an 'endpoint' config section")
        endpoint = EndpointConfig(**raw["endpoint"])
    if not endpoint.url or not endpoint.model:
        raise ConfigError("http backend requires endpoint url and model")
    shared = HttpBackend(endpoint)  # shared: one in-flight cap across trials
    return lambda: shared


def _cmd_run(args) -> int:
    try:
        config = for_arm(
            args.arm,
            seed=args.seed,
            trials=args.trials,
            backend=args.backend,
            max_iterations=args.cap,
            step_budget=args.step_budget,
        )
        if args.config:
            config = apply_config_file(config, args.config)
        factory = _backend_factory(args, config)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    records = run_experiment(
        [config], factory, parallelism=args.parallelism, out_dir=args.out_dir
    )
    aborted = [r for r in records if r.aborted]
    for record in records:
        status = "aborted" if record.aborted else (
            "goal" if record.reached_goal else "capped"
        )
        print(
            f"arm {record.config.arm} seed {record.config.seed}: {status} "
            f"after {record.iterations_used} iterations"
        )
    if aborted:
        print(f"{len(aborted)} trial(s) aborted on backend failure", file=sys.stderr)
        return EXIT_BACKEND
    return EXIT_OK


def _cmd_report(args) -> int:
    in_dir = Path(args.in_dir)
    transcripts = sorted(in_dir.glob("**/trial-*.jsonl"))
    if not transcripts:
        print(f"no transcripts under {in_dir}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        records = [TrialRecord.from_transcript(p) for p in transcripts]
        table = aggregate(records)
    except CraftBenchError as exc:
        print(f"cannot aggregate: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    formats = ("csv", "json") if args.format == "both" else (args.format,)
    out_dir = Path(args.out_dir) if args.out_dir else in_dir
    for path in export_report(table, out_dir, formats):
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_replay(args) -> int:
    try:
        _, report = replay(args.transcript, strict=args.strict)
    except PlaybackError as exc:
        print(f"replay failed: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE if args.strict else EXIT_BACKEND
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if report.clean:
        print("replay clean: no divergences")
        return EXIT_OK
    first = report.first
    if first is not None:
        print(
            f"divergence at iteration {first.iteration} ({first.what}): "
            f"recorded={first.recorded!r} replayed={first.replayed!r}",
            file=sys.stderr,
        )
    if report.prompt_mismatches:
        print(
            f"{report.prompt_mismatches} prompt hash mismatch(es)", file=sys.stderr
        )
    return EXIT_DIVERGENCE if args.strict else EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "report":
        return _cmd_report(args)
    return _cmd_replay(args)


if __name__ == "__main__":
    sys.exit(main())
