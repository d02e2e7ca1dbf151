"""CLI surface: subcommands, exit codes, artifacts on disk."""

from __future__ import annotations

import json

import pytest

from craftbench.harness.cli import (
    EXIT_BACKEND,
    EXIT_CONFIG,
    EXIT_DIVERGENCE,
    EXIT_OK,
    main,
)


class TestRunCommand:
    def test_oracle_run_writes_transcripts(self, tmp_path, capsys):
        out = tmp_path / "runs"
        code = main(
            [
                "run", "--arm", "2-2", "--backend", "oracle", "--seed", "7",
                "--trials", "2", "--cap", "40", "--out-dir", str(out),
            ]
        )
        assert code == EXIT_OK
        transcripts = sorted(out.glob("2-2/trial-*.jsonl"))
        assert len(transcripts) == 2
        assert "goal" in capsys.readouterr().out

    def test_bad_arm_is_config_error(self, tmp_path):
        with pytest.raises(SystemExit):
            main(["run", "--arm", "9-9", "--out-dir", str(tmp_path)])

    def test_http_without_endpoint_is_config_error(self, tmp_path, capsys):
        code = main(
            [
                "run", "--arm", "2-1", "--backend", "http",
                "--out-dir", str(tmp_path),
            ]
        )
        assert code == EXIT_CONFIG
        assert "endpoint" in capsys.readouterr().err

    def test_backend_failure_exit_code(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(
            json.dumps(
                {
                    "endpoint": {
                        "url": "http://127.0.0.1:1/unreachable",
                        "model": "m",
                        "retries": 0,
                        "timeout_s": 0.2,
                    },
                    "trial": {"max_iterations": 2, "trials": 1},
                }
            )
        )
        code = main(
            [
                "run", "--arm", "2-1", "--backend", "http",
                "--out-dir", str(tmp_path / "runs"), "--config", str(cfg),
            ]
        )
        assert code == EXIT_BACKEND

    def test_config_file_overrides_flags(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"trial": {"max_iterations": 1, "trials": 1}}))
        out = tmp_path / "runs"
        code = main(
            [
                "run", "--arm", "2-1", "--seed", "7", "--trials", "3",
                "--cap", "50", "--out-dir", str(out), "--config", str(cfg),
            ]
        )
        assert code == EXIT_OK
        assert len(list(out.glob("2-1/trial-*.jsonl"))) == 1
        assert "after 1 iterations" in capsys.readouterr().out


class TestReportCommand:
    def test_report_over_run_dir(self, tmp_path, capsys):
        out = tmp_path / "runs"
        main(
            [
                "run", "--arm", "2-2", "--seed", "7", "--trials", "1",
                "--cap", "40", "--out-dir", str(out),
            ]
        )
        code = main(["report", "--in-dir", str(out), "--format", "both"])
        assert code == EXIT_OK
        assert (out / "report.csv").exists()
        assert (out / "report.json").exists()

    def test_empty_dir_is_config_error(self, tmp_path, capsys):
        code = main(["report", "--in-dir", str(tmp_path)])
        assert code == EXIT_CONFIG


class TestReplayCommand:
    def _run_once(self, tmp_path):
        out = tmp_path / "runs"
        main(
            [
                "run", "--arm", "2-2", "--seed", "7", "--trials", "1",
                "--cap", "40", "--out-dir", str(out),
            ]
        )
        return next(out.glob("2-2/trial-*.jsonl"))

    def test_clean_replay(self, tmp_path, capsys):
        transcript = self._run_once(tmp_path)
        code = main(["replay", "--transcript", str(transcript), "--strict"])
        assert code == EXIT_OK
        assert "clean" in capsys.readouterr().out

    def test_strict_divergence_exit_code(self, tmp_path, capsys):
        transcript = self._run_once(tmp_path)
        lines = transcript.read_text().splitlines()
        body = json.loads(lines[2])
        body["adopted"] = {"verb": "explore", "item": "area", "count": 1}
        lines[2] = json.dumps(body, sort_keys=True)
        transcript.write_text("\n".join(lines) + "\n")
        code = main(["replay", "--transcript", str(transcript), "--strict"])
        assert code == EXIT_DIVERGENCE
        assert "divergence at iteration 2" in capsys.readouterr().err
