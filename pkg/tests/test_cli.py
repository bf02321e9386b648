import json
from collections import Counter

import pytest

from rlinspect.cli import main
from rlinspect.data_handler import open_writer

from conftest import DEMO_CONFIG, make_header


def run_cli(args):
    return main(args)


class TestDemoCommand:
    def test_demo_writes_trace(self, tmp_path):
        out = tmp_path / "trace.jsonl"
        rc = run_cli(
            ["demo", "--seed", "1", "--episodes", "3", "--probe-k", "2", "--out", str(out)]
        )
        assert rc == 0
        first = json.loads(out.read_text().splitlines()[0])
        assert first["type"] == "header"
        assert first["run_id"] == "cartpole-demo-seed1-ep3"

    def test_demo_fault_flag(self, tmp_path):
        out = tmp_path / "trace.jsonl"
        rc = run_cli(
            [
                "demo",
                "--seed",
                "1",
                "--episodes",
                "4",
                "--snapshot-every",
                "1",
                "--out",
                str(out),
                "--fault",
                "vanishing:5..20",
            ]
        )
        assert rc == 0

    def test_demo_bad_fault_exits_2(self, tmp_path):
        rc = run_cli(
            ["demo", "--seed", "1", "--episodes", "2", "--out", str(tmp_path / "t.jsonl"),
             "--fault", "meltdown:3"]
        )
        assert rc == 2


class TestAnalyzeCommand:
    def test_module_filter_two_sections(self, demo_trace, tmp_path):
        out = tmp_path / "r.html"
        json_out = tmp_path / "r.json"
        rc = run_cli(
            [
                "analyze",
                "--trace",
                demo_trace,
                "--out",
                str(out),
                "--json-out",
                str(json_out),
                "--modules",
                "reward,loss",
                "--timestamp",
                "0",
            ]
        )
        assert rc == 0
        data = json.loads(json_out.read_text())
        assert [s["analyzer"] for s in data["sections"]] == ["reward", "loss"]

    def test_unknown_module_exits_2(self, demo_trace, tmp_path, capsys):
        with pytest.raises(SystemExit) as exc:
            run_cli(
                ["analyze", "--trace", demo_trace, "--out", str(tmp_path / "r.html"),
                 "--modules", "reward,telemetry"]
            )
        assert exc.value.code == 2
        assert "usage" in capsys.readouterr().err

    def test_missing_trace_exits_1(self, tmp_path):
        rc = run_cli(["analyze", "--trace", str(tmp_path / "absent.jsonl"), "--out", str(tmp_path / "r.html")])
        assert rc == 1

    def test_unwritable_out_exits_1(self, demo_trace, tmp_path):
        rc = run_cli(
            ["analyze", "--trace", demo_trace, "--out", str(tmp_path / "no" / "dir" / "r.html")]
        )
        assert rc == 1

    def test_malformed_trace_names_line(self, tmp_path, capsys):
        path = tmp_path / "bad.jsonl"
        with open_writer(str(path), make_header()):
            pass
        with open(path, "a") as fh:
            fh.write("NOT JSON\n")
        rc = run_cli(["analyze", "--trace", str(path), "--out", str(tmp_path / "r.html")])
        assert rc == 1
        assert "line 2" in capsys.readouterr().err


class TestInspectCommand:
    def test_counts_match_line_tally(self, demo_trace, capsys):
        rc = run_cli(["inspect", "--trace", demo_trace, "--format", "json"])
        assert rc == 0
        summary = json.loads(capsys.readouterr().out)

        tally = Counter()
        with open(demo_trace) as fh:
            for line in fh:
                tally[json.loads(line)["type"]] += 1
        for kind in ("state_visit", "action_probe", "step_reward", "layer_snapshot", "loss"):
            assert summary["events"][kind] == tally[kind]
        assert summary["episode_count"] == DEMO_CONFIG.episodes

    def test_json_contains_all_fields(self, demo_trace, capsys):
        run_cli(["inspect", "--trace", demo_trace, "--format", "json"])
        summary = json.loads(capsys.readouterr().out)
        assert set(summary) == {"run_id", "events", "episode_count", "update_count", "flags"}
        assert set(summary["flags"]) == {"vanishing_gradient", "exploding_gradient", "divergence_spike"}

    def test_header_only_trace_zero_counts(self, tmp_path, capsys):
        path = tmp_path / "empty.jsonl"
        with open_writer(str(path), make_header()):
            pass
        rc = run_cli(["inspect", "--trace", str(path), "--format", "json"])
        assert rc == 0
        summary = json.loads(capsys.readouterr().out)
        assert all(v == 0 for v in summary["events"].values())
        assert summary["episode_count"] == 0

    def test_text_format(self, demo_trace, capsys):
        rc = run_cli(["inspect", "--trace", demo_trace])
        assert rc == 0
        out = capsys.readouterr().out
        assert "events:" in out and "flags:" in out
