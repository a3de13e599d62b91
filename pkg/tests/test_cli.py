import json

import pytest

from silentcrash.cli import main

MINI_CONFIG = {
    "kinds": ["FLB"],
    "mutator": "guided",
    "budget": 50,
    "rng_seed": 5,
    "plans": {
        "FLB": {
            "distance_schedule": [4, 5, 6, 7],
            "speed_start": 10.0,
            "speed_step": 10.0,
            "angle_step_long": 0.04,
            "angle_step_lat": 0.03,
        }
    },
}


def write_config(tmp_path, data, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data, indent=1))
    return path


def run_mini(tmp_path, budget=50, out="out"):
    config = dict(MINI_CONFIG, budget=budget)
    path = write_config(tmp_path, config)
    out_dir = tmp_path / out
    code = main(["run", "--config", str(path), "--out", str(out_dir)])
    return code, out_dir


class TestRun:
    def test_budget_is_respected_exactly(self, tmp_path, capsys):
        code, out_dir = run_mini(tmp_path)
        assert code == 0
        lines = (out_dir / "records.jsonl").read_text().splitlines()
        assert len(lines) == 50
        assert "FLB:" in capsys.readouterr().out

    def test_outputs_include_manifest_and_report(self, tmp_path):
        _, out_dir = run_mini(tmp_path)
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert manifest["executions"] == 50
        assert manifest["budget"] == 50
        assert set(manifest["totals"]) == {"IC", "DC", "NC", "FP"}
        assert (out_dir / "report.csv").read_text().startswith("axis,bucket,")
        assert (out_dir / "report_cross.csv").exists()

    def test_out_of_range_distance_names_the_range(self, tmp_path, capsys):
        bad = dict(MINI_CONFIG)
        bad["plans"] = {"FLB": {"distance_schedule": [2, 9]}}
        path = write_config(tmp_path, bad)
        code = main(["run", "--config", str(path), "--out", str(tmp_path / "o")])
        assert code == 1
        assert "2..7" in capsys.readouterr().err

    def test_unknown_config_key_is_a_config_error(self, tmp_path, capsys):
        path = write_config(tmp_path, dict(MINI_CONFIG, weather="rain"))
        assert main(["run", "--config", str(path), "--out", str(tmp_path / "o")]) == 1
        assert "weather" in capsys.readouterr().err

    def test_missing_config_file_is_io_error(self, tmp_path):
        assert main(["run", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path / "o")]) == 2

    def test_rerun_is_byte_identical(self, tmp_path):
        _, first = run_mini(tmp_path, out="a")
        _, second = run_mini(tmp_path, out="b")
        assert (first / "records.jsonl").read_bytes() == (second / "records.jsonl").read_bytes()
        assert (first / "manifest.json").read_bytes() == (second / "manifest.json").read_bytes()
        assert (first / "report.csv").read_bytes() == (second / "report.csv").read_bytes()

    def test_config_digest_tracks_file_bytes(self, tmp_path):
        path_a = write_config(tmp_path, MINI_CONFIG, "a.json")
        path_b = tmp_path / "b.json"
        path_b.write_text(path_a.read_text() + "\n")
        main(["run", "--config", str(path_a), "--out", str(tmp_path / "da")])
        main(["run", "--config", str(path_b), "--out", str(tmp_path / "db")])
        da = json.loads((tmp_path / "da" / "manifest.json").read_text())
        db = json.loads((tmp_path / "db" / "manifest.json").read_text())
        assert da["config_digest"] != db["config_digest"]
        assert da["totals"] == db["totals"]


class TestReplay:
    @pytest.fixture()
    def campaign(self, tmp_path):
        code, out_dir = run_mini(tmp_path, budget=300)
        assert code == 0
        return out_dir

    def test_replay_reproduces_logged_verdict(self, campaign, capsys):
        records = [json.loads(l) for l in (campaign / "records.jsonl").read_text().splitlines()]
        ics = [r for r in records if r["verdict"] == "IC"]
        assert ics, "campaign should contain at least one ignored collision"
        code = main(["replay", "--log", str(campaign / "records.jsonl"), "--ordinal", str(ics[0]["ordinal"])])
        assert code == 0
        out = capsys.readouterr().out
        assert "verdict=IC" in out
        assert (campaign / f"trace_{ics[0]['ordinal']}.jsonl").exists()

    def test_replay_with_perfect_detector_never_reports_ic(self, campaign, capsys):
        records = [json.loads(l) for l in (campaign / "records.jsonl").read_text().splitlines()]
        ics = [r for r in records if r["verdict"] == "IC"]
        code = main(
            [
                "replay",
                "--log",
                str(campaign / "records.jsonl"),
                "--ordinal",
                str(ics[0]["ordinal"]),
                "--sample-period",
                "1",
                "--min-penetration",
                "0",
                "--min-impact-speed",
                "0",
            ]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "verdict=DC" in out or "verdict=NC" in out

    def test_ordinal_out_of_range_is_io_error(self, campaign):
        assert main(["replay", "--log", str(campaign / "records.jsonl"), "--ordinal", "99999"]) == 2

    def test_missing_log_is_io_error(self, tmp_path):
        assert main(["replay", "--log", str(tmp_path / "none.jsonl"), "--ordinal", "0"]) == 2

    def test_verdict_mismatch_is_internal_error(self, campaign, capsys):
        log = campaign / "records.jsonl"
        lines = log.read_text().splitlines()
        first = json.loads(lines[0])
        first["verdict"] = "IC" if first["verdict"] != "IC" else "DC"
        tampered = campaign / "tampered.jsonl"
        tampered.write_text("\n".join([json.dumps(first, sort_keys=True)] + lines[1:]) + "\n")
        assert main(["replay", "--log", str(tampered), "--ordinal", "0"]) == 3
        assert "nondeterminism" in capsys.readouterr().err

    def test_replay_writes_trace_jsonl(self, campaign, tmp_path):
        out = tmp_path / "trace.jsonl"
        code = main(["replay", "--log", str(campaign / "records.jsonl"), "--ordinal", "0", "--out", str(out)])
        assert code == 0
        frames = [json.loads(l) for l in out.read_text().splitlines()]
        assert frames[0]["t"] == 0.0
        assert {"ev", "npc", "penetration"} <= set(frames[0])


class TestReportCommand:
    def test_csv_and_svg_outputs(self, tmp_path, capsys):
        _, out_dir = run_mini(tmp_path, budget=120)
        assert main(["report", "--log", str(out_dir / "records.jsonl"), "--format", "csv", "--out", str(tmp_path / "r")]) == 0
        assert (tmp_path / "r" / "report.csv").read_text().count("\n") > 1
        assert main(["report", "--log", str(out_dir / "records.jsonl"), "--format", "svg", "--out", str(tmp_path / "r")]) == 0
        assert (tmp_path / "r" / "report.svg").read_text().startswith("<svg")

    def test_empty_log_gives_header_only(self, tmp_path):
        log = tmp_path / "records.jsonl"
        log.write_text("")
        assert main(["report", "--log", str(log), "--format", "csv", "--out", str(tmp_path / "r")]) == 0
        assert (tmp_path / "r" / "report.csv").read_text().splitlines() == [
            "axis,bucket,executions,collisions,ics,sr_percent"
        ]

    def test_missing_log_is_io_error(self, tmp_path):
        assert main(["report", "--log", str(tmp_path / "none.jsonl"), "--format", "csv", "--out", str(tmp_path / "r")]) == 2


class TestSweepStep:
    def test_single_step_gives_one_row(self, tmp_path):
        out = tmp_path / "steps.csv"
        code = main(["sweep-step", "--kind", "FLB", "--axis", "angle", "--steps", "0.05", "--trials", "2", "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "step,mean_ics,trial_counts"
        assert len(lines) == 2

    def test_empty_steps_list_is_config_error(self, tmp_path, capsys):
        assert main(["sweep-step", "--kind", "FLB", "--axis", "angle", "--steps", ",", "--trials", "1", "--out", str(tmp_path / "s.csv")]) == 1

    def test_bad_axis_is_config_error(self, tmp_path):
        assert main(["sweep-step", "--kind", "FLB", "--axis", "mass", "--steps", "0.05", "--trials", "1", "--out", str(tmp_path / "s.csv")]) == 1


class TestSweepThreshold:
    def test_five_thresholds_and_monotone_recall(self, tmp_path):
        out = tmp_path / "thr.csv"
        code = main(["sweep-threshold", "--thresholds", "0,0.05,0.1,0.15,0.2", "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "threshold,tp,fp,fn,precision,recall"
        assert len(lines) == 6
        recalls = [float(l.split(",")[5]) for l in lines[1:]]
        assert recalls[0] == 1.0
        assert all(recalls[i] >= recalls[i + 1] for i in range(len(recalls) - 1))

    def test_empty_threshold_list_is_config_error(self, tmp_path):
        assert main(["sweep-threshold", "--thresholds", "", "--out", str(tmp_path / "t.csv")]) == 1

    def test_threshold_out_of_range_is_config_error(self, tmp_path):
        assert main(["sweep-threshold", "--thresholds", "0,1.5", "--out", str(tmp_path / "t.csv")]) == 1


def test_usage_errors_map_to_config_error_code(capsys):
    assert main(["run"]) == 1
    assert main([]) == 1
