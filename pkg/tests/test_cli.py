import csv
import json

import pytest

from qgrid.cli import main

SMALL = ["--dims", "5x5", "--start", "0,0", "--goal", "4,4", "--episodes", "200", "--alpha", "0.5",
         "--gamma", "0.5", "--epsilon", "0.2", "--max-steps", "500", "--seed", "1"]


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_custom_run_writes_three_files(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["run", *SMALL, "--out", str(out)]) == 0
    rows = read_csv(out / "episodes.csv")
    assert rows[0] == ["episode", "total_reward", "steps", "cumulative_reward"]
    assert len(rows) == 201
    cumulative = 0.0
    for i, (ep, reward, steps, cum) in enumerate(rows[1:], start=1):
        assert int(ep) == i
        assert reward in ("0.0", "1.0")
        assert 1 <= int(steps) <= 500
        cumulative += float(reward)
        assert float(cum) == cumulative

    path = read_csv(out / "path.csv")
    assert path[0] == ["step", "c0", "c1"]
    assert path[1] == ["0", "0", "0"]
    assert path[-1][1:] == ["4", "4"]

    summary = json.loads((out / "summary.json").read_text())
    cfg = summary["config"]
    assert cfg["dims"] == [5, 5] and cfg["seed"] == 1 and cfg["max_steps"] == 500
    assert cfg["alpha"] == 0.5 and cfg["gamma"] == 0.5 and cfg["epsilon"] == 0.2
    assert summary["manhattan_distance"] == 8
    assert summary["greedy_path"]["reached_goal"]
    assert summary["stabilization"]["stabilization_episode"] >= 1
    assert "stabilized at episode" in capsys.readouterr().out


def test_path_csv_has_one_column_per_axis(tmp_path):
    out = tmp_path / "r4"
    assert main(["run", "--dims", "3x3x2x2", "--episodes", "50", "--max-steps", "200", "--out", str(out)]) == 0
    assert read_csv(out / "path.csv")[0] == ["step", "c0", "c1", "c2", "c3"]
    assert json.loads((out / "summary.json").read_text())["config"]["action_order"] == "canonical"


def test_replay_from_summary_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", *SMALL, "--out", str(a), "--dump-qtable"]) == 0
    assert main(["run", "--from-summary", str(a / "summary.json"), "--out", str(b), "--dump-qtable",
                 "--backend", "python"]) == 0
    for name in ("episodes.csv", "path.csv", "qtable.txt"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_preset_with_override(tmp_path):
    out = tmp_path / "p"
    assert main(["run", "--preset", "paper-2d", "--episodes", "30", "--seed", "3", "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["preset"] == "paper-2d-custom"
    assert summary["config"]["dims"] == [50, 50] and summary["config"]["window"] == 25
    assert len(read_csv(out / "episodes.csv")) == 31


def test_default_out_dir_from_env(tmp_path, monkeypatch):
    monkeypatch.setenv("QGRID_OUT_DIR", str(tmp_path / "root"))
    assert main(["run", "--dims", "3x3", "--episodes", "5", "--seed", "2"]) == 0
    assert (tmp_path / "root" / "custom_seed2" / "episodes.csv").exists()


@pytest.mark.parametrize(
    "argv",
    [
        ["run"],
        ["run", "--dims", "5x5", "--goal", "5,5"],
        ["run", "--dims", "5x5", "--alpha", "0"],
        ["run", "--dims", "5xq"],
        ["run", "--preset", "paper-9d"],
        ["run", "--dims", "5x5", "--episodes", "10", "--window", "20"],
        ["bogus"],
    ],
)
def test_invalid_flags_exit_2(argv, tmp_path):
    with pytest.raises(SystemExit) as info:
        main(argv + ["--out", str(tmp_path / "x")] if argv[0] == "run" else argv)
    assert info.value.code == 2


def test_unwritable_output_exits_1(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["run", "--dims", "3x3", "--episodes", "5", "--out", str(blocker / "sub")]) == 1


def small_sweep(tmp_path, **doc):
    entries = [
        {"name": "small-2d", "dims": [5, 5], "start": [0, 0], "goal": [4, 4], "episodes": 60, "max_steps": 400,
         "alpha": 0.5, "gamma": 0.5, "epsilon": 0.2, "window": 5},
        {"name": "small-3d", "dims": [5, 5, 5], "start": [0, 0, 0], "goal": [4, 4, 4], "episodes": 200,
         "max_steps": 2000, "alpha": 0.5, "gamma": 0.5, "epsilon": 0.2, "window": 10},
    ]
    doc.setdefault("presets", entries)
    path = tmp_path / "sweep.json"
    path.write_text(json.dumps(doc))
    return path


@pytest.mark.parametrize("jobs", ["1", "2"])
def test_sweep_summary(tmp_path, jobs):
    cfg = small_sweep(tmp_path, base_seed=10, num_seeds=3)
    out = tmp_path / "sweep"
    assert main(["sweep", str(cfg), "--out", str(out), "--jobs", jobs]) == 0
    summary = json.loads((out / "sweep_summary.json").read_text())
    assert summary["seeds"] == [10, 11, 12]
    assert len(summary["runs"]) == 6 and all(r["ok"] for r in summary["runs"])
    per = summary["presets"]
    assert per["small-2d"]["seeds"] == [10, 11, 12]
    ratio = per["small-3d"]["median_stabilization_episode"] / per["small-2d"]["median_stabilization_episode"]
    assert summary["scaling_ratio"] == pytest.approx(ratio)
    assert (out / "small-3d_seed12" / "episodes.csv").exists()


def test_sweep_is_deterministic_across_job_counts(tmp_path):
    cfg = small_sweep(tmp_path, seeds=[4, 5])
    assert main(["sweep", str(cfg), "--out", str(tmp_path / "s1"), "--jobs", "1"]) == 0
    assert main(["sweep", str(cfg), "--out", str(tmp_path / "s2"), "--jobs", "2"]) == 0
    for run in ("small-2d_seed4", "small-3d_seed5"):
        assert (tmp_path / "s1" / run / "episodes.csv").read_bytes() == (
            tmp_path / "s2" / run / "episodes.csv"
        ).read_bytes()


def test_single_cell_sweep(tmp_path):
    cfg = small_sweep(tmp_path, seeds=[7])
    doc = json.loads(cfg.read_text())
    doc["presets"] = doc["presets"][:1]
    cfg.write_text(json.dumps(doc))
    out = tmp_path / "one"
    assert main(["sweep", str(cfg), "--out", str(out)]) == 0
    summary = json.loads((out / "sweep_summary.json").read_text())
    assert summary["scaling_ratio"] is None
    assert summary["presets"]["small-2d"]["stabilization_episodes"] == [summary["runs"][0]["stabilization_episode"]]


def test_sweep_named_presets_parse(tmp_path):
    from qgrid.cli import _load_sweep

    cfg = small_sweep(tmp_path, presets=["paper-2d", {"preset": "paper-3d", "episodes": 300}], seeds=[1])
    configs, seeds = _load_sweep(cfg)
    assert [c.name for c in configs] == ["paper-2d", "paper-3d"]
    assert configs[1].episodes == 300 and configs[1].window == 100 and seeds == [1]


@pytest.mark.parametrize("doc", [{"seeds": []}, {"num_seeds": 0}, {"seeds": [1], "presets": []}])
def test_sweep_validation_exit_2(tmp_path, doc):
    cfg = small_sweep(tmp_path, **doc)
    with pytest.raises(SystemExit) as info:
        main(["sweep", str(cfg), "--out", str(tmp_path / "o")])
    assert info.value.code == 2


def test_sweep_invalid_entry_exits_2(tmp_path):
    cfg = small_sweep(tmp_path, seeds=[1])
    doc = json.loads(cfg.read_text())
    doc["presets"][1]["window"] = 5000  # exceeds episodes; rejected when the run is built
    cfg.write_text(json.dumps(doc))
    with pytest.raises(SystemExit) as info:
        main(["sweep", str(cfg), "--out", str(tmp_path / "o")])
    assert info.value.code == 2


def test_sweep_partial_failure_exits_1(tmp_path, monkeypatch, capsys):
    import qgrid.cli as cli

    real = cli.run_experiment

    def flaky(config, **kwargs):
        if config.name == "small-3d":
            raise RuntimeError("boom")
        return real(config, **kwargs)

    monkeypatch.setattr(cli, "run_experiment", flaky)
    out = tmp_path / "o"
    assert main(["sweep", str(small_sweep(tmp_path, seeds=[1, 2])), "--out", str(out)]) == 1
    summary = json.loads((out / "sweep_summary.json").read_text())
    assert [r["ok"] for r in summary["runs"]] == [True, True, False, False]
    assert summary["presets"]["small-3d"]["median_stabilization_episode"] is None
    assert summary["scaling_ratio"] is None
    assert "FAILED small-3d seed=1" in capsys.readouterr().err
