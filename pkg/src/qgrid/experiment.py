"""Run configurations, the published presets, and result files."""

from __future__ import annotations

import csv
import json
import time
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Any

from qgrid import trainer
from qgrid.agent import AgentConfig, QTable
from qgrid.analysis import StabilizationReport, detect_stabilization, manhattan_distance
from qgrid.gridworld import GridSpec, make_2d, make_3d, make_nd
from qgrid.trainer import EpisodeRecord, GreedyPath, TrainConfig, extract_greedy_path, print_progress


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines a run. Round-trips through ``summary.json``."""

    name: str
    dims: tuple[int, ...]
    start: tuple[int, ...]
    goal: tuple[int, ...]
    episodes: int
    max_steps: int
    alpha: float
    gamma: float
    epsilon: float
    seed: int = 0
    window: int = 25
    tolerance: float = 0.2

    def __post_init__(self) -> None:
        for name in ("dims", "start", "goal"):
            object.__setattr__(self, name, tuple(int(v) for v in getattr(self, name)))
        if self.window > self.episodes:
            raise ValueError(f"window {self.window} exceeds episodes {self.episodes}")

    @property
    def action_order(self) -> str:
        return "paper" if len(self.dims) in (2, 3) else "canonical"

    def grid_spec(self) -> GridSpec:
        if len(self.dims) == 2:
            return make_2d(*self.dims, self.start, self.goal)
        if len(self.dims) == 3:
            return make_3d(*self.dims, self.start, self.goal)
        return make_nd(self.dims, self.start, self.goal)

    def agent_config(self) -> AgentConfig:
        return AgentConfig(2 * len(self.dims), self.alpha, self.gamma, self.epsilon)

    def train_config(self) -> TrainConfig:
        return TrainConfig(self.episodes, self.max_steps, self.seed)

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        for k in ("dims", "start", "goal"):
            d[k] = list(d[k])
        d["action_order"] = self.action_order
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "RunConfig":
        fields = cls.__dataclass_fields__
        return cls(**{k: v for k, v in d.items() if k in fields})


PRESETS: dict[str, RunConfig] = {
    "paper-2d": RunConfig(
        name="paper-2d",
        dims=(50, 50),
        start=(0, 0),
        goal=(49, 49),
        episodes=500,
        max_steps=20_000,
        alpha=0.5,
        gamma=0.5,
        epsilon=0.2,
        window=25,
    ),
    "paper-3d": RunConfig(
        name="paper-3d",
        dims=(50, 50, 50),
        start=(0, 0, 0),
        goal=(49, 49, 49),
        episodes=5_000,
        max_steps=20_000,
        alpha=0.5,
        gamma=0.5,
        epsilon=0.2,
        window=100,
    ),
}


def preset(name: str, **overrides: Any) -> RunConfig:
    try:
        base = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return replace(base, **overrides)


@dataclass
class RunResult:
    config: RunConfig
    spec: GridSpec
    table: QTable
    records: list[EpisodeRecord]
    report: StabilizationReport
    path: GreedyPath
    manhattan: int
    seconds: float
    backend: str


def run_experiment(config: RunConfig, *, verbose: bool = False, backend: str | None = None) -> RunResult:
    spec = config.grid_spec()
    agent_config = config.agent_config()
    t0 = time.perf_counter()
    table, records = trainer.train_agent(
        spec,
        agent_config,
        config.train_config(),
        backend=backend,
        on_episode=print_progress if verbose else None,
    )
    seconds = time.perf_counter() - t0
    report = detect_stabilization(records, config.window, config.tolerance)
    path = extract_greedy_path(spec, table, agent_config, config.max_steps)
    return RunResult(
        config=config,
        spec=spec,
        table=table,
        records=records,
        report=report,
        path=path,
        manhattan=manhattan_distance(spec),
        seconds=seconds,
        backend=backend or trainer.BACKEND,
    )


def write_episodes_csv(records: list[EpisodeRecord], path: Path) -> None:
    cumulative = 0.0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["episode", "total_reward", "steps", "cumulative_reward"])
        for r in records:
            cumulative += r.total_reward
            w.writerow([r.episode, repr(r.total_reward), r.steps, repr(cumulative)])


def write_path_csv(greedy: GreedyPath, dimension: int, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step"] + [f"c{i}" for i in range(dimension)])
        for i, pos in enumerate(greedy.positions):
            w.writerow([i, *pos])


def write_run(result: RunResult, out_dir: Path, *, dump_qtable: bool = False) -> dict[str, Any]:
    """Write episodes.csv, path.csv and summary.json (plus qtable.txt on request)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = {"episodes": "episodes.csv", "path": "path.csv"}
    write_episodes_csv(result.records, out_dir / files["episodes"])
    write_path_csv(result.path, result.spec.dimension, out_dir / files["path"])
    if dump_qtable:
        files["qtable"] = "qtable.txt"
        with open(out_dir / files["qtable"], "w") as fh:
            result.table.dump(fh)

    tail = sorted(r.steps for r in result.records[-result.config.window :])
    summary = {
        "preset": result.config.name,
        "config": result.config.to_dict(),
        "backend": result.backend,
        "files": files,
        "stabilization": asdict(result.report),
        "greedy_path": {
            "steps": result.path.steps,
            "reached_goal": result.path.reached_goal,
            "positions": [list(p) for p in result.path.positions],
        },
        "manhattan_distance": result.manhattan,
        "final_window_steps": {"min": tail[0], "max": tail[-1]},
        "goal_reached_episodes": sum(1 for r in result.records if r.total_reward > 0),
        "q_table_entries": len(result.table),
        "wall_clock_seconds": round(result.seconds, 4),
    }
    with open(out_dir / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    return summary
