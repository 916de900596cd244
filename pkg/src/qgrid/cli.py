"""Command-line entry point.

    qgrid run --preset paper-2d --seed 7 --out run1/
    qgrid run --dims 5x5 --start 0,0 --goal 4,4 --episodes 200 --seed 1
    qgrid run --from-summary run1/summary.json --out replay/
    qgrid sweep sweep.json --jobs 4 --out sweep1/

Exit codes: 0 success, 1 run or I/O failure, 2 invalid arguments.
"""

from __future__ import annotations

import argparse
import json
import os
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Any, Sequence

from qgrid.analysis import StabilizationReport, scaling_ratio
from qgrid.experiment import PRESETS, RunConfig, preset, run_experiment, write_run

OUT_ENV = "QGRID_OUT_DIR"


class UsageError(Exception):
    """Bad flags or config; maps to exit code 2."""


def _int_list(text: str, sep: str) -> tuple[int, ...]:
    try:
        values = tuple(int(v) for v in text.split(sep))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers separated by {sep!r}, got {text!r}") from None
    return values


def _dims(text: str) -> tuple[int, ...]:
    return _int_list(text.lower(), "x")


def _coords(text: str) -> tuple[int, ...]:
    return _int_list(text, ",")


def _out_root() -> Path:
    return Path(os.environ.get(OUT_ENV, "runs"))


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", choices=sorted(PRESETS), help="published parameter block")
    p.add_argument("--from-summary", type=Path, help="replay the config echoed in a summary.json")
    p.add_argument("--dims", type=_dims, help="extents per axis, e.g. 50x50 or 10x10x10")
    p.add_argument("--start", type=_coords, help="comma-separated start coordinates (default origin)")
    p.add_argument("--goal", type=_coords, help="comma-separated goal coordinates (default far corner)")
    p.add_argument("--episodes", type=int)
    p.add_argument("--max-steps", type=int)
    p.add_argument("--alpha", type=float, help="learning rate")
    p.add_argument("--gamma", type=float, help="discount factor")
    p.add_argument("--epsilon", type=float, help="exploration rate")
    p.add_argument("--seed", type=int)
    p.add_argument("--window", type=int, help="stabilization window (episodes)")
    p.add_argument("--tolerance", type=float, help="stabilization tolerance above the final plateau")
    p.add_argument("--out", type=Path, help=f"output directory (default ${OUT_ENV}/<name>_seed<seed>)")
    p.add_argument("--dump-qtable", action="store_true", help="also write qtable.txt")
    p.add_argument("--backend", choices=["compiled", "python"], help="force a training backend")
    p.add_argument("--verbose", action="store_true", help="print one line per episode")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qgrid", description="Tabular Q-learning on N-dimensional gridworlds")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="train one agent and write its results")
    _add_run_flags(run_p)

    sweep_p = sub.add_parser("sweep", help="run presets x seeds and summarize stabilization")
    sweep_p.add_argument("config", type=Path, help="sweep JSON file")
    sweep_p.add_argument("--out", type=Path, help=f"sweep directory (default ${OUT_ENV}/sweep)")
    sweep_p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    sweep_p.add_argument("--dump-qtable", action="store_true")
    sweep_p.add_argument("--backend", choices=["compiled", "python"])
    sweep_p.add_argument("--verbose", action="store_true")
    return parser


def resolve_run_config(args: argparse.Namespace) -> RunConfig:
    """Preset (or replayed summary) first, then explicit flags on top."""
    if args.from_summary is not None:
        if args.preset is not None:
            raise UsageError("--preset and --from-summary are mutually exclusive")
        try:
            echo = json.loads(args.from_summary.read_text())["config"]
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(f"cannot read config echo from {args.from_summary}: {exc}") from None
        base: dict[str, Any] = dict(echo)
    elif args.preset is not None:
        base = PRESETS[args.preset].to_dict()
    else:
        if args.dims is None:
            raise UsageError("give --preset, --from-summary, or --dims")
        base = {
            "name": "custom",
            "episodes": 500,
            "max_steps": 20_000,
            "alpha": 0.5,
            "gamma": 0.5,
            "epsilon": 0.2,
            "seed": 0,
            "window": 25,
            "tolerance": 0.2,
        }

    overrides = {
        "dims": args.dims,
        "start": args.start,
        "goal": args.goal,
        "episodes": args.episodes,
        "max_steps": args.max_steps,
        "alpha": args.alpha,
        "gamma": args.gamma,
        "epsilon": args.epsilon,
        "seed": args.seed,
        "window": args.window,
        "tolerance": args.tolerance,
    }
    base.update({k: v for k, v in overrides.items() if v is not None})
    if args.preset is not None and any(v is not None for k, v in overrides.items() if k != "seed"):
        base["name"] = f"{args.preset}-custom"

    dims = tuple(base["dims"])
    if args.dims is not None and args.start is None:
        base["start"] = (0,) * len(dims)
    if args.dims is not None and args.goal is None:
        base["goal"] = tuple(e - 1 for e in dims)
    if args.window is None:
        base["window"] = min(base["window"], base["episodes"])
    try:
        config = RunConfig.from_dict(base)
        # Surface grid/agent/train validation as usage errors.
        config.grid_spec()
        config.agent_config()
        config.train_config()
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    return config


def run_single(args: argparse.Namespace) -> int:
    config = resolve_run_config(args)
    out = args.out if args.out is not None else _out_root() / f"{config.name}_seed{config.seed}"
    result = run_experiment(config, verbose=args.verbose, backend=args.backend)
    try:
        summary = write_run(result, out, dump_qtable=args.dump_qtable)
    except OSError as exc:
        print(f"qgrid: cannot write results to {out}: {exc}", file=sys.stderr)
        return 1
    stab = summary["stabilization"]["stabilization_episode"]
    print(
        f"{config.name} seed={config.seed}: stabilized at episode {stab}, "
        f"greedy path {result.path.steps} steps (manhattan {result.manhattan}), "
        f"{result.seconds:.2f}s [{result.backend}] -> {out}"
    )
    return 0


def _load_sweep(path: Path) -> tuple[list[RunConfig], list[int]]:
    try:
        doc = json.loads(path.read_text())
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read sweep config {path}: {exc}") from None
    if "seeds" in doc:
        seeds = [int(s) for s in doc["seeds"]]
    else:
        base_seed = int(doc.get("base_seed", 0))
        seeds = [base_seed + i for i in range(int(doc.get("num_seeds", 0)))]
    if not seeds:
        raise UsageError("sweep needs at least one seed")
    entries = doc.get("presets") or []
    if not entries:
        raise UsageError("sweep needs at least one preset")
    configs = []
    for entry in entries:
        try:
            if isinstance(entry, str):
                configs.append(preset(entry))
            else:
                entry = dict(entry)
                base = entry.pop("preset", None)
                configs.append(preset(base, **entry) if base else RunConfig.from_dict(entry))
        except (TypeError, ValueError) as exc:
            raise UsageError(f"bad preset entry {entry!r}: {exc}") from None
    names = [c.name for c in configs]
    if len(set(names)) != len(names):
        raise UsageError(f"preset names must be unique, got {names}")
    return configs, seeds


def _sweep_one(config: RunConfig, out: Path, dump_qtable: bool, backend: str | None, verbose: bool) -> dict:
    try:
        result = run_experiment(config, verbose=verbose, backend=backend)
        write_run(result, out, dump_qtable=dump_qtable)
    except Exception as exc:  # noqa: BLE001 - reported per run
        return {"preset": config.name, "seed": config.seed, "dir": str(out), "ok": False, "error": repr(exc)}
    return {
        "preset": config.name,
        "seed": config.seed,
        "dir": str(out),
        "ok": True,
        "stabilization_episode": result.report.stabilization_episode,
        "final_plateau_steps": result.report.final_plateau_steps,
        "greedy_path_steps": result.path.steps,
        "reached_goal": result.path.reached_goal,
    }


def run_sweep(args: argparse.Namespace) -> int:
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    configs, seeds = _load_sweep(args.config)
    root = args.out if args.out is not None else _out_root() / "sweep"
    jobs = [
        (replace(c, seed=s), root / f"{c.name}_seed{s}", args.dump_qtable, args.backend, args.verbose)
        for c in configs
        for s in seeds
    ]
    if args.jobs == 1:
        runs = [_sweep_one(*job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            runs = list(pool.map(_sweep_one, *zip(*jobs)))

    per_preset: dict[str, Any] = {}
    for c in configs:
        ok = [r for r in runs if r["preset"] == c.name and r["ok"]]
        episodes = [r["stabilization_episode"] for r in ok]
        per_preset[c.name] = {
            "seeds": [r["seed"] for r in ok],
            "stabilization_episodes": episodes,
            "median_stabilization_episode": statistics.median(episodes) if episodes else None,
            "window": c.window,
            "tolerance": c.tolerance,
        }

    summary: dict[str, Any] = {"seeds": seeds, "runs": runs, "presets": per_preset, "scaling_ratio": None}
    first, last = per_preset[configs[0].name], per_preset[configs[-1].name]
    if len(configs) > 1 and first["stabilization_episodes"] and last["stabilization_episodes"]:
        a = StabilizationReport(first["median_stabilization_episode"], first["window"], first["tolerance"], 0.0)
        b = StabilizationReport(last["median_stabilization_episode"], last["window"], last["tolerance"], 0.0)
        summary["scaling_ratio"] = scaling_ratio(a, b)
        summary["scaling_between"] = [configs[0].name, configs[-1].name]

    try:
        root.mkdir(parents=True, exist_ok=True)
        with open(root / "sweep_summary.json", "w") as fh:
            json.dump(summary, fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        print(f"qgrid: cannot write sweep summary to {root}: {exc}", file=sys.stderr)
        return 1

    failed = [r for r in runs if not r["ok"]]
    for name, info in per_preset.items():
        print(f"{name}: median stabilization episode {info['median_stabilization_episode']} over {len(info['seeds'])} seeds")
    if summary["scaling_ratio"] is not None:
        print(f"scaling ratio {summary['scaling_between'][1]} / {summary['scaling_between'][0]}: {summary['scaling_ratio']:.2f}")
    for r in failed:
        print(f"FAILED {r['preset']} seed={r['seed']}: {r['error']}", file=sys.stderr)
    return 1 if failed else 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return run_single(args)
        return run_sweep(args)
    except UsageError as exc:
        parser.error(str(exc))  # exits with status 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
