"""Time the compiled kernel against the pure-Python loop on the same runs.

    python benchmarks/bench_backends.py                 # paper-2d, 3 seeds
    python benchmarks/bench_backends.py --preset paper-3d --episodes 300

Each pair of runs is also checked for identical records and Q-tables.
"""

from __future__ import annotations

import argparse
import statistics
import time

from qgrid.experiment import PRESETS, preset
from qgrid.trainer import available_backends, train_agent


def time_backend(config, backend: str) -> tuple[float, object, list]:
    spec, agent_config, train_config = config.grid_spec(), config.agent_config(), config.train_config()
    t0 = time.perf_counter()
    table, records = train_agent(spec, agent_config, train_config, backend=backend)
    return time.perf_counter() - t0, table, records


def bench(name: str, seeds: list[int], episodes: int | None = None) -> list[dict]:
    if "compiled" not in available_backends():
        raise SystemExit("compiled kernel not built; run `pip install -e . --no-build-isolation`")
    rows = []
    for seed in seeds:
        overrides = {"seed": seed}
        if episodes is not None:
            overrides.update(episodes=episodes, window=min(PRESETS[name].window, episodes))
        config = preset(name, **overrides)
        t_py, table_py, rec_py = time_backend(config, "python")
        t_c, table_c, rec_c = time_backend(config, "compiled")
        steps = sum(r.steps for r in rec_c)
        rows.append(
            {
                "seed": seed,
                "steps": steps,
                "python_s": t_py,
                "compiled_s": t_c,
                "speedup": t_py / t_c if t_c else float("inf"),
                "identical": rec_py == rec_c and table_py == table_c,
            }
        )
    return rows


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--preset", default="paper-2d", choices=sorted(PRESETS))
    p.add_argument("--seeds", type=int, default=3)
    p.add_argument("--episodes", type=int, help="truncate the preset (the 3D preset is slow in Python)")
    args = p.parse_args()

    rows = bench(args.preset, list(range(args.seeds)), args.episodes)
    print(f"{'seed':>4} {'env steps':>10} {'python s':>9} {'compiled s':>10} {'speedup':>8} {'same':>5}")
    for r in rows:
        print(
            f"{r['seed']:>4} {r['steps']:>10} {r['python_s']:>9.3f} {r['compiled_s']:>10.4f} "
            f"{r['speedup']:>8.0f} {str(r['identical']):>5}"
        )
    print(
        f"median: {statistics.median(r['python_s'] / r['steps'] * 1e9 for r in rows):.0f} ns/step python, "
        f"{statistics.median(r['compiled_s'] / r['steps'] * 1e9 for r in rows):.1f} ns/step compiled"
    )
    if not all(r["identical"] for r in rows):
        raise SystemExit("backends disagree")


if __name__ == "__main__":
    main()
