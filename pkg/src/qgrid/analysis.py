"""Learning-progress metrics and an exact value-iteration oracle."""

from __future__ import annotations

import itertools
import statistics
from dataclasses import dataclass, field
from typing import Sequence, Union

from qgrid.gridworld import GridSpec, Position
from qgrid.trainer import EpisodeRecord

DEFAULT_MAX_PAIRS = 10**6


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, residual: float) -> None:
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class StabilizationReport:
    stabilization_episode: int | None
    window: int
    tolerance: float
    final_plateau_steps: float


def _steps_of(records: Sequence[Union[EpisodeRecord, int]]) -> list[int]:
    return [r.steps if isinstance(r, EpisodeRecord) else int(r) for r in records]


def window_medians(steps: Sequence[int], window: int) -> list[float]:
    """Median of ``steps[i:i + window]`` for every full window, in order."""
    return [statistics.median(steps[i : i + window]) for i in range(len(steps) - window + 1)]


def detect_stabilization(
    records: Sequence[Union[EpisodeRecord, int]], window: int = 25, tolerance: float = 0.2
) -> StabilizationReport:
    """Earliest episode from which every sliding-window median of steps stays
    within ``(1 + tolerance)`` of the median of the final window.

    Medians keep capped, goal-less episodes from dominating a window. The final
    window always qualifies, so the result is present whenever
    ``len(records) >= window``. Accepts records or plain step counts.
    """
    steps = _steps_of(records)
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    if tolerance <= 0:
        raise ValueError(f"tolerance must be > 0, got {tolerance}")
    if window > len(steps):
        raise ValueError(f"window {window} exceeds the {len(steps)} recorded episodes")

    medians = window_medians(steps, window)
    plateau = medians[-1]
    limit = (1.0 + tolerance) * plateau
    start = len(medians)
    while start > 0 and medians[start - 1] <= limit:
        start -= 1
    return StabilizationReport(start + 1, window, tolerance, float(plateau))


def scaling_ratio(report_a: StabilizationReport, report_b: StabilizationReport) -> float:
    """How many times more episodes ``b`` needed to stabilize than ``a``."""
    if report_a.stabilization_episode is None or report_b.stabilization_episode is None:
        raise ValueError("both reports need a stabilization episode")
    return report_b.stabilization_episode / report_a.stabilization_episode


def manhattan_distance(spec: GridSpec) -> int:
    return sum(abs(g - s) for g, s in zip(spec.goal, spec.start))


@dataclass
class ExactQ:
    values: dict[tuple[Position, int], float]
    num_actions: int
    iterations_used: int
    residual: float
    residual_history: list[float] = field(default_factory=list, repr=False)

    def q(self, state: Position, action: int) -> float:
        return self.values[(state, action)]

    def value(self, state: Position) -> float:
        return max(self.values[(state, a)] for a in range(self.num_actions))

    def greedy_action(self, state: Position) -> int:
        row = [self.values[(state, a)] for a in range(self.num_actions)]
        return row.index(max(row))

    def greedy_path(self, spec: GridSpec) -> list[Position]:
        """Optimal rollout from start, ties to the lowest action index."""
        state = spec.start
        path = [state]
        for _ in range(spec.num_states):
            if state == spec.goal:
                return path
            state = spec.take_action(state, self.greedy_action(state))
            path.append(state)
        raise ConvergenceError("optimal rollout did not reach the goal", self.residual)


def value_iteration(
    spec: GridSpec,
    discount: float,
    threshold: float = 1e-12,
    max_iterations: int = 100_000,
    max_pairs: int = DEFAULT_MAX_PAIRS,
) -> ExactQ:
    """Synchronous Bellman optimality backups on the full state space.

    ``Q(s, a) <- R(s') + discount * max_a' Q(s', a')`` with ``s'`` the
    deterministic successor. The goal is absorbing with ``Q(goal, .) = 0``,
    matching the learner, whose goal row is never written.
    """
    if not 0.0 <= discount < 1.0:
        raise ValueError(f"discount must lie in [0, 1), got {discount}")
    if threshold <= 0:
        raise ValueError(f"threshold must be > 0, got {threshold}")
    n_actions = spec.num_actions
    pairs = spec.num_states * n_actions
    if pairs > max_pairs:
        raise ValueError(f"{pairs} state-action pairs exceed the cap of {max_pairs}")

    states = list(itertools.product(*(range(e) for e in spec.extents)))
    index = {s: i for i, s in enumerate(states)}
    goal_i = index[spec.goal]
    succ = [[index[spec.take_action(s, a)] for a in range(n_actions)] for s in states]
    reward = [spec.get_reward(s) for s in states]

    q = [[0.0] * n_actions for _ in states]
    history: list[float] = []
    for it in range(1, max_iterations + 1):
        v = [max(row) for row in q]
        delta = 0.0
        new_q = []
        for i, row in enumerate(q):
            if i == goal_i:
                new_q.append(row)
                continue
            new_row = [reward[j] + discount * (0.0 if j == goal_i else v[j]) for j in succ[i]]
            for old, new in zip(row, new_row):
                delta = max(delta, abs(new - old))
            new_q.append(new_row)
        q = new_q
        history.append(delta)
        if delta <= threshold:
            values = {(s, a): q[i][a] for i, s in enumerate(states) for a in range(n_actions)}
            return ExactQ(values, n_actions, it, delta, history)
    raise ConvergenceError(f"no convergence within {max_iterations} iterations (residual {delta})", delta)
