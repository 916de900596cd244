"""Episode loop, per-episode records, and greedy rollouts.

Training runs on the compiled kernel when it imported successfully and on the
pure-Python loop otherwise. Both produce identical records and Q-tables for a
given seed. Set ``QGRID_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from typing import Callable

from qgrid.agent import AgentConfig, QLearningAgent, QTable
from qgrid.gridworld import GridSpec, Position
from qgrid.rng import MASK64, RandomSource

try:
    if os.environ.get("QGRID_PURE_PYTHON"):
        raise ImportError("pure Python forced")
    from qgrid import _kernel
except ImportError:
    _kernel = None

BACKEND = "compiled" if _kernel is not None else "python"

EpisodeCallback = Callable[[int, float, int], None]


@dataclass(frozen=True)
class TrainConfig:
    num_episodes: int
    max_steps: int
    seed: int = 0

    def __post_init__(self) -> None:
        if self.num_episodes < 1:
            raise ValueError(f"num_episodes must be >= 1, got {self.num_episodes}")
        if self.max_steps < 1:
            raise ValueError(f"max_steps must be >= 1, got {self.max_steps}")
        if not 0 <= self.seed <= MASK64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(frozen=True)
class EpisodeRecord:
    episode: int  # 1-based
    total_reward: float
    steps: int


@dataclass(frozen=True)
class GreedyPath:
    positions: tuple[Position, ...]
    reached_goal: bool

    @property
    def steps(self) -> int:
        return len(self.positions) - 1


def print_progress(episode: int, total_reward: float, steps: int) -> None:
    print(f"Episode {episode}: Total Reward = {total_reward}, Total Steps = {steps}")


def available_backends() -> list[str]:
    return ["python"] + (["compiled"] if _kernel is not None else [])


def train_agent(
    spec: GridSpec,
    agent_config: AgentConfig,
    train_config: TrainConfig,
    *,
    backend: str | None = None,
    on_episode: EpisodeCallback | None = None,
) -> tuple[QTable, list[EpisodeRecord]]:
    """Train one fresh agent; the Q-table persists across all episodes.

    An episode ends when the agent enters the goal or after ``max_steps``
    steps, whichever comes first. The reward of the final step is counted.
    """
    if agent_config.num_actions != spec.num_actions:
        raise ValueError(
            f"agent expects {agent_config.num_actions} actions, grid defines {spec.num_actions}"
        )
    backend = backend or BACKEND
    if backend == "compiled":
        if _kernel is None:
            raise RuntimeError("compiled kernel is not available in this installation")
        return _train_compiled(spec, agent_config, train_config, on_episode)
    if backend == "python":
        return _train_python(spec, agent_config, train_config, on_episode)
    raise ValueError(f"unknown backend {backend!r}")


def _train_python(
    spec: GridSpec,
    agent_config: AgentConfig,
    train_config: TrainConfig,
    on_episode: EpisodeCallback | None,
) -> tuple[QTable, list[EpisodeRecord]]:
    agent = QLearningAgent(agent_config)
    rng = RandomSource(train_config.seed)
    goal = spec.goal
    max_steps = train_config.max_steps
    records = []
    for episode in range(1, train_config.num_episodes + 1):
        state = spec.start
        total_reward = 0.0
        num_steps = 0
        while True:
            action = agent.choose_action(state, rng)
            next_state = spec.take_action(state, action)
            reward = spec.get_reward(next_state)
            agent.update_q_value(state, action, reward, next_state)
            total_reward += reward
            num_steps += 1
            state = next_state
            if next_state == goal or num_steps == max_steps:
                break
        records.append(EpisodeRecord(episode, total_reward, num_steps))
        if on_episode is not None:
            on_episode(episode, total_reward, num_steps)
    return agent.q_table, records


def _train_compiled(
    spec: GridSpec,
    agent_config: AgentConfig,
    train_config: TrainConfig,
    on_episode: EpisodeCallback | None,
) -> tuple[QTable, list[EpisodeRecord]]:
    q, written, rewards, steps = _kernel.train_dense(
        spec.extents,
        spec.start,
        spec.goal,
        spec.axis_steps,
        float(spec.goal_reward),
        float(spec.step_reward),
        float(agent_config.learning_rate),
        float(agent_config.discount_factor),
        float(agent_config.epsilon),
        train_config.num_episodes,
        train_config.max_steps,
        train_config.seed,
        on_episode,
    )
    table = dense_to_table(spec, q, written)
    records = [EpisodeRecord(i + 1, rewards[i], steps[i]) for i in range(train_config.num_episodes)]
    return table, records


def dense_to_table(spec: GridSpec, q, written) -> QTable:
    """Convert a row-major dense array (plus written flags) to a sparse table."""
    n_actions = spec.num_actions
    table = QTable(n_actions)
    states = itertools.product(*(range(e) for e in spec.extents))
    mask = bytes(written)
    pos = mask.find(1)
    last_row = -1
    state: Position = ()
    while pos != -1:
        row, action = divmod(pos, n_actions)
        if row != last_row:
            state = next(itertools.islice(states, row - last_row - 1, None))
            last_row = row
        table.set(state, action, q[pos])
        pos = mask.find(1, pos + 1)
    return table


def extract_greedy_path(spec: GridSpec, table: QTable, agent_config: AgentConfig, step_cap: int) -> GreedyPath:
    """Pure-exploitation rollout from start; stops at the goal or after ``step_cap`` steps."""
    if step_cap < 1:
        raise ValueError(f"step_cap must be >= 1, got {step_cap}")
    agent = QLearningAgent(agent_config, table)
    state = spec.start
    positions = [state]
    for _ in range(step_cap):
        state = spec.take_action(state, agent.greedy_action(state))
        positions.append(state)
        if state == spec.goal:
            return GreedyPath(tuple(positions), True)
    return GreedyPath(tuple(positions), False)
