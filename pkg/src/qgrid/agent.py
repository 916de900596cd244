"""Tabular Q-learning: sparse Q-table, epsilon-greedy choice, one-step update."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, TextIO

from qgrid.gridworld import Position
from qgrid.rng import RandomSource


@dataclass(frozen=True)
class AgentConfig:
    num_actions: int
    learning_rate: float = 0.1
    discount_factor: float = 0.9
    epsilon: float = 0.1

    def __post_init__(self) -> None:
        if self.num_actions < 1:
            raise ValueError(f"num_actions must be >= 1, got {self.num_actions}")
        if not 0.0 < self.learning_rate <= 1.0:
            raise ValueError(f"learning_rate must lie in (0, 1], got {self.learning_rate}")
        if not 0.0 <= self.discount_factor < 1.0:
            raise ValueError(f"discount_factor must lie in [0, 1), got {self.discount_factor}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")


class QTable:
    """Sparse ``(state, action) -> value`` map; unwritten pairs read as 0.0."""

    __slots__ = ("num_actions", "_values")

    def __init__(self, num_actions: int) -> None:
        self.num_actions = num_actions
        self._values: dict[tuple[Position, int], float] = {}

    def _check(self, action: int) -> None:
        if not 0 <= action < self.num_actions:
            raise ValueError(f"action {action} outside [0, {self.num_actions})")

    def get(self, state: Position, action: int) -> float:
        self._check(action)
        return self._values.get((state, action), 0.0)

    def set(self, state: Position, action: int, value: float) -> None:
        self._check(action)
        self._values[(state, action)] = value

    def row(self, state: Position) -> list[float]:
        get = self._values.get
        return [get((state, a), 0.0) for a in range(self.num_actions)]

    def items(self) -> Iterator[tuple[tuple[Position, int], float]]:
        return iter(self._values.items())

    def states(self) -> set[Position]:
        return {s for s, _ in self._values}

    def __len__(self) -> int:
        return len(self._values)

    def __contains__(self, key: object) -> bool:
        return key in self._values

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QTable):
            return NotImplemented
        return self.num_actions == other.num_actions and self._values == other._values

    def dump(self, fh: TextIO) -> None:
        """One line per stored pair: coordinates, action, value (17 sig. digits).

        Lines are sorted by state then action so the dump does not depend on
        insertion order.
        """
        for (state, action), value in sorted(self._values.items()):
            fh.write(",".join(map(str, state)) + f",{action},{value:.17g}\n")

    def dumps(self) -> str:
        import io

        buf = io.StringIO()
        self.dump(buf)
        return buf.getvalue()


def _argmax(values: list[float]) -> int:
    # Strict-greater scan from index 0: ties go to the lowest index.
    best_action = 0
    best_q = float("-inf")
    for action, q in enumerate(values):
        if q > best_q:
            best_q = q
            best_action = action
    return best_action


class QLearningAgent:
    """Epsilon-greedy Q-learner over a persistent :class:`QTable`."""

    def __init__(self, config: AgentConfig, table: QTable | None = None) -> None:
        self.config = config
        self.q_table = table if table is not None else QTable(config.num_actions)
        if self.q_table.num_actions != config.num_actions:
            raise ValueError("Q-table and config disagree on num_actions")

    def get_q_value(self, state: Position, action: int) -> float:
        return self.q_table.get(state, action)

    def greedy_action(self, state: Position) -> int:
        return _argmax(self.q_table.row(state))

    def choose_action(self, state: Position, rng: RandomSource) -> int:
        """One coin flip always; a second draw only on the exploration branch."""
        if rng.unit_float() < self.config.epsilon:
            return rng.int_below(self.config.num_actions)
        return self.greedy_action(state)

    def update_q_value(self, state: Position, action: int, reward: float, next_state: Position) -> None:
        best_next = max(self.q_table.row(next_state))
        td_target = reward + self.config.discount_factor * best_next
        old = self.q_table.get(state, action)
        td_delta = td_target - old
        self.q_table.set(state, action, old + self.config.learning_rate * td_delta)


def get_q_value(table: QTable, state: Position, action: int) -> float:
    return table.get(state, action)


def greedy_action(table: QTable, config: AgentConfig, state: Position) -> int:
    return QLearningAgent(config, table).greedy_action(state)


def choose_action(table: QTable, config: AgentConfig, state: Position, rng: RandomSource) -> int:
    return QLearningAgent(config, table).choose_action(state, rng)


def update_q_value(
    table: QTable, config: AgentConfig, state: Position, action: int, reward: float, next_state: Position
) -> None:
    QLearningAgent(config, table).update_q_value(state, action, reward, next_state)
