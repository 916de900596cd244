"""Bounded N-dimensional grids with boundary bounce and goal-only reward."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

Position = tuple[int, ...]
Delta = tuple[int, ...]

# Action index -> (axis, step). Axis 0 is x, 1 is y, 2 is z.
PAPER_2D_ACTIONS: tuple[tuple[int, int], ...] = (
    (1, +1),  # up
    (1, -1),  # down
    (0, -1),  # left
    (0, +1),  # right
)
PAPER_3D_ACTIONS: tuple[tuple[int, int], ...] = PAPER_2D_ACTIONS + (
    (2, +1),  # forward
    (2, -1),  # backward
)

ACTION_NAMES_3D = ("up", "down", "left", "right", "forward", "backward")


def _delta(dim: int, axis: int, step: int) -> Delta:
    d = [0] * dim
    d[axis] = step
    return tuple(d)


def canonical_actions(dim: int) -> tuple[Delta, ...]:
    """Axis-major table: action 2k moves +1 on axis k, 2k+1 moves -1."""
    return tuple(_delta(dim, k, s) for k in range(dim) for s in (+1, -1))


def _axis_step(delta: Delta) -> tuple[int, int]:
    nonzero = [(i, v) for i, v in enumerate(delta) if v != 0]
    if len(nonzero) != 1 or nonzero[0][1] not in (1, -1):
        raise ValueError(f"action delta {delta} must have exactly one +1/-1 entry")
    return nonzero[0]


@dataclass(frozen=True)
class GridSpec:
    """Immutable environment definition.

    ``actions`` is the ordered list of unit displacement vectors; its length is
    the agent's ``num_actions``.
    """

    extents: tuple[int, ...]
    start: Position
    goal: Position
    actions: tuple[Delta, ...]
    goal_reward: float = 1.0
    step_reward: float = 0.0
    _axis_steps: tuple[tuple[int, int], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        extents = tuple(int(e) for e in self.extents)
        object.__setattr__(self, "extents", extents)
        if len(extents) < 1:
            raise ValueError("a grid needs at least one axis")
        for i, e in enumerate(extents):
            if e < 1:
                raise ValueError(f"extent of axis {i} must be >= 1, got {e}")
        for name in ("start", "goal"):
            p = tuple(int(c) for c in getattr(self, name))
            object.__setattr__(self, name, p)
            if len(p) != len(extents):
                raise ValueError(f"{name} {p} has {len(p)} coordinates, grid has {len(extents)} axes")
            for i, (c, e) in enumerate(zip(p, extents)):
                if not 0 <= c < e:
                    raise ValueError(f"{name} coordinate {i} = {c} is outside [0, {e})")
        if self.start == self.goal:
            raise ValueError(f"start and goal coincide at {self.start}")

        actions = tuple(tuple(int(v) for v in d) for d in self.actions)
        object.__setattr__(self, "actions", actions)
        steps = []
        for d in actions:
            if len(d) != len(extents):
                raise ValueError(f"action delta {d} does not match dimension {len(extents)}")
            steps.append(_axis_step(d))
        for axis in range(len(extents)):
            for s in (+1, -1):
                if steps.count((axis, s)) != 1:
                    raise ValueError(f"axis {axis} needs exactly one {s:+d} action")
        object.__setattr__(self, "_axis_steps", tuple(steps))

    @property
    def dimension(self) -> int:
        return len(self.extents)

    @property
    def num_actions(self) -> int:
        return len(self.actions)

    @property
    def num_states(self) -> int:
        n = 1
        for e in self.extents:
            n *= e
        return n

    @property
    def axis_steps(self) -> tuple[tuple[int, int], ...]:
        """``(axis, +1/-1)`` per action index; the compiled kernel consumes this."""
        return self._axis_steps

    def is_valid_position(self, p: Sequence[int]) -> bool:
        if len(p) != len(self.extents):
            raise ValueError(f"position {tuple(p)} has {len(p)} coordinates, grid has {len(self.extents)} axes")
        return all(0 <= c < e for c, e in zip(p, self.extents))

    def get_reward(self, state: Position) -> float:
        return self.goal_reward if state == self.goal else self.step_reward

    def take_action(self, state: Position, action: int) -> Position:
        """Move one cell; a move that would leave the grid returns ``state``."""
        if not 0 <= action < len(self.actions):
            raise ValueError(f"action {action} outside [0, {len(self.actions)})")
        axis, step = self._axis_steps[action]
        c = state[axis] + step
        if 0 <= c < self.extents[axis]:
            return state[:axis] + (c,) + state[axis + 1 :]
        return state


def _from_axis_steps(table, dim: int) -> tuple[Delta, ...]:
    return tuple(_delta(dim, axis, step) for axis, step in table)


def make_2d(width: int, height: int, start: Sequence[int], goal: Sequence[int], **rewards: float) -> GridSpec:
    """Width x height plane with actions up, down, left, right."""
    return GridSpec((width, height), tuple(start), tuple(goal), _from_axis_steps(PAPER_2D_ACTIONS, 2), **rewards)


def make_3d(
    width: int, height: int, depth: int, start: Sequence[int], goal: Sequence[int], **rewards: float
) -> GridSpec:
    """Volume with the 2D actions plus forward (z+1) and backward (z-1)."""
    return GridSpec(
        (width, height, depth), tuple(start), tuple(goal), _from_axis_steps(PAPER_3D_ACTIONS, 3), **rewards
    )


def make_nd(extents: Sequence[int], start: Sequence[int], goal: Sequence[int], **rewards: float) -> GridSpec:
    """Any dimension, canonical axis-major action ordering."""
    extents = tuple(extents)
    if not extents:
        raise ValueError("a grid needs at least one axis")
    return GridSpec(extents, tuple(start), tuple(goal), canonical_actions(len(extents)), **rewards)


def is_valid_position(spec: GridSpec, p: Sequence[int]) -> bool:
    return spec.is_valid_position(p)


def get_reward(spec: GridSpec, state: Position) -> float:
    return spec.get_reward(state)


def take_action(spec: GridSpec, state: Position, action: int) -> Position:
    return spec.take_action(state, action)
