"""Tabular Q-learning on bounded N-dimensional gridworlds."""

from qgrid.agent import AgentConfig, QLearningAgent, QTable
from qgrid.gridworld import GridSpec, make_2d, make_3d, make_nd
from qgrid.rng import RandomSource, new_source
from qgrid.trainer import BACKEND, EpisodeRecord, GreedyPath, TrainConfig, extract_greedy_path, train_agent

__all__ = [
    "AgentConfig",
    "BACKEND",
    "EpisodeRecord",
    "GreedyPath",
    "GridSpec",
    "QLearningAgent",
    "QTable",
    "RandomSource",
    "TrainConfig",
    "extract_greedy_path",
    "make_2d",
    "make_3d",
    "make_nd",
    "new_source",
    "train_agent",
]
