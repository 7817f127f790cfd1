"""Genetic algorithms with fitness-gated (temporally heterogeneous) crossover."""

from .engine import (
    GAConfig,
    Genome,
    Heterogeneous,
    Homogeneous,
    Individual,
    RunReport,
    evolve,
)
from .metrics import Counters
from .nqueens import NQueensProblem
from .tsp import PointSet, TSPProblem

__all__ = [
    "Counters",
    "GAConfig",
    "Genome",
    "Heterogeneous",
    "Homogeneous",
    "Individual",
    "NQueensProblem",
    "PointSet",
    "RunReport",
    "TSPProblem",
    "evolve",
]
