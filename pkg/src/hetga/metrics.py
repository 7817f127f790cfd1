"""Operation counters for GA runs.

Counters are immutable value objects. Every update returns a new instance,
and ``+`` merges two sets fieldwise, so partial counts gathered by parallel
workers can be summed in any order.
"""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Counters:
    crossover_ops: int = 0
    objective_evals: int = 0
    generations: int = 0
    wall_ms: float = 0.0

    def __add__(self, other: "Counters") -> "Counters":
        if not isinstance(other, Counters):
            return NotImplemented
        return Counters(
            crossover_ops=self.crossover_ops + other.crossover_ops,
            objective_evals=self.objective_evals + other.objective_evals,
            generations=self.generations + other.generations,
            wall_ms=self.wall_ms + other.wall_ms,
        )

    def counts(self) -> tuple[int, int, int]:
        """The deterministic part of the counters (everything but wall time)."""
        return (self.crossover_ops, self.objective_evals, self.generations)


def record_crossover(c: Counters) -> Counters:
    return replace(c, crossover_ops=c.crossover_ops + 1)


def record_eval(c: Counters) -> Counters:
    return replace(c, objective_evals=c.objective_evals + 1)


def record_generation(c: Counters) -> Counters:
    return replace(c, generations=c.generations + 1)


def merge(*parts: Counters) -> Counters:
    total = Counters()
    for part in parts:
        total = total + part
    return total


def snapshot(c: Counters, elapsed: float) -> Counters:
    """Stamp ``elapsed`` (seconds) onto ``c`` as wall_ms; counts are untouched."""
    if elapsed < 0:
        raise ValueError(f"elapsed time must be non-negative, got {elapsed}")
    return replace(c, wall_ms=elapsed * 1000.0)
