"""Generational GA over permutation genomes with fitness-gated crossover.

Objectives are minimized. Each generation the worst fitness in the
population (``tau``) is found first, and each parent's crossover gate is
then decided against it:

* ``Homogeneous(p_c)`` - the classical GA: crossover happens when ``u < p_c``.
* ``Heterogeneous()`` - crossover happens when ``1 - fitness / tau <= u``, so an
  individual crosses over with probability ``fitness / tau``. The worst
  individual always crosses, a zero-fitness individual never does, and good
  solutions change slowly.

Randomness
----------
Every generation owns one numpy stream derived from ``(seed, generation)``.
All random numbers a generation needs are drawn up front, in a fixed order,
into per-slot arrays. The work for child slot ``k`` reads only slot ``k`` of
those arrays, so the outcome does not depend on the order (or the
parallelism) in which slots are processed.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Optional, Protocol, Sequence, Union

import numpy as np

from .metrics import Counters, snapshot

Genome = tuple[int, ...]
Objective = Callable[[Genome], float]
Mapper = Callable[[Objective, Iterable[Genome]], Iterable[float]]

MAX_SEED = 2**64


def is_permutation(perm: Sequence[int]) -> bool:
    return len(perm) >= 1 and sorted(perm) == list(range(len(perm)))


def as_genome(perm: Iterable[int]) -> Genome:
    """Validate ``perm`` and return it as an immutable genome."""
    g = tuple(int(v) for v in perm)
    if not is_permutation(g):
        raise ValueError(f"not a permutation of 0..n-1: {g!r}")
    return g


@dataclass(frozen=True)
class Individual:
    genome: Genome
    fitness: float

    def __post_init__(self):
        if not self.fitness >= 0:
            raise ValueError(f"fitness must be non-negative, got {self.fitness}")


Population = list[Individual]


def check_population(pop: Sequence[Individual]) -> None:
    if len(pop) < 2:
        raise ValueError(f"population needs at least 2 individuals, got {len(pop)}")
    n = len(pop[0].genome)
    for ind in pop:
        if len(ind.genome) != n:
            raise ValueError("all genomes in a population must have equal length")


@dataclass(frozen=True)
class Homogeneous:
    p_c: float = 0.9

    def __post_init__(self):
        _check_prob("p_c", self.p_c)

    @property
    def name(self) -> str:
        return "homogeneous"


@dataclass(frozen=True)
class Heterogeneous:
    @property
    def name(self) -> str:
        return "heterogeneous"


GatingPolicy = Union[Homogeneous, Heterogeneous]


def _check_prob(name: str, p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {p}")


@dataclass(frozen=True)
class GAConfig:
    population_size: int = 300
    generations: int = 500
    crossover_prob: float = 0.9
    mutation_prob: float = 0.1
    seed: int = 0
    elitism: int = 1

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be at least 2")
        if self.generations < 0:
            raise ValueError("generations must be non-negative")
        _check_prob("crossover_prob", self.crossover_prob)
        _check_prob("mutation_prob", self.mutation_prob)
        if not 0 <= self.seed < MAX_SEED:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if not 0 <= self.elitism < self.population_size:
            raise ValueError("elitism must be in [0, population_size)")

    def policy(self, heterogeneous: bool) -> GatingPolicy:
        return Heterogeneous() if heterogeneous else Homogeneous(self.crossover_prob)


class Problem(Protocol):
    n: int
    target: Optional[float]

    def objective(self, genome: Genome) -> float: ...

    def random_genome(self, rng: np.random.Generator) -> Genome: ...


@dataclass(frozen=True)
class RunReport:
    solved: bool
    best_fitness_per_generation: tuple[float, ...]
    final_best: Individual
    counters: Counters
    seed: int
    generations_used: int
    policy: str = ""

    def without_timing(self) -> "RunReport":
        """Copy with wall time zeroed, for determinism comparisons."""
        return replace(self, counters=snapshot(self.counters, 0.0))


def generation_rng(seed: int, generation: int) -> np.random.Generator:
    """The random stream owned by ``generation`` of a run seeded with ``seed``."""
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(generation,)))
    )


def worst_fitness(pop: Sequence[Individual]) -> float:
    return max(ind.fitness for ind in pop)


def best_individual(pop: Sequence[Individual]) -> Individual:
    # first minimum wins, keeps ties deterministic
    return min(pop, key=lambda ind: ind.fitness)


def gate_crossover(fitness: float, tau: float, policy: GatingPolicy, u: float) -> bool:
    if fitness > tau:
        raise ValueError(
            f"fitness {fitness} exceeds the population's worst fitness {tau}; "
            "the fitness cache is stale"
        )
    if isinstance(policy, Homogeneous):
        return u < policy.p_c
    if tau == 0:
        return False
    return (1.0 - fitness / tau) <= u


def _segment(raw_lo: int, raw_hi: int) -> tuple[int, int]:
    # raw_lo in [0, n], raw_hi in [0, n - 1]; maps to two distinct cut points
    if raw_hi >= raw_lo:
        raw_hi += 1
    return (raw_lo, raw_hi) if raw_lo < raw_hi else (raw_hi, raw_lo)


def order_crossover(a: Sequence[int], b: Sequence[int], lo: int, hi: int) -> Genome:
    """OX: keep ``a[lo:hi]`` in place, fill the rest with b's genes in b's order.

    Filling starts right after the segment and wraps around, reading b
    from the same position.
    """
    n = len(a)
    seg = a[lo:hi]
    kept = set(seg)
    fill = [v for v in b[hi:] if v not in kept]
    fill += [v for v in b[:hi] if v not in kept]
    split = n - hi
    return tuple(fill[split:]) + tuple(seg) + tuple(fill[:split])


def apply_crossover(a: Genome, b: Genome, rng: np.random.Generator) -> Genome:
    n = len(a)
    if len(b) != n:
        raise ValueError(f"parent lengths differ: {n} != {len(b)}")
    lo, hi = _segment(int(rng.integers(0, n + 1)), int(rng.integers(0, n)))
    return order_crossover(a, b, lo, hi)


def _swap(g: Genome, i: int, raw_j: int) -> Genome:
    j = raw_j + 1 if raw_j >= i else raw_j
    out = list(g)
    out[i], out[j] = out[j], out[i]
    return tuple(out)


def apply_mutation(g: Genome, p_m: float, rng: np.random.Generator) -> Genome:
    """Swap two distinct positions with probability ``p_m``."""
    n = len(g)
    if rng.random() >= p_m or n < 2:
        return g
    return _swap(g, int(rng.integers(0, n)), int(rng.integers(0, n - 1)))


@dataclass
class _SlotDraws:
    order: list[int]
    gate_u: list[float]
    cut_lo: list[int]
    cut_hi: list[int]
    mutate_u: list[float]
    swap_i: list[int]
    swap_j: list[int]

    @classmethod
    def draw(cls, rng: np.random.Generator, size: int, slots: int, n: int) -> "_SlotDraws":
        # draw order is part of the reproducibility contract; do not reorder
        return cls(
            order=rng.permutation(size).tolist(),
            gate_u=rng.random(slots).tolist(),
            cut_lo=rng.integers(0, n + 1, size=slots).tolist(),
            cut_hi=rng.integers(0, n, size=slots).tolist(),
            mutate_u=rng.random(slots).tolist(),
            swap_i=rng.integers(0, n, size=slots).tolist(),
            swap_j=rng.integers(0, max(n - 1, 1), size=slots).tolist(),
        )


def step_generation(
    pop: Sequence[Individual],
    policy: GatingPolicy,
    cfg: GAConfig,
    objective: Objective,
    rng: np.random.Generator,
    counters: Counters,
    mapper: Mapper = map,
) -> tuple[Population, Counters]:
    """Produce the next generation and the updated counters.

    Pairs come from a shuffle of the whole population: slots ``2q`` and
    ``2q + 1`` are partners. Slot ``k`` gates on its own parent; on a pass
    the child is ``Psi(parent, partner)``, otherwise a copy of the parent.
    Every non-elite child is then offered to swap mutation and evaluated.
    """
    size = len(pop)
    n = len(pop[0].genome)
    slots = size - cfg.elitism
    tau = worst_fitness(pop)
    ranked = sorted(range(size), key=lambda i: pop[i].fitness)
    elites = [pop[i] for i in ranked[: cfg.elitism]]

    d = _SlotDraws.draw(rng, size, slots, n)
    p_m = cfg.mutation_prob
    children: list[Genome] = []
    crossovers = 0
    for k in range(slots):
        mate = k ^ 1
        parent = pop[d.order[k]]
        partner = pop[d.order[mate if mate < size else 0]]
        if gate_crossover(parent.fitness, tau, policy, d.gate_u[k]):
            lo, hi = _segment(d.cut_lo[k], d.cut_hi[k])
            child = order_crossover(parent.genome, partner.genome, lo, hi)
            crossovers += 1
        else:
            child = parent.genome
        if d.mutate_u[k] < p_m and n >= 2:
            child = _swap(child, d.swap_i[k], d.swap_j[k])
        children.append(child)

    fitnesses = list(mapper(objective, children))
    nxt = elites + [Individual(g, float(f)) for g, f in zip(children, fitnesses)]
    return nxt, counters + Counters(crossover_ops=crossovers, objective_evals=slots, generations=1)


def evolve(
    cfg: GAConfig,
    policy: GatingPolicy,
    problem: Problem,
    target: Optional[float] = None,
    mapper: Mapper = map,
    observer: Optional[Callable[[int, Population], None]] = None,
) -> RunReport:
    """Run a GA from a random initial population.

    Stops after ``cfg.generations`` steps or as soon as the best fitness is at
    or below ``target`` (``None`` means run the whole budget). ``observer``
    is called with ``(generation, population)`` for the initial population
    and after every step.
    """
    start = time.perf_counter()
    rng0 = generation_rng(cfg.seed, 0)
    genomes = [problem.random_genome(rng0) for _ in range(cfg.population_size)]
    pop = [Individual(g, float(f)) for g, f in zip(genomes, mapper(problem.objective, genomes))]
    counters = Counters(objective_evals=len(pop))
    best = best_individual(pop)
    trajectory = [best.fitness]
    if observer is not None:
        observer(0, pop)

    gen = 0
    while gen < cfg.generations and not (target is not None and best.fitness <= target):
        gen += 1
        pop, counters = step_generation(
            pop, policy, cfg, problem.objective, generation_rng(cfg.seed, gen), counters, mapper
        )
        candidate = best_individual(pop)
        if candidate.fitness < best.fitness:
            best = candidate
        trajectory.append(candidate.fitness)
        if observer is not None:
            observer(gen, pop)

    return RunReport(
        solved=target is not None and best.fitness <= target,
        best_fitness_per_generation=tuple(trajectory),
        final_best=best,
        counters=snapshot(counters, time.perf_counter() - start),
        seed=cfg.seed,
        generations_used=gen,
        policy=policy.name,
    )
