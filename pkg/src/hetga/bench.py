"""Experiment batteries: config parsing, seeded runs, CSV output, policy comparison."""

from __future__ import annotations

import csv
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields, replace
from os import PathLike
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence, Union

from .engine import MAX_SEED, GAConfig, Genome, RunReport, as_genome, evolve
from .nqueens import NQueensProblem
from .tsp import TSPProblem, load_points, random_instance

CSV_HEADER = (
    "run_id,policy,solved,best_fitness,crossover_ops,"
    "objective_evals,generations_used,wall_ms,seed"
)
DESK_MAX_N = 100
PROBLEMS = ("nqueens", "tsp")


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class ExperimentSpec:
    problem: str
    n: Optional[int] = None
    points_file: Optional[str] = None
    population: int = 300
    generations: int = 500
    crossover_prob: float = 0.9
    mutation_prob: float = 0.1
    elitism: int = 1
    runs: int = 10
    heterogeneous: bool = True
    seed: int = 0

    def ga_config(self, run_id: int) -> GAConfig:
        return GAConfig(
            population_size=self.population,
            generations=self.generations,
            crossover_prob=self.crossover_prob,
            mutation_prob=self.mutation_prob,
            seed=self.seed + run_id,
            elitism=self.elitism,
        )

    def build_problem(self):
        if self.problem == "nqueens":
            return NQueensProblem(self.n)
        if self.points_file is not None:
            return TSPProblem(load_points(self.points_file))
        return TSPProblem(random_instance(self.n, self.seed))

    @property
    def policy_name(self) -> str:
        return "heterogeneous" if self.heterogeneous else "homogeneous"


KEYS = tuple(f.name for f in fields(ExperimentSpec))
_INT_KEYS = {"n", "population", "generations", "elitism", "runs", "seed"}
_FLOAT_KEYS = {"crossover_prob", "mutation_prob"}
_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _coerce(key: str, value: Any) -> Any:
    if value is None:
        return None
    if key in _INT_KEYS:
        if isinstance(value, bool):
            raise ConfigError(key, f"expected an integer, got {value!r}")
        try:
            return int(value)
        except (TypeError, ValueError):
            raise ConfigError(key, f"expected an integer, got {value!r}") from None
    if key in _FLOAT_KEYS:
        try:
            out = float(value)
        except (TypeError, ValueError):
            raise ConfigError(key, f"expected a number, got {value!r}") from None
        if not math.isfinite(out):
            raise ConfigError(key, f"expected a finite number, got {value!r}")
        return out
    if key == "heterogeneous":
        if isinstance(value, bool):
            return value
        text = str(value).strip().lower()
        if text in _TRUE:
            return True
        if text in _FALSE:
            return False
        raise ConfigError(key, f"expected true/false, got {value!r}")
    return str(value)


def read_config_text(text: str) -> dict[str, str]:
    """Parse ``key = value`` entries, one per line or comma separated; ``#`` starts a comment."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        for entry in line.split(","):
            entry = entry.strip()
            if not entry:
                continue
            key, sep, value = entry.partition("=")
            key = key.strip()
            if not sep:
                raise ConfigError(key or f"line {lineno}", "expected 'key = value'")
            if key not in KEYS:
                raise ConfigError(key, "unknown configuration key")
            out[key] = value.strip()
    return out


def parse_config(
    path: Union[str, PathLike, None] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    allow_large: bool = False,
) -> ExperimentSpec:
    """Build a validated spec from a config file and/or flag values.

    Flags (``overrides``) win over file entries; ``None`` flag values are
    ignored. ``n`` above the desk-scale cap needs ``allow_large``.
    """
    raw: dict[str, Any] = {}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
        raw.update(read_config_text(text))
    for key, value in (overrides or {}).items():
        if key not in KEYS:
            raise ConfigError(key, "unknown configuration key")
        if value is not None:
            raw[key] = value

    values = {key: _coerce(key, value) for key, value in raw.items()}
    if "problem" not in values:
        raise ConfigError("problem", "missing required key")
    spec = ExperimentSpec(**values)
    validate(spec, allow_large=allow_large)
    return spec


def validate(spec: ExperimentSpec, allow_large: bool = False) -> None:
    if spec.problem not in PROBLEMS:
        raise ConfigError("problem", f"must be one of {', '.join(PROBLEMS)}, got {spec.problem!r}")
    if spec.problem == "nqueens" and spec.n is None:
        raise ConfigError("n", "missing required key (nqueens needs a board size)")
    if spec.problem == "tsp" and spec.n is None and spec.points_file is None:
        raise ConfigError("n", "missing required key (tsp needs n or points_file)")
    if spec.n is not None:
        low = 1 if spec.problem == "nqueens" else 2
        if spec.n < low:
            raise ConfigError("n", f"must be at least {low}, got {spec.n}")
        if spec.n > DESK_MAX_N and not allow_large:
            raise ConfigError("n", f"{spec.n} exceeds the desk-scale cap of {DESK_MAX_N}; pass allow_large")
    if spec.population < 2:
        raise ConfigError("population", f"must be at least 2, got {spec.population}")
    if spec.generations < 0:
        raise ConfigError("generations", f"must be non-negative, got {spec.generations}")
    for key in ("crossover_prob", "mutation_prob"):
        if not 0.0 <= getattr(spec, key) <= 1.0:
            raise ConfigError(key, f"must be in [0, 1], got {getattr(spec, key)}")
    if not 0 <= spec.elitism < spec.population:
        raise ConfigError("elitism", f"must be in [0, population), got {spec.elitism}")
    if spec.runs < 1:
        raise ConfigError("runs", f"must be positive, got {spec.runs}")
    if not 0 <= spec.seed or spec.seed + spec.runs > MAX_SEED:
        raise ConfigError("seed", "seed + runs must fit in a 64-bit unsigned integer")


@dataclass(frozen=True)
class BenchRow:
    run_id: int
    policy: str
    solved: bool
    best_fitness: float
    crossover_ops: int
    objective_evals: int
    generations_used: int
    wall_ms: float
    seed: int

    @classmethod
    def from_report(cls, run_id: int, report: RunReport) -> "BenchRow":
        c = report.counters
        return cls(
            run_id=run_id,
            policy=report.policy,
            solved=report.solved,
            best_fitness=report.final_best.fitness,
            crossover_ops=c.crossover_ops,
            objective_evals=c.objective_evals,
            generations_used=report.generations_used,
            wall_ms=c.wall_ms,
            seed=report.seed,
        )


def _one_run(spec: ExperimentSpec, problem, run_id: int) -> RunReport:
    cfg = spec.ga_config(run_id)
    return evolve(cfg, cfg.policy(spec.heterogeneous), problem, target=problem.target)


def execute(spec: ExperimentSpec, workers: int = 1) -> list[RunReport]:
    """Run every seeded run of ``spec``; reports come back ordered by run id."""
    problem = spec.build_problem()
    ids = range(spec.runs)
    if workers <= 1:
        return [_one_run(spec, problem, r) for r in ids]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_one_run, [spec] * spec.runs, [problem] * spec.runs, ids))


def run_battery(spec: ExperimentSpec, workers: int = 1) -> list[BenchRow]:
    return [BenchRow.from_report(r, rep) for r, rep in enumerate(execute(spec, workers))]


def format_row(row: BenchRow) -> list[str]:
    return [
        str(row.run_id),
        row.policy,
        "true" if row.solved else "false",
        f"{row.best_fitness:.6f}",
        str(row.crossover_ops),
        str(row.objective_evals),
        str(row.generations_used),
        f"{row.wall_ms:.3f}",
        str(row.seed),
    ]


def emit_csv(rows: Sequence[BenchRow], path: Union[str, PathLike]) -> None:
    if not rows:
        raise ValueError("no rows to write")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        for row in rows:
            writer.writerow(format_row(row))


def read_csv(path: Union[str, PathLike]) -> list[BenchRow]:
    with open(path, encoding="utf-8", newline="") as fh:
        header = fh.readline().rstrip("\r\n")
        if header != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {header!r}")
        return [
            BenchRow(
                run_id=int(rec[0]),
                policy=rec[1],
                solved=rec[2] == "true",
                best_fitness=float(rec[3]),
                crossover_ops=int(rec[4]),
                objective_evals=int(rec[5]),
                generations_used=int(rec[6]),
                wall_ms=float(rec[7]),
                seed=int(rec[8]),
            )
            for rec in csv.reader(fh)
            if rec
        ]


def emit_svg(problem, genome: Sequence[int], path: Union[str, PathLike]) -> None:
    """Board SVG for N-queens, tour SVG for TSP."""
    Path(path).write_text(problem.render_svg(as_genome(genome)), encoding="utf-8")


@dataclass(frozen=True)
class Battery:
    spec: ExperimentSpec
    rows: tuple[BenchRow, ...]


@dataclass(frozen=True)
class PolicyStats:
    policy: str
    runs: int
    solved_rate: float
    crossover_ops: float
    objective_evals: float
    wall_ms: float
    best_fitness: float

    @classmethod
    def of(cls, rows: Sequence[BenchRow]) -> "PolicyStats":
        return cls(
            policy=rows[0].policy,
            runs=len(rows),
            solved_rate=sum(r.solved for r in rows) / len(rows),
            crossover_ops=statistics.fmean(r.crossover_ops for r in rows),
            objective_evals=statistics.fmean(r.objective_evals for r in rows),
            wall_ms=statistics.fmean(r.wall_ms for r in rows),
            best_fitness=statistics.fmean(r.best_fitness for r in rows),
        )


RATIO_FIELDS = ("solved_rate", "crossover_ops", "objective_evals", "wall_ms", "best_fitness")


def _ratio(a: float, b: float) -> float:
    if a == b:
        return 1.0
    if b == 0:
        return math.inf
    return a / b


@dataclass(frozen=True)
class Comparison:
    first: PolicyStats
    second: PolicyStats
    ratios: dict[str, float]

    def table(self) -> str:
        head = f"{'metric':<16}{self.first.policy:>16}{self.second.policy:>16}{'ratio':>10}"
        lines = [head, "-" * len(head)]
        for name in RATIO_FIELDS:
            a, b = getattr(self.first, name), getattr(self.second, name)
            lines.append(f"{name:<16}{a:>16.4f}{b:>16.4f}{self.ratios[name]:>10.4f}")
        return "\n".join(lines) + "\n"


def compare(first: Battery, second: Battery) -> Comparison:
    """Per-policy means and first/second ratios for two paired batteries.

    The batteries must share every spec field except the policy, and their
    rows must use the same per-run seeds.
    """
    if replace(first.spec, heterogeneous=True) != replace(second.spec, heterogeneous=True):
        diff = [
            k
            for k, v in asdict(first.spec).items()
            if k != "heterogeneous" and v != getattr(second.spec, k)
        ]
        raise ValueError(f"batteries differ in more than the policy: {', '.join(diff)}")
    if not first.rows or not second.rows:
        raise ValueError("cannot compare empty batteries")
    if [r.seed for r in first.rows] != [r.seed for r in second.rows]:
        raise ValueError("batteries were not run on the same seeds")
    a, b = PolicyStats.of(first.rows), PolicyStats.of(second.rows)
    return Comparison(a, b, {k: _ratio(getattr(a, k), getattr(b, k)) for k in RATIO_FIELDS})


def paired_batteries(spec: ExperimentSpec, workers: int = 1) -> tuple[Battery, Battery]:
    """Heterogeneous and homogeneous batteries over the same seeds."""
    het = replace(spec, heterogeneous=True)
    hom = replace(spec, heterogeneous=False)
    return (
        Battery(het, tuple(run_battery(het, workers))),
        Battery(hom, tuple(run_battery(hom, workers))),
    )


def format_genome(g: Genome) -> str:
    return ",".join(str(v) for v in g)


def parse_genome(text: str) -> Genome:
    try:
        return as_genome(int(v) for v in text.replace(",", " ").split())
    except ValueError as exc:
        raise ConfigError("genome", str(exc)) from None
