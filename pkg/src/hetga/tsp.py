"""Euclidean symmetric TSP over a fixed point set."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from os import PathLike
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .engine import Genome, as_genome

MAX_BRUTE_FORCE = 10

Point = tuple[float, float]


class PointFileError(ValueError):
    pass


def distance(p: Point, q: Point) -> float:
    return math.sqrt((p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2)


@dataclass(frozen=True)
class PointSet:
    points: tuple[Point, ...]
    _dist: tuple[tuple[float, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pts = tuple((float(x), float(y)) for x, y in self.points)
        if len(pts) < 2:
            raise ValueError(f"a TSP instance needs at least 2 points, got {len(pts)}")
        if not all(math.isfinite(c) for p in pts for c in p):
            raise ValueError("point coordinates must be finite")
        object.__setattr__(self, "points", pts)
        object.__setattr__(
            self, "_dist", tuple(tuple(distance(p, q) for q in pts) for p in pts)
        )

    def __len__(self) -> int:
        return len(self.points)


def tour_length(t: Sequence[int], ps: PointSet) -> float:
    """Sum of consecutive edges along ``t`` plus the edge closing the cycle."""
    n = len(ps)
    if len(t) != n:
        raise ValueError(f"tour has {len(t)} stops but the instance has {n} points")
    d = ps._dist
    total = 0.0
    for i in range(n - 1):
        total += d[t[i]][t[i + 1]]
    return total + d[t[n - 1]][t[0]]


def load_points(path: Union[str, PathLike]) -> PointSet:
    """Read ``x y`` lines; blank lines and ``#`` comments are skipped."""
    points = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            fields = text.split()
            if len(fields) != 2:
                raise PointFileError(f"{path}:{lineno}: expected 'x y', got {text!r}")
            try:
                x, y = float(fields[0]), float(fields[1])
            except ValueError:
                raise PointFileError(f"{path}:{lineno}: not a number in {text!r}") from None
            if not (math.isfinite(x) and math.isfinite(y)):
                raise PointFileError(f"{path}:{lineno}: coordinates must be finite")
            points.append((x, y))
    if len(points) < 2:
        raise PointFileError(f"{path}: need at least 2 points, found {len(points)}")
    return PointSet(tuple(points))


def save_points(ps: PointSet, path: Union[str, PathLike]) -> None:
    lines = [f"{x!r} {y!r}\n" for x, y in ps.points]
    Path(path).write_text("".join(lines), encoding="utf-8")


def random_instance(
    n: int, seed: int, box: tuple[float, float, float, float] = (0.0, 0.0, 1.0, 1.0)
) -> PointSet:
    """``n`` points uniform in ``box = (xmin, ymin, xmax, ymax)``."""
    if n < 2:
        raise ValueError(f"a TSP instance needs at least 2 points, got {n}")
    xmin, ymin, xmax, ymax = box
    rng = np.random.default_rng(seed)
    xs = rng.uniform(xmin, xmax, size=n)
    ys = rng.uniform(ymin, ymax, size=n)
    return PointSet(tuple(zip(xs.tolist(), ys.tolist())))


def brute_force_optimal(ps: PointSet) -> tuple[Genome, float]:
    """Exact optimum by enumeration, start fixed at 0 and each direction counted once."""
    n = len(ps)
    if n > MAX_BRUTE_FORCE:
        raise ValueError(f"brute force is capped at {MAX_BRUTE_FORCE} points (got {n})")
    best_tour: Genome = tuple(range(n))
    best = tour_length(best_tour, ps)
    for rest in itertools.permutations(range(1, n)):
        if len(rest) > 1 and rest[0] > rest[-1]:
            continue
        t = (0,) + rest
        length = tour_length(t, ps)
        if length < best:
            best, best_tour = length, t
    return best_tour, best


def render_tour(t: Sequence[int], ps: PointSet, size: int = 600, margin: int = 20) -> str:
    """SVG with the closed tour as one polyline (first stop repeated at the end)."""
    t = as_genome(t)
    if len(t) != len(ps):
        raise ValueError(f"tour has {len(t)} stops but the instance has {len(ps)} points")
    xs = [p[0] for p in ps.points]
    ys = [p[1] for p in ps.points]
    span = max(max(xs) - min(xs), max(ys) - min(ys)) or 1.0
    scale = (size - 2 * margin) / span

    def to_px(p: Point) -> tuple[float, float]:
        # svg y grows downwards
        return margin + (p[0] - min(xs)) * scale, size - margin - (p[1] - min(ys)) * scale

    verts = [to_px(ps.points[i]) for i in t] + [to_px(ps.points[t[0]])]
    coords = " ".join(f"{x:.3f},{y:.3f}" for x, y in verts)
    dots = "\n".join(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="2.5" fill="#c0392b"/>' for x, y in verts[:-1])
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">\n'
        f"<title>tour of {len(t)} points, length {tour_length(t, ps):.6f}</title>\n"
        f'<polyline points="{coords}" fill="none" stroke="#2c3e50" stroke-width="1.5"/>\n'
        f"{dots}\n"
        "</svg>\n"
    )


@dataclass(frozen=True)
class TSPProblem:
    points: PointSet
    target: Optional[float] = None

    @property
    def n(self) -> int:
        return len(self.points)

    def objective(self, genome: Genome) -> float:
        return tour_length(genome, self.points)

    def random_genome(self, rng: np.random.Generator) -> Genome:
        return tuple(rng.permutation(self.n).tolist())

    def render_svg(self, genome: Genome) -> str:
        return render_tour(genome, self.points)
