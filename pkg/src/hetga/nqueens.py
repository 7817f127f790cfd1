"""N-queens as a permutation problem.

A board is encoded as ``g[column] = row``, so rows and columns hold one queen
each by construction and only diagonals can clash.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence
from xml.sax.saxutils import escape

import numpy as np

from .engine import Genome, as_genome

MAX_ENUMERATE = 10


def conflicts(g: Sequence[int]) -> int:
    """Count attacking pairs, visiting each unordered pair once (inner index < outer).

    Works on any sequence, not only permutations: same-row pairs are
    counted too.
    """
    x = 0
    for col in range(len(g)):
        row = g[col]
        for i in range(col):
            if g[i] == row or abs(row - g[i]) == col - i:
                x += 1
    return x


def is_solution(g: Sequence[int]) -> bool:
    return conflicts(g) == 0


def attacked(g: Sequence[int]) -> list[bool]:
    """Per column, whether that queen is attacked by any other."""
    n = len(g)
    hit = [False] * n
    for col in range(n):
        for i in range(col):
            if g[i] == g[col] or abs(g[col] - g[i]) == col - i:
                hit[i] = hit[col] = True
    return hit


def random_genome(n: int, rng: np.random.Generator) -> Genome:
    if n < 1:
        raise ValueError(f"board size must be positive, got {n}")
    return tuple(rng.permutation(n).tolist())


def enumerate_solutions(n: int) -> int:
    """Exact number of solutions of the n-queens problem by backtracking."""
    if n < 1:
        raise ValueError(f"board size must be positive, got {n}")
    if n > MAX_ENUMERATE:
        raise ValueError(
            f"enumerate_solutions is capped at n={MAX_ENUMERATE} (got n={n}); "
            "the search grows factorially"
        )
    rows = [False] * n
    up = [False] * (2 * n - 1)
    down = [False] * (2 * n - 1)

    def place(col: int) -> int:
        if col == n:
            return 1
        count = 0
        for row in range(n):
            if rows[row] or up[col - row + n - 1] or down[col + row]:
                continue
            rows[row] = up[col - row + n - 1] = down[col + row] = True
            count += place(col + 1)
            rows[row] = up[col - row + n - 1] = down[col + row] = False
        return count

    return place(0)


def render_board(g: Sequence[int]) -> str:
    """Text board: ``*`` marks a safe queen, ``o`` an attacked one, ``.`` an empty square.

    Row 0 is printed at the top.
    """
    n = len(g)
    hit = attacked(g)
    grid = [["."] * n for _ in range(n)]
    for col, row in enumerate(g):
        grid[row][col] = "o" if hit[col] else "*"
    return "\n".join(" ".join(line) for line in grid) + "\n"


def render_board_svg(g: Sequence[int], cell: int = 24) -> str:
    n = len(g)
    hit = attacked(g)
    side = n * cell
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{side}" height="{side}" '
        f'viewBox="0 0 {side} {side}">',
        f"<title>{escape(f'{n}-queens, {conflicts(g)} conflicts')}</title>",
    ]
    for r in range(n):
        for c in range(n):
            fill = "#f0d9b5" if (r + c) % 2 == 0 else "#b58863"
            parts.append(
                f'<rect x="{c * cell}" y="{r * cell}" width="{cell}" height="{cell}" fill="{fill}"/>'
            )
    half = cell / 2
    for col, row in enumerate(g):
        cx, cy = col * cell + half, row * cell + half
        if hit[col]:
            parts.append(
                f'<circle class="attacked" cx="{cx}" cy="{cy}" r="{cell * 0.35}" '
                'fill="none" stroke="#1f4fd1" stroke-width="2"/>'
            )
        else:
            parts.append(
                f'<text class="safe" x="{cx}" y="{cy}" font-size="{cell * 0.8}" '
                'text-anchor="middle" dominant-baseline="central">*</text>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


@dataclass(frozen=True)
class NQueensProblem:
    n: int
    target: Optional[float] = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"board size must be positive, got {self.n}")

    def objective(self, genome: Genome) -> float:
        return float(conflicts(genome))

    def random_genome(self, rng: np.random.Generator) -> Genome:
        return random_genome(self.n, rng)

    def render_svg(self, genome: Genome) -> str:
        return render_board_svg(as_genome(genome))
