"""Command line entry point: ``hetga run | compare | oracle | render``."""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace
from pathlib import Path

from . import bench, nqueens, tsp
from .bench import ConfigError

EXIT_CONFIG = 2
EXIT_IO = 3


def _add_spec_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("-c", "--config", help="key = value config file")
    p.add_argument("--problem", choices=bench.PROBLEMS)
    p.add_argument("--n", type=int, help="board size or number of random points")
    p.add_argument("--points-file", dest="points_file", help="TSP point file ('x y' per line)")
    p.add_argument("--population", type=int)
    p.add_argument("--generations", type=int)
    p.add_argument("--crossover-prob", dest="crossover_prob", type=float)
    p.add_argument("--mutation-prob", dest="mutation_prob", type=float)
    p.add_argument("--elitism", type=int)
    p.add_argument("--runs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--allow-large", action="store_true", help=f"permit n > {bench.DESK_MAX_N}")
    p.add_argument("--workers", type=int, default=1, help="parallel runs (results are identical)")
    p.add_argument("--csv", help="write one row per run to this CSV file")
    p.add_argument("--svg", help="render the best individual found to this SVG file")
    p.add_argument("--best-out", help="save the best genome (comma separated) to this file")


def _spec_from_args(args, heterogeneous=None) -> bench.ExperimentSpec:
    overrides = {key: getattr(args, key, None) for key in bench.KEYS if key != "heterogeneous"}
    overrides["heterogeneous"] = heterogeneous
    return bench.parse_config(args.config, overrides, allow_large=args.allow_large)


def _write_best(args, spec, reports) -> None:
    best = min((r.final_best for r in reports), key=lambda ind: ind.fitness)
    if args.svg:
        bench.emit_svg(spec.build_problem(), best.genome, args.svg)
    if args.best_out:
        Path(args.best_out).write_text(bench.format_genome(best.genome) + "\n", encoding="utf-8")


def cmd_run(args) -> int:
    het = None if args.policy is None else args.policy == "heterogeneous"
    spec = _spec_from_args(args, het)
    reports = bench.execute(spec, args.workers)
    rows = [bench.BenchRow.from_report(i, r) for i, r in enumerate(reports)]
    print(bench.CSV_HEADER)
    for row in rows:
        print(",".join(bench.format_row(row)))
    solved = sum(r.solved for r in rows)
    print(f"# {spec.policy_name}: solved {solved}/{len(rows)}", file=sys.stderr)
    if args.csv:
        bench.emit_csv(rows, args.csv)
    _write_best(args, spec, reports)
    return 0


def cmd_compare(args) -> int:
    spec = _spec_from_args(args)
    batteries, reports = [], []
    for het in (True, False):
        side = replace(spec, heterogeneous=het)
        reps = bench.execute(side, args.workers)
        rows = tuple(bench.BenchRow.from_report(i, r) for i, r in enumerate(reps))
        batteries.append(bench.Battery(side, rows))
        reports.extend(reps)
    print(bench.compare(*batteries).table(), end="")
    if args.csv:
        bench.emit_csv(batteries[0].rows + batteries[1].rows, args.csv)
    _write_best(args, spec, reports)
    return 0


def cmd_oracle(args) -> int:
    if args.problem == "nqueens":
        print("n,solutions,combinations,ratio")
        for n in range(1, args.max_n + 1):
            sols = nqueens.enumerate_solutions(n)
            combos = math.factorial(n)
            print(f"{n},{sols},{combos},{sols / combos:.4e}")
        return 0
    if args.points_file:
        ps = tsp.load_points(args.points_file)
    elif args.n:
        ps = tsp.random_instance(args.n, args.seed)
    else:
        raise ConfigError("n", "oracle tsp needs --points-file or --n")
    tour, length = tsp.brute_force_optimal(ps)
    print(f"length {length:.6f}")
    print(f"tour {bench.format_genome(tour)}")
    return 0


def cmd_render(args) -> int:
    if args.genome_file:
        text = Path(args.genome_file).read_text(encoding="utf-8")
    elif args.genome:
        text = args.genome
    else:
        raise ConfigError("genome", "pass --genome or --genome-file")
    genome = bench.parse_genome(text)
    if args.problem == "nqueens":
        problem = nqueens.NQueensProblem(len(genome))
        print(nqueens.render_board(genome), end="")
        print(f"conflicts {nqueens.conflicts(genome)}")
    else:
        if args.points_file:
            ps = tsp.load_points(args.points_file)
        elif args.n:
            ps = tsp.random_instance(args.n, args.seed)
        else:
            raise ConfigError("points_file", "render tsp needs --points-file or --n")
        if len(ps) != len(genome):
            raise ConfigError("genome", f"has {len(genome)} stops, instance has {len(ps)} points")
        problem = tsp.TSPProblem(ps)
        print(f"length {tsp.tour_length(genome, ps):.6f}")
    if args.out:
        bench.emit_svg(problem, genome, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hetga", description="GA benchmarks with fitness-gated crossover"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one battery under one policy")
    _add_spec_flags(run)
    pol = run.add_mutually_exclusive_group()
    pol.add_argument("--heterogeneous", dest="policy", action="store_const", const="heterogeneous")
    pol.add_argument("--homogeneous", dest="policy", action="store_const", const="homogeneous")
    run.set_defaults(func=cmd_run, policy=None)

    cmp_ = sub.add_parser("compare", help="run both policies on paired seeds and compare")
    _add_spec_flags(cmp_)
    cmp_.set_defaults(func=cmd_compare)

    orc = sub.add_parser("oracle", help="exact N-queens counts or brute-force TSP optimum")
    orc.add_argument("problem", choices=bench.PROBLEMS)
    orc.add_argument("--max-n", type=int, default=8, help="largest board for nqueens")
    orc.add_argument("--points-file")
    orc.add_argument("--n", type=int, help="random TSP instance size")
    orc.add_argument("--seed", type=int, default=0)
    orc.set_defaults(func=cmd_oracle)

    ren = sub.add_parser("render", help="render a saved genome (text board / SVG)")
    ren.add_argument("problem", choices=bench.PROBLEMS)
    ren.add_argument("--genome", help="comma separated permutation")
    ren.add_argument("--genome-file", help="file holding a comma separated permutation")
    ren.add_argument("--points-file")
    ren.add_argument("--n", type=int, help="random TSP instance size")
    ren.add_argument("--seed", type=int, default=0)
    ren.add_argument("-o", "--out", help="SVG output path")
    ren.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"hetga: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (tsp.PointFileError, ValueError) as exc:
        print(f"hetga: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"hetga: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
