import math
from dataclasses import replace

import pytest

from hetga.bench import (
    CSV_HEADER,
    Battery,
    BenchRow,
    ConfigError,
    ExperimentSpec,
    compare,
    emit_csv,
    emit_svg,
    paired_batteries,
    parse_config,
    parse_genome,
    read_csv,
    run_battery,
)
from hetga.nqueens import NQueensProblem
from hetga.tsp import PointSet, TSPProblem

TABLE_II_ROW1 = "problem = nqueens, n = 20, population = 300, crossover_prob = 0.9, mutation_prob = 0.1, generations = 500, runs = 10"


def write(tmp_path, text, name="exp.conf"):
    f = tmp_path / name
    f.write_text(text)
    return f


class TestParseConfig:
    def test_table_two_row(self, tmp_path):
        spec = parse_config(write(tmp_path, TABLE_II_ROW1))
        assert spec == ExperimentSpec(
            problem="nqueens", n=20, population=300, crossover_prob=0.9,
            mutation_prob=0.1, generations=500, runs=10,
        )

    def test_line_oriented(self, tmp_path):
        text = "# tsp run\nproblem = tsp\nn = 30\nheterogeneous = false\nseed = 7\n"
        spec = parse_config(write(tmp_path, text))
        assert (spec.problem, spec.n, spec.heterogeneous, spec.seed) == ("tsp", 30, False, 7)

    def test_range_error(self, tmp_path):
        with pytest.raises(ConfigError) as exc:
            parse_config(write(tmp_path, "problem = nqueens\nn = 8\ncrossover_prob = 1.5\n"))
        assert exc.value.key == "crossover_prob"

    def test_flags_only(self, tmp_path):
        spec = parse_config(write(tmp_path, ""), {"problem": "nqueens", "n": 8, "runs": 2})
        assert spec.n == 8 and spec.runs == 2

    def test_flags_override_file(self, tmp_path):
        spec = parse_config(write(tmp_path, TABLE_II_ROW1), {"n": 8, "runs": None})
        assert spec.n == 8 and spec.runs == 10

    @pytest.mark.parametrize(
        "text,key",
        [
            ("problem = nqueens\nn = 8\ncolour = red\n", "colour"),
            ("n = 8\n", "problem"),
            ("problem = nqueens\n", "n"),
            ("problem = tsp\n", "n"),
            ("problem = knapsack\nn = 3\n", "problem"),
            ("problem = nqueens\nn = eight\n", "n"),
            ("problem = nqueens\nn = 8\nelitism = 300\n", "elitism"),
            ("problem = nqueens\nn = 8\nruns = 0\n", "runs"),
            ("problem = nqueens\nn = 8\nheterogeneous = maybe\n", "heterogeneous"),
            ("problem = nqueens\nn = 500\n", "n"),
            ("problem = nqueens\nn = 8\nseed = -1\n", "seed"),
            ("problem = nqueens\nn = 8\nmutation_prob = nan\n", "mutation_prob"),
        ],
    )
    def test_errors_name_the_key(self, tmp_path, text, key):
        with pytest.raises(ConfigError) as exc:
            parse_config(write(tmp_path, text))
        assert exc.value.key == key
        assert key in str(exc.value)

    def test_large_n_behind_flag(self, tmp_path):
        spec = parse_config(write(tmp_path, "problem = nqueens\nn = 500\n"), allow_large=True)
        assert spec.n == 500

    def test_unknown_flag(self):
        with pytest.raises(ConfigError):
            parse_config(None, {"problem": "nqueens", "n": 4, "colour": "red"})

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            parse_config(tmp_path / "nope.conf")


def small(**kw):
    base = dict(problem="nqueens", n=8, population=60, generations=40, runs=3, seed=10)
    base.update(kw)
    return ExperimentSpec(**base)


class TestBattery:
    def test_rows_and_seeds(self):
        rows = run_battery(small())
        assert [r.run_id for r in rows] == [0, 1, 2]
        assert [r.seed for r in rows] == [10, 11, 12]
        assert all(r.policy == "heterogeneous" for r in rows)

    def test_zero_generations_unsolved(self):
        (row,) = run_battery(small(n=20, runs=1, generations=0, population=300))
        assert not row.solved
        assert row.objective_evals == 300 and row.crossover_ops == 0

    def test_deterministic_except_wall_time(self):
        spec = small(problem="tsp", n=15)
        a = [replace(r, wall_ms=0) for r in run_battery(spec)]
        b = [replace(r, wall_ms=0) for r in run_battery(spec)]
        assert a == b

    def test_parallel_runs_match_sequential(self):
        spec = small(runs=2)
        seq = [replace(r, wall_ms=0) for r in run_battery(spec)]
        par = [replace(r, wall_ms=0) for r in run_battery(spec, workers=2)]
        assert seq == par

    def test_tsp_from_points_file(self, tmp_path):
        f = tmp_path / "sq.txt"
        f.write_text("0 0\n0 1\n1 1\n1 0\n")
        rows = run_battery(small(problem="tsp", n=None, points_file=str(f), runs=1))
        assert rows[0].best_fitness == 4.0 and not rows[0].solved


def row(run_id=0, policy="heterogeneous", **kw):
    base = dict(
        run_id=run_id, policy=policy, solved=True, best_fitness=1.25, crossover_ops=10,
        objective_evals=100, generations_used=5, wall_ms=3.5, seed=run_id,
    )
    base.update(kw)
    return BenchRow(**base)


class TestCsv:
    def test_single_row(self, tmp_path):
        f = tmp_path / "out.csv"
        emit_csv([row(best_fitness=1 / 3)], f)
        lines = f.read_text().splitlines()
        assert lines == [CSV_HEADER, "0,heterogeneous,true,0.333333,10,100,5,3.500,0"]

    def test_round_trip(self, tmp_path):
        rows = [row(i, best_fitness=i * 1.5, solved=i % 2 == 0) for i in range(4)]
        f = tmp_path / "out.csv"
        emit_csv(rows, f)
        assert read_csv(f) == rows

    def test_reemit_identical(self, tmp_path):
        rows = run_battery(small(runs=2))
        emit_csv(rows, tmp_path / "a.csv")
        emit_csv(rows, tmp_path / "b.csv")
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_empty_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            emit_csv([], tmp_path / "x.csv")

    def test_unwritable(self, tmp_path):
        with pytest.raises(OSError):
            emit_csv([row()], tmp_path / "missing-dir" / "x.csv")

    def test_svg_dispatch(self, tmp_path):
        emit_svg(NQueensProblem(4), (1, 3, 0, 2), tmp_path / "q.svg")
        assert "<rect" in (tmp_path / "q.svg").read_text()
        emit_svg(TSPProblem(PointSet(((0, 0), (1, 0), (1, 1)))), (0, 1, 2), tmp_path / "t.svg")
        assert "<polyline" in (tmp_path / "t.svg").read_text()


class TestCompare:
    def test_identical_batteries(self):
        spec = small()
        rows = tuple(run_battery(spec))
        cmp = compare(Battery(spec, rows), Battery(spec, rows))
        assert all(v == 1.0 for v in cmp.ratios.values())

    def test_swap_inverts_ratios(self):
        het, hom = paired_batteries(small(n=10, generations=30))
        ab, ba = compare(het, hom), compare(hom, het)
        for k, v in ab.ratios.items():
            w = ba.ratios[k]
            if v in (0.0, math.inf):
                assert w in (0.0, math.inf) and w != v
            else:
                assert v * w == pytest.approx(1.0)
        assert ab.first == ba.second

    def test_different_n_rejected(self):
        a = small()
        b = small(n=9)
        with pytest.raises(ValueError, match="n"):
            compare(Battery(a, (row(),)), Battery(b, (row(),)))

    def test_unpaired_seeds_rejected(self):
        spec = small()
        with pytest.raises(ValueError, match="seeds"):
            compare(Battery(spec, (row(seed=1),)), Battery(spec, (row(seed=2),)))

    def test_means(self):
        spec = small()
        a = Battery(spec, (row(0, crossover_ops=10), row(1, crossover_ops=30, solved=False)))
        b = Battery(replace(spec, heterogeneous=False),
                    (row(0, "homogeneous", crossover_ops=40), row(1, "homogeneous", crossover_ops=40)))
        cmp = compare(a, b)
        assert cmp.first.crossover_ops == 20 and cmp.first.solved_rate == 0.5
        assert cmp.ratios["crossover_ops"] == 0.5
        assert cmp.ratios["solved_rate"] == 0.5
        assert "crossover_ops" in cmp.table()


def test_parse_genome():
    assert parse_genome("2,0,1\n") == (2, 0, 1)
    with pytest.raises(ConfigError):
        parse_genome("0,0")
