"""Acceptance suite: one test per criterion, summarised at the end of the run.

Run on its own with ``pytest tests/test_acceptance.py -v``. The terminal
summary prints a ``criterion N: PASS/FAIL`` line for every criterion.
"""

import subprocess
import sys
import time

import numpy as np
import pytest
from scipy import stats as sps

from aisnav.genome import (BehaviourGene, GeneSet, Genome, N_ANTIGENS, parse_gene_line,
                           parse_genome, random_gene, serialize_genome)
from aisnav.harness import (RunRecord, one_sided_paired_p, render_report, report,
                            run_battery, score_runs)
from aisnav.ltl_evolve import EvolutionConfig, evolve, evolve_population
from aisnav.perception import Antigen, SensorFrame, classify_antigen
from aisnav.platform import EPUCK, PIONEER, psi_to_radians, wheel_speeds_to_command
from aisnav.resources import load_world
from aisnav.stats import paired_t_test, welch_t_test
from aisnav.stl_ais import (GREEDY, IDIOTYPIC, AisState, execute_behaviour, idiotope_matrix,
                            relative_fitness, select_antibody, state_from_strengths)

criterion = pytest.mark.criterion


@criterion(1, "600 speed units convert to 4.098 rad/s")
def test_unit_conversion():
    assert psi_to_radians(600) == pytest.approx(4.098, abs=1e-3)


@criterion(2, "pioneer linear and angular speed conversion")
def test_speed_conversion():
    # hand arithmetic: 0.00683 * 0.095 * 600 and 1.575 * 0.00683 * 0.0205 * 600 / 0.052
    straight = wheel_speeds_to_command(600, 600, PIONEER, EPUCK)
    assert straight.v == pytest.approx(0.38931, abs=1e-6)
    assert straight.omega == 0.0
    spin = wheel_speeds_to_command(0, 600, PIONEER, EPUCK)
    assert spin.omega == pytest.approx(2.54445, abs=1e-4)


@criterion(3, "relative fitness sums to one, is scale invariant and matches fixtures")
def test_relative_fitness_properties():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        n = int(rng.integers(2, 11))
        t = rng.uniform(1, 900, n)
        c = rng.integers(0, 50, n).astype(float)
        rho = rng.uniform(0.1, 20)
        mu = relative_fitness(t, c, rho)
        assert abs(mu.sum() - 1.0) <= 1e-12
        k = rng.uniform(0.01, 100)
        assert relative_fitness(k * t, k * c, rho) == pytest.approx(mu, abs=1e-12)
    assert relative_fitness([100, 300], [0, 0], 8) == pytest.approx([0.75, 0.25], abs=1e-5)
    assert relative_fitness([100, 100], [0, 10], 1) == pytest.approx([0.52381, 0.47619],
                                                                     abs=1e-5)


@criterion(4, "genome text format parses and round-trips")
def test_genome_format():
    line = "0 2 537 80 51 2 37 76 50"
    gene = parse_gene_line(line)
    assert gene == BehaviourGene(0, 2, 537, 80, 51, 2, 37, 76, 50)
    assert (gene.antigen_index, gene.T, gene.S, gene.F, gene.A, gene.D, gene.R_f, gene.R_a,
            gene.score) == (0, 2, 537, 80, 51, 2, 37, 76, 50)
    assert gene.to_line() == line
    rng = np.random.default_rng(7)
    start = time.perf_counter()
    for _ in range(1000):
        sets = []
        for _ in range(int(rng.integers(2, 6))):
            genes = tuple(random_gene(i, rng) for i in range(N_ANTIGENS))
            sets.append(GeneSet(genes, int(rng.integers(1, 901)), int(rng.integers(0, 100))))
        g = Genome(tuple(sets))
        text = serialize_genome(g)
        assert parse_genome(text) == g
        assert serialize_genome(parse_genome(text)) == text
    assert time.perf_counter() - start < 1.0


# orientation tables written out by hand, independent of the profiles
EPUCK_SIDES = {**dict.fromkeys((0, 1, 2), "right"), **dict.fromkeys((3, 4), "rear"),
               **dict.fromkeys((5, 6, 7), "left")}
PIONEER_SIDES = {**dict.fromkeys(range(4, 10), "right"), **dict.fromkeys(range(10, 14), "rear"),
                 **dict.fromkeys((0, 1, 2, 3, 14, 15), "left")}
OBSTACLE = {"right": 3, "rear": 4, "left": 5}
COLLISION = {"right": 6, "rear": 7, "left": 8}


@criterion(5, "antigen classifier reproduces the orientation tables (72 cases)")
def test_classifier_brute_force():
    # band values: far, obstacle, collision. Infrared grows as obstacles near,
    # sonar shrinks.
    cases = [(EPUCK, EPUCK_SIDES, 0.0, (100.0, 1000.0, 3000.0)),
             (PIONEER, PIONEER_SIDES, 5.0, (1.0, 0.10, 0.02))]
    checked = 0
    for profile, sides, idle, bands in cases:
        for i in range(profile.sensor_count):
            for band, value in enumerate(bands):
                readings = [idle] * profile.sensor_count
                readings[i] = value
                code = classify_antigen(SensorFrame(tuple(readings)), profile).code
                expected = (1, OBSTACLE[sides[i]], COLLISION[sides[i]])[band]
                assert code == expected, (profile.name, i, band)
                checked += 1
    assert checked == 72


@criterion(6, "idiotope matrix marks one entry per column; zero coupling reduces to greedy")
def test_idiotope_and_reduction():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        n = int(rng.integers(2, 8))
        P = rng.random((n, N_ANTIGENS))
        I = idiotope_matrix(P)
        assert np.all(I.sum(axis=0) == 1.0)
        assert set(np.unique(I)) <= {0.0, 1.0}
        C = np.full(n, rng.uniform(0.1, 10))
        idio = AisState(P=P, I=I, C=C, mode=IDIOTYPIC, k_stim=0.0, k_supp=0.0)
        greedy = state_from_strengths(P, GREEDY)
        for code in range(1, 9):
            assert select_antibody(idio, Antigen(code)) == select_antibody(greedy, Antigen(code))


@criterion(7, "wander-both decoding hits the 80% turning and 37% right-turn frequencies")
def test_behaviour_decoding():
    gene = BehaviourGene(0, 2, 537, 80, 51, 2, 37, 76)
    rng = np.random.default_rng(0)
    start = time.perf_counter()
    outs = [execute_behaviour(gene, None, rng) for _ in range(100_000)]
    turning = [o for o in outs if (o.L, o.R) != (537, 537)]
    right = [o for o in turning if o.R < o.L]
    left = [o for o in turning if o.L < o.R]
    assert len(turning) / len(outs) == pytest.approx(0.80, abs=0.01)
    assert len(right) / len(turning) == pytest.approx(0.37, abs=0.01)
    assert len(right) + len(left) == len(turning)
    assert all((o.L, o.R) == (537, 537 * 0.24) for o in right)
    assert all((o.L, o.R) == (537 * 0.49, 537) for o in left)
    assert time.perf_counter() - start < 5.0


def _cli(*args):
    return subprocess.run([sys.executable, "-m", "aisnav.cli", *args], capture_output=True,
                          text=True, check=True)


@criterion(8, "run and experiment are byte-identical across repeats")
def test_cli_determinism(tmp_path):
    start = time.perf_counter()
    trails, results = [], []
    for k in range(2):
        trail = tmp_path / f"trail{k}.csv"
        res = tmp_path / f"results{k}.csv"
        _cli("run", "--world", "maze_s1", "--profile", "pioneer", "--seed", "42",
             "--trail", str(trail))
        _cli("experiment", "--world", "corridor", "--profile", "epuck", "--runs", "3",
             "--paired", "--seed", "42", "--results", str(res))
        trails.append(trail.read_bytes())
        results.append(res.read_bytes())
    assert trails[0] == trails[1] and len(trails[0].splitlines()) > 2
    assert results[0] == results[1] and len(results[0].splitlines()) == 7
    assert time.perf_counter() - start < 60.0


@criterion(9, "GA keeps its elite every generation and finishes within budget")
def test_ga_sanity():
    world = load_world("corridor")
    cfg = EvolutionConfig(seed=0)
    assert (cfg.populations, cfg.population_size, cfg.max_generations) == (5, 10, 20)
    start = time.perf_counter()
    for p in range(cfg.populations):
        rows = []
        evolve_population(world, EPUCK, cfg, p, rows.append)
        best = [r["best_cost"] for r in rows]
        assert 1 <= len(best) <= 20
        assert all(b <= a for a, b in zip(best, best[1:])), best
        assert best[-1] <= best[0]
    assert time.perf_counter() - start < 300.0


@criterion(10, "Welch and paired t tests match fixtures and the reference library")
def test_statistics_oracle():
    a, b = [1, 2, 3, 4, 5], [2, 3, 4, 5, 6]
    w = welch_t_test(a, b)
    assert w.statistic == pytest.approx(-1.0, abs=1e-12)
    assert w.pvalue == pytest.approx(0.3466, abs=1e-3)
    ref = sps.ttest_ind(a, b, equal_var=False)
    assert w.pvalue == pytest.approx(ref.pvalue, abs=1e-10)
    p = paired_t_test([1, 2, 3, 4])
    assert p.statistic == pytest.approx(3.873, abs=1e-3)
    assert p.pvalue == pytest.approx(sps.ttest_1samp([1, 2, 3, 4], 0).pvalue, abs=1e-10)


MAZE_WORLDS = ("maze_s1", "maze_s2", "retrieval_s3")


@criterion(11, "idiotypic selection beats greedy on an evolved genome")
def test_direction_of_effect():
    """Evolve the default genome, then run 30 paired runs per mode per world.

    On the maze world every condition must hold: lower idiotypic mean time,
    no more failures, one-sided paired p < 0.05, and mean collisions of at
    most 10 in both modes. Idiotypic mean time must also be lower in every
    world tested.
    """
    start = time.perf_counter()
    genome = evolve(load_world("rooms"), EPUCK, EvolutionConfig(seed=0))
    problems = []
    lines = []
    for name in MAZE_WORLDS:
        recs, _ = score_runs(run_battery(load_world(name), genome, PIONEER, 30, paired=True,
                                         base_seed=0))
        rep = report(recs, name, paired=True)
        idio, greedy = rep.modes[IDIOTYPIC], rep.modes[GREEDY]
        p = one_sided_paired_p(recs)
        lines.append(f"{name}: idiotypic t={idio.mean_t:.1f} c={idio.mean_c:.2f} "
                     f"F={idio.fail_pct:.0f}%  greedy t={greedy.mean_t:.1f} "
                     f"c={greedy.mean_c:.2f} F={greedy.fail_pct:.0f}%  one-sided p={p:.4f}")
        print(render_report(rep))
        if not idio.mean_t < greedy.mean_t:
            problems.append(f"{name}: idiotypic mean time not below greedy")
        if name == "maze_s1":
            if idio.fail_pct > greedy.fail_pct:
                problems.append(f"{name}: idiotypic fails more often")
            if not p < 0.05:
                problems.append(f"{name}: one-sided paired p = {p:.4f}")
            if max(idio.mean_c, greedy.mean_c) > 10:
                problems.append(f"{name}: mean collisions above 10")
    elapsed = time.perf_counter() - start
    lines.append(f"elapsed {elapsed:.0f} s")
    print("\n".join(lines))
    if elapsed >= 600:
        problems.append("runtime budget exceeded")
    assert not problems, "\n".join(problems + lines)


@criterion(12, "report reproduces the S1 fixture means 176 and 336")
def test_report_fixture():
    records = []
    # idiotypic: t mean 176, c mean 2, no failures
    for k, (t, c) in enumerate([(150, 1), (202, 3)] * 15):
        records.append(RunRecord(len(records), "S1", IDIOTYPIC, k, float(t), c, False, pair=k))
    # greedy: t mean 336 with 5 of 30 runs failing at the cap, c mean 4
    greedy = [(900, 4)] * 5 + [(200, 4), (246.4, 4)] * 12 + [(223.2, 4)]
    for k, (t, c) in enumerate(greedy):
        records.append(RunRecord(len(records), "S1", GREEDY, k, float(t), c, t >= 900, pair=k))
    scored, sigma = score_runs(records)
    text = render_report(report(scored, "S1", paired=False, sigma=sigma))
    row = text.splitlines()[1].split()
    assert row[0] == "S1"
    assert (row[4], row[5], row[9]) == ("176", "2", "0")
    assert (row[10], row[11], row[15]) == ("336", "4", "17")
    assert "mean t = 176.00" in text and "mean t = 336.00" in text
