import math
import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aisnav.harness import (RESULTS_HEADER, RunRecord, classify, jittered_start,
                            one_sided_paired_p, parse_results_csv, parse_trail_csv, phi, report,
                            render_report, results_csv, run_battery, scenario_seed, score_runs,
                            sigma_ratio, trail_csv, trail_svg)
from aisnav.platform import PIONEER
from aisnav.resources import load_genome, load_world
from aisnav.simworld import wall_distance
from aisnav.stats import welch_t_test
from aisnav.stl_ais import GREEDY, IDIOTYPIC


def _records(t_idio, t_greedy, c_idio=None, c_greedy=None):
    c_idio = c_idio or [0] * len(t_idio)
    c_greedy = c_greedy or [0] * len(t_greedy)
    out = []
    for mode, ts, cs in ((IDIOTYPIC, t_idio, c_idio), (GREEDY, t_greedy, c_greedy)):
        for k, (t, c) in enumerate(zip(ts, cs)):
            out.append(RunRecord(len(out), "w", mode, k, float(t), int(c), t >= 900, pair=k))
    return out


class TestScoring:
    def test_phi_values(self):
        assert phi(200, 4, 50) == 200
        assert phi(300, 0, 12.0) == 150

    def test_sigma_over_all_records(self):
        recs = _records([100, 300], [200, 200], [1, 3], [0, 0])
        assert sigma_ratio(recs) == pytest.approx(200 / 1.0)

    def test_collision_free_world(self):
        recs, sigma = score_runs(_records([100, 300], [50, 70]))
        assert sigma == 0.0
        assert [r.phi for r in recs] == [50, 150, 25, 35]

    def test_empty(self):
        with pytest.raises(ValueError):
            score_runs([])

    @given(st.floats(0, 900), st.floats(0, 900), st.integers(0, 50), st.floats(0, 500))
    def test_phi_monotone(self, t1, t2, c, sigma):
        lo, hi = sorted((t1, t2))
        assert phi(lo, c, sigma) <= phi(hi, c, sigma)
        assert phi(lo, c, sigma) <= phi(lo, c + 1, sigma)


class TestClassify:
    def _scored(self, costs, failed=()):
        return [RunRecord(i, "w", IDIOTYPIC, i, 0.0, 0, i in failed, phi=float(p))
                for i, p in enumerate(costs)]

    def test_one_to_ten(self):
        labels = classify(self._scored(range(1, 11)))
        # the mean is 5.5, so costs 1-5 are strictly below it
        assert [i + 1 for i, lab in enumerate(labels) if lab.good] == [1, 2, 3, 4, 5]
        assert [i + 1 for i, lab in enumerate(labels) if lab.bad] == [10]

    def test_all_equal(self):
        labels = classify(self._scored([5.0] * 6))
        assert not any(lab.good for lab in labels)

    def test_failed_and_bad_are_independent(self):
        labels = classify(self._scored([1, 2, 3, 900], failed=(3,)))
        assert labels[3].bad and labels[3].failed and not labels[0].failed

    @settings(max_examples=50)
    @given(st.lists(st.floats(0, 1000), min_size=2, max_size=40), st.randoms())
    def test_order_invariant(self, costs, rnd):
        recs = self._scored(costs)
        shuffled = recs[:]
        rnd.shuffle(shuffled)
        a = {r.run_id: lab for r, lab in zip(recs, classify(recs))}
        b = {r.run_id: lab for r, lab in zip(shuffled, classify(shuffled))}
        assert a == b


class TestReport:
    def test_table_fixture_means(self):
        recs, sigma = score_runs(_records([170, 182] * 15, [300, 372] * 15,
                                          [2, 2] * 15, [2, 2] * 15))
        rep = report(recs, "S1", paired=False, sigma=sigma)
        text = render_report(rep)
        row = text.splitlines()[1].split()
        assert row[0] == "S1"
        assert row[4] == "176" and row[10] == "336"
        assert rep.modes[IDIOTYPIC].mean_t == pytest.approx(176, abs=1e-12)

    def test_identical_modes(self):
        recs, sigma = score_runs(_records([100, 200, 300], [100, 200, 300], [1, 0, 2], [1, 0, 2]))
        rep = report(recs, paired=True)
        assert all(rep.tests[m].pvalue == 1.0 for m in ("t", "c", "phi"))
        assert not any(rep.significant(m) for m in ("t", "c", "phi"))

    def test_percentages_consistent(self):
        recs, _ = score_runs(_records([100, 900, 300, 400], [900, 900, 200, 100]))
        rep = report(recs)
        for s in rep.modes.values():
            for pct in (s.good_pct, s.bad_pct, s.fail_pct):
                assert (pct * s.runs / 100) == pytest.approx(round(pct * s.runs / 100))
        assert rep.modes[GREEDY].fail_pct == 50.0

    def test_welch_fixtures(self):
        assert welch_t_test([10] * 4, [0, 0, 0, 0.0001]).pvalue < 1e-6
        a, b = [1, 2, 3, 4, 5], [2, 3, 4, 5, 6]
        ab, ba = welch_t_test(a, b), welch_t_test(b, a)
        assert ab.pvalue == ba.pvalue and ab.statistic == -ba.statistic

    def test_one_sided_p(self):
        recs = _records([100, 110, 90, 95], [200, 230, 180, 260])
        assert one_sided_paired_p(recs) < 0.01
        assert one_sided_paired_p(_records([1, 2], [1, 2])) == 1.0
        assert one_sided_paired_p(_records([1, 2], [2, 3])) == 0.0


class TestBattery:
    def test_paired_seeds_shared(self):
        world, genome = load_world("maze_s1"), load_genome()
        recs = run_battery(world, genome, PIONEER, 3, paired=True, base_seed=2, time_limit=5.0)
        assert len(recs) == 6
        idio = [r.seed for r in recs if r.mode == IDIOTYPIC]
        greedy = [r.seed for r in recs if r.mode == GREEDY]
        assert idio == greedy and len(set(idio)) == 3
        assert recs == run_battery(world, genome, PIONEER, 3, paired=True, base_seed=2,
                                   time_limit=5.0)

    def test_unpaired_seeds_disjoint(self):
        recs = run_battery(load_world("maze_s1"), load_genome(), PIONEER, 2, paired=False,
                           time_limit=1.0)
        assert len({r.seed for r in recs}) == 4

    def test_needs_two_runs(self):
        with pytest.raises(ValueError):
            run_battery(load_world("maze_s1"), load_genome(), PIONEER, 1)

    def test_scenario_seed_stable(self):
        assert scenario_seed(0, 1) == scenario_seed(0, 1) != scenario_seed(0, 2)

    def test_jitter_stays_near_start_and_clear(self):
        world = load_world("maze_s1")
        x0, y0, th0 = world.start
        for k in range(50):
            x, y, th = jittered_start(world, PIONEER, scenario_seed(0, k))
            assert math.hypot(x - x0, y - y0) <= 0.5 * PIONEER.body_radius + 1e-12
            assert abs(th - th0) <= math.radians(45) + 1e-12
            assert wall_distance(world.walls, x, y) > PIONEER.body_radius


class TestFiles:
    def test_results_round_trip(self):
        recs, _ = score_runs(_records([100.04, 250], [900, 300], [1, 0], [3, 2]))
        text = results_csv(recs)
        assert text.splitlines()[0] == RESULTS_HEADER
        # sigma = 387.51 / 1.5 = 258.34, phi = (100.04 + 258.34) / 2
        assert text.splitlines()[1] == "0,w,idiotypic,0,100.0,1,179.190,0"
        again = parse_results_csv(text)
        assert results_csv(again) == text
        assert [r.pair for r in again] == [0, 1, 0, 1]

    def test_trail_round_trip_and_svg(self):
        world = load_world("maze_s1")
        trail = [(0, 0.8, 0.8, 0.0), (1, 0.85, 0.8, 0.1), (2, 0.9, 0.82, 0.2)]
        assert parse_trail_csv(trail_csv(trail)) == trail
        svg = trail_svg(world, trail, PIONEER)
        assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
        assert svg.count("<line") == len(world.walls)
        assert len(re.findall(r"<polyline", svg)) == 1
