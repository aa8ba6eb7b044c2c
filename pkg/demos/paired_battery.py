"""A small paired battery on the first maze world, with a trail drawing.

Runs a handful of paired idiotypic and greedy episodes with the pioneer
profile, prints the results table and writes an SVG of the first
idiotypic run next to this script.

    python3 demos/paired_battery.py [runs]
"""

import sys
from pathlib import Path

from aisnav.harness import (jittered_start, one_sided_paired_p, render_report, report,
                            run_battery, scenario_seed, score_runs, trail_svg)
from aisnav.platform import PIONEER
from aisnav.resources import load_genome, load_world
from aisnav.stl_ais import IDIOTYPIC, run_genome


def main(runs=5):
    world, genome = load_world("maze_s1"), load_genome()
    records, _ = score_runs(run_battery(world, genome, PIONEER, runs, paired=True))
    print(render_report(report(records, "maze_s1", paired=True)))
    print(f"one-sided paired p (idiotypic faster) = {one_sided_paired_p(records):.4f}")

    seed = scenario_seed(0, 0)
    ep = run_genome(world, genome, PIONEER, IDIOTYPIC, seed,
                    pose=jittered_start(world, PIONEER, seed), record_trail=True)
    out = Path(__file__).with_name("maze_s1_idiotypic.svg")
    out.write_text(trail_svg(world, ep.trail, PIONEER))
    print(f"trail of the first idiotypic run ({ep.t:.1f} s, {ep.c} collisions) -> {out}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 5)
