"""Batch experiments comparing idiotypic and greedy arbitration.

A battery runs the same genome many times per mode. Each run gets a
scenario seed that jitters the start pose and seeds the behaviour random
stream; in a paired battery the k-th idiotypic and k-th greedy runs share
that seed. Runs are then scored with the combined cost

    phi = (t + sigma * c) / 2,   sigma = mean(t) / mean(c) over the world,

classified as good (cost below the world mean) or bad (worst decile), and
the two modes compared with t tests.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from .genome import Genome
from .platform import PlatformProfile
from .simworld import TIME_LIMIT, World, wall_distance, wrap_angle
from .stats import TTestResult, paired_t_test, t_sf, welch_t_test
from .stl_ais import GREEDY, IDIOTYPIC, MODES, run_genome

RESULTS_HEADER = "run_id,world,mode,seed,t,c,phi,failed"
TRAIL_HEADER = "tick,x,y,theta"
ALPHA = 0.01


@dataclass(frozen=True)
class RunRecord:
    run_id: int
    world_id: str
    mode: str
    seed: int
    t: float
    c: int
    failed: bool
    phi: float = 0.0
    pair: int = 0      # index k within the mode

    def csv_row(self) -> str:
        return (f"{self.run_id},{self.world_id},{self.mode},{self.seed},{self.t:.1f},"
                f"{self.c},{self.phi:.3f},{int(self.failed)}")


@dataclass(frozen=True)
class Classification:
    good: bool
    bad: bool
    failed: bool


@dataclass
class ModeSummary:
    runs: int
    mean_t: float
    mean_c: float
    mean_phi: float
    good_pct: float
    bad_pct: float
    fail_pct: float


@dataclass
class ExperimentReport:
    world_id: str
    sigma: float
    paired: bool
    modes: dict[str, ModeSummary]
    tests: dict[str, Optional[TTestResult]] = field(default_factory=dict)

    def significant(self, metric: str, alpha: float = ALPHA) -> bool:
        res = self.tests.get(metric)
        return res is not None and res.pvalue < alpha


def scenario_seed(base_seed: int, *key: int) -> int:
    """Stable 32-bit seed derived from `base_seed` and an index key."""
    return int(np.random.SeedSequence([base_seed, *key]).generate_state(1)[0])


def jittered_start(world: World, profile: PlatformProfile, seed: int,
                   radius: float | None = None,
                   heading_spread: float = math.radians(45.0)) -> tuple[float, float, float]:
    """Start pose perturbed around the world's start, clear of every wall."""
    rng = np.random.default_rng(seed)
    if radius is None:
        radius = 0.5 * profile.body_radius
    x0, y0, th0 = world.start
    for _ in range(100):
        r = radius * math.sqrt(rng.random())
        a = rng.uniform(-math.pi, math.pi)
        x, y = x0 + r * math.cos(a), y0 + r * math.sin(a)
        th = wrap_angle(th0 + rng.uniform(-heading_spread, heading_spread))
        if wall_distance(world.walls, x, y) > profile.body_radius + 1e-3:
            return (x, y, th)
    return world.start


def run_battery(world: World, genome: Genome, profile: PlatformProfile, runs_per_mode: int,
                paired: bool = True, base_seed: int = 0, *, color: str = "blue",
                time_limit: float = TIME_LIMIT, modes: Sequence[str] = MODES) -> list[RunRecord]:
    """Run `runs_per_mode` episodes in each mode; idiotypic records come first."""
    if runs_per_mode < 2:
        raise ValueError("runs_per_mode must be at least 2")
    records = []
    for m_index, mode in enumerate(modes):
        for k in range(runs_per_mode):
            seed = scenario_seed(base_seed, k) if paired else scenario_seed(base_seed, m_index + 1, k)
            pose = jittered_start(world, profile, seed)
            ep = run_genome(world, genome, profile, mode, seed, pose=pose, color=color,
                            time_limit=time_limit)
            records.append(RunRecord(len(records), world.name, mode, seed, ep.t, ep.c,
                                     failed=not ep.complete, pair=k))
    return records


def sigma_ratio(records: Sequence[RunRecord]) -> float:
    mean_t = float(np.mean([r.t for r in records]))
    mean_c = float(np.mean([r.c for r in records]))
    return 0.0 if mean_c == 0 else mean_t / mean_c


def phi(t: float, c: float, sigma: float) -> float:
    return (t + sigma * c) / 2.0


def score_runs(records: Sequence[RunRecord]) -> tuple[list[RunRecord], float]:
    """Attach the combined cost to every record of one world."""
    if not records:
        raise ValueError("no records to score")
    sigma = sigma_ratio(records)
    return [replace(r, phi=phi(r.t, r.c, sigma)) for r in records], sigma


def classify(records: Sequence[RunRecord]) -> list[Classification]:
    """Good: cost strictly below the world mean. Bad: cost in the worst decile."""
    costs = np.array([r.phi for r in records], dtype=float)
    mean = costs.mean()
    n_bad = max(1, int(math.ceil(0.1 * len(costs))))
    cutoff = np.sort(costs)[::-1][n_bad - 1]
    return [Classification(good=bool(p < mean), bad=bool(p >= cutoff), failed=r.failed)
            for p, r in zip(costs, records)]


def _summary(records: Sequence[RunRecord], labels: Sequence[Classification]) -> ModeSummary:
    n = len(records)
    return ModeSummary(
        runs=n,
        mean_t=math.fsum(r.t for r in records) / n,
        mean_c=math.fsum(r.c for r in records) / n,
        mean_phi=math.fsum(r.phi for r in records) / n,
        good_pct=100.0 * sum(lab.good for lab in labels) / n,
        bad_pct=100.0 * sum(lab.bad for lab in labels) / n,
        fail_pct=100.0 * sum(lab.failed for lab in labels) / n,
    )


def _compare(a: Sequence[float], b: Sequence[float], paired: bool) -> Optional[TTestResult]:
    try:
        if paired:
            return paired_t_test([x - y for x, y in zip(a, b)])
        return welch_t_test(a, b)
    except ValueError:
        # identical samples: no evidence of a difference
        if len(a) >= 2 and len(b) >= 2 and list(a) == list(b):
            return TTestResult(0.0, float(len(a) - 1), 1.0)
        return None


def _by_mode(records: Sequence[RunRecord], mode: str) -> list[RunRecord]:
    return sorted((r for r in records if r.mode == mode), key=lambda r: r.pair)


def report(records: Sequence[RunRecord], world_id: str | None = None,
           paired: bool = False, sigma: float | None = None) -> ExperimentReport:
    """Summaries per mode plus idiotypic-vs-greedy tests on t, c and phi.

    `records` must already carry phi (see :func:`score_runs`).
    """
    records = list(records)
    if world_id is None:
        world_id = records[0].world_id if records else "world"
    labels = dict(zip((r.run_id for r in records), classify(records)))
    if sigma is None:
        sigma = sigma_ratio(records)
    modes = {}
    for mode in MODES:
        rs = _by_mode(records, mode)
        if rs:
            modes[mode] = _summary(rs, [labels[r.run_id] for r in rs])
    tests = {}
    idio, greedy = _by_mode(records, IDIOTYPIC), _by_mode(records, GREEDY)
    if idio and greedy:
        for metric in ("t", "c", "phi"):
            tests[metric] = _compare([getattr(r, metric) for r in idio],
                                     [getattr(r, metric) for r in greedy], paired)
    return ExperimentReport(world_id, sigma, paired, modes, tests)


def one_sided_paired_p(records: Sequence[RunRecord], metric: str = "t") -> float:
    """p-value for 'idiotypic is lower than greedy' on paired runs."""
    idio, greedy = _by_mode(records, IDIOTYPIC), _by_mode(records, GREEDY)
    diffs = [getattr(a, metric) - getattr(b, metric) for a, b in zip(idio, greedy)]
    if len(diffs) >= 2 and len(set(diffs)) == 1:
        # constant differences: the sign alone settles it
        return 0.0 if diffs[0] < 0 else 1.0
    res = paired_t_test(diffs)
    return t_sf(-res.statistic, res.df)


def _confidence(res: Optional[TTestResult]) -> str:
    if res is None:
        return "-"
    return f"{100.0 * (1.0 - res.pvalue):.0f}"


def render_report(rep: ExperimentReport) -> str:
    """Plain-text table with significance, means and good, bad and fail percentages per mode."""
    head = ("World", "Sig t", "Sig c", "Sig phi",
            "Id t(s)", "Id c", "Id phi", "Id G", "Id B", "Id F",
            "Gr t(s)", "Gr c", "Gr phi", "Gr G", "Gr B", "Gr F")
    row = [rep.world_id, _confidence(rep.tests.get("t")), _confidence(rep.tests.get("c")),
           _confidence(rep.tests.get("phi"))]
    for mode in MODES:
        s = rep.modes.get(mode)
        if s is None:
            row += ["-"] * 6
        else:
            row += [f"{s.mean_t:.0f}", f"{s.mean_c:.0f}", f"{s.mean_phi:.0f}",
                    f"{s.good_pct:.0f}", f"{s.bad_pct:.0f}", f"{s.fail_pct:.0f}"]
    widths = [max(len(h), len(v)) for h, v in zip(head, row)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(head, widths)),
             "  ".join(v.rjust(w) for v, w in zip(row, widths)),
             "",
             f"sigma = {rep.sigma:.3f} s per collision; "
             f"{'paired' if rep.paired else 'Welch'} two-tailed tests, alpha = {ALPHA}"]
    for metric in ("t", "c", "phi"):
        res = rep.tests.get(metric)
        if res is None:
            lines.append(f"{metric:>3}: no test (degenerate samples)")
            continue
        flag = "significant" if res.pvalue < ALPHA else "not significant"
        lines.append(f"{metric:>3}: statistic = {res.statistic:.4f}, df = {res.df:.2f}, "
                     f"p = {res.pvalue:.4g} ({flag})")
    for mode in MODES:
        s = rep.modes.get(mode)
        if s is not None:
            lines.append(f"{mode}: n = {s.runs}, mean t = {s.mean_t:.2f}, "
                         f"mean c = {s.mean_c:.2f}, mean phi = {s.mean_phi:.2f}")
    return "\n".join(lines) + "\n"


# -- files ----------------------------------------------------------------

def results_csv(records: Iterable[RunRecord]) -> str:
    return "\n".join([RESULTS_HEADER] + [r.csv_row() for r in records]) + "\n"


def parse_results_csv(text: str) -> list[RunRecord]:
    rows = list(csv.DictReader(io.StringIO(text)))
    out = []
    for row in rows:
        out.append(RunRecord(int(row["run_id"]), row["world"], row["mode"], int(row["seed"]),
                             float(row["t"]), int(row["c"]), bool(int(row["failed"])),
                             float(row["phi"])))
    # recover pair indices from order within each mode
    counters: dict[str, int] = {}
    paired = []
    for r in out:
        k = counters.get(r.mode, 0)
        counters[r.mode] = k + 1
        paired.append(replace(r, pair=k))
    return paired


def trail_csv(trail: Sequence[tuple[int, float, float, float]]) -> str:
    lines = [TRAIL_HEADER] + [f"{k},{x:.6f},{y:.6f},{th:.6f}" for k, x, y, th in trail]
    return "\n".join(lines) + "\n"


def parse_trail_csv(text: str) -> list[tuple[int, float, float, float]]:
    rows = csv.DictReader(io.StringIO(text))
    return [(int(r["tick"]), float(r["x"]), float(r["y"]), float(r["theta"])) for r in rows]


def trail_svg(world: World, trail: Sequence[tuple[int, float, float, float]],
              profile: PlatformProfile | None = None, scale: float | None = None) -> str:
    """Top-down drawing of the walls, the robot's path, start and goal."""
    if scale is None:
        scale = 600.0 / max(world.width, world.height)
    W, H = world.width * scale, world.height * scale

    def px(x, y):
        return x * scale, H - y * scale

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W:.0f}" height="{H:.0f}" '
             f'viewBox="0 0 {W:.2f} {H:.2f}">',
             f'<rect x="0" y="0" width="{W:.2f}" height="{H:.2f}" fill="white"/>']
    for x1, y1, x2, y2 in world.walls:
        a, b = px(x1, y1)
        c, d = px(x2, y2)
        parts.append(f'<line x1="{a:.2f}" y1="{b:.2f}" x2="{c:.2f}" y2="{d:.2f}" '
                     f'stroke="black" stroke-width="3"/>')
    for m in world.markers:
        cx, cy = px(m.x, m.y)
        parts.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{max(m.r * scale, 2):.2f}" '
                     f'fill="{m.color or "gray"}"/>')
    target = world.completion
    if target is not None:
        cx, cy = px(target.x, target.y)
        parts.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{target.r * scale:.2f}" '
                     f'fill="none" stroke="green" stroke-width="2"/>')
    if trail:
        pts = " ".join("{:.2f},{:.2f}".format(*px(x, y)) for _, x, y, _ in trail)
        parts.append(f'<polyline points="{pts}" fill="none" stroke="red" stroke-width="1.5"/>')
        sx, sy = px(trail[0][1], trail[0][2])
        parts.append(f'<rect x="{sx - 5:.2f}" y="{sy - 5:.2f}" width="10" height="10" '
                     f'fill="orange"/>')
        if profile is not None:
            ex, ey = px(trail[-1][1], trail[-1][2])
            parts.append(f'<circle cx="{ex:.2f}" cy="{ey:.2f}" '
                         f'r="{profile.body_radius * scale:.2f}" fill="none" stroke="red"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
