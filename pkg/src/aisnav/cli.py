"""Command-line entry point: ``aisnav evolve|run|experiment|replay|inspect``.

Exit status is 0 on success, 1 for usage errors, 2 for unreadable or
unwritable files and 3 for malformed or invalid input.
"""

from __future__ import annotations

import argparse
import io
import logging
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .genome import GenomeError, serialize_genome
from .harness import (parse_trail_csv, render_report, report, results_csv, run_battery,
                      score_runs, trail_csv, trail_svg)
from .ltl_evolve import LOG_HEADER, EvolutionConfig, evolve, format_log_row
from .platform import EPUCK, PROFILES, PlatformProfile, parse_profile_overrides, wheel_speeds_to_command
from .resources import DEFAULT_GENOME, load_genome, load_world
from .simworld import WorldError
from .stl_ais import IDIOTYPIC, MODES, RHO_STL, build_matrices, relative_fitness, run_genome

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_INVALID = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class CliConfig:
    command: str
    world_path: Optional[str] = None
    genome_path: Optional[str] = None
    profile: str = "pioneer"
    profile_file: Optional[str] = None
    mode: str = IDIOTYPIC
    runs: int = 30
    paired: bool = False
    seed: int = 0
    results: Optional[str] = None
    report: Optional[str] = None
    trail: Optional[str] = None
    svg: Optional[str] = None
    trace: Optional[str] = None
    out: Optional[str] = None
    log_path: Optional[str] = None
    populations: Optional[int] = None
    population_size: Optional[int] = None
    mutation_rate: Optional[float] = None
    max_generations: Optional[int] = None
    left: Optional[float] = None
    right: Optional[float] = None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="aisnav", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, genome=True, default_profile="pioneer"):
        p.add_argument("--world", dest="world_path", required=True,
                       help="world file or bundled world name")
        if genome:
            p.add_argument("--genome", dest="genome_path", default=DEFAULT_GENOME,
                           help=f"genome file or bundled genome name (default {DEFAULT_GENOME})")
        p.add_argument("--profile", choices=sorted(PROFILES), default=default_profile)
        p.add_argument("--profile-file", help="key = value overrides for the chosen profile")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("evolve", help="evolve a genome on the epuck")
    common(p, genome=False, default_profile="epuck")
    p.add_argument("--out", required=True, help="genome file to write")
    p.add_argument("--log", dest="log_path", help="per-generation CSV log")
    p.add_argument("--populations", type=int)
    p.add_argument("--population-size", type=int)
    p.add_argument("--mutation-rate", type=float)
    p.add_argument("--max-generations", type=int)

    p = sub.add_parser("run", help="one controller run")
    common(p)
    p.add_argument("--mode", choices=MODES, default=IDIOTYPIC)
    p.add_argument("--trail", help="trail CSV to write")
    p.add_argument("--svg", help="trail drawing to write")
    p.add_argument("--trace", help="per-tick trace CSV to write")

    p = sub.add_parser("experiment", help="idiotypic versus greedy battery")
    common(p)
    p.add_argument("--runs", type=int, default=30, help="runs per mode")
    p.add_argument("--paired", action="store_true", help="share scenario seeds between modes")
    p.add_argument("--results", required=True, help="results CSV to write")
    p.add_argument("--report", help="text report to write (printed either way)")

    p = sub.add_parser("replay", help="draw a saved trail")
    p.add_argument("--world", dest="world_path", required=True)
    p.add_argument("--trail", required=True, help="trail CSV to read")
    p.add_argument("--svg", required=True, help="drawing to write")
    p.add_argument("--profile", choices=sorted(PROFILES), default="pioneer")
    p.add_argument("--profile-file")

    p = sub.add_parser("inspect", help="decode a genome and the speed conversion")
    p.add_argument("--genome", dest="genome_path", default=DEFAULT_GENOME)
    p.add_argument("--profile", choices=sorted(PROFILES), default="pioneer")
    p.add_argument("--profile-file")
    p.add_argument("--left", type=float, help="left wheel speed in epuck units")
    p.add_argument("--right", type=float, help="right wheel speed in epuck units")
    return parser


def parse_config(argv: Sequence[str] | None = None) -> tuple[CliConfig, bool]:
    ns = build_parser().parse_args(argv)
    known = {f.name for f in fields(CliConfig)}
    cfg = CliConfig(**{k: v for k, v in vars(ns).items() if k in known})
    if cfg.command == "experiment" and cfg.runs < 2:
        raise UsageError("--runs must be at least 2")
    if cfg.command == "inspect" and (cfg.left is None) != (cfg.right is None):
        raise UsageError("--left and --right go together")
    return cfg, ns.verbose


# -- helpers --------------------------------------------------------------

def _profile(cfg: CliConfig) -> PlatformProfile:
    base = PROFILES[cfg.profile]
    if cfg.profile_file is None:
        return base
    return parse_profile_overrides(Path(cfg.profile_file).read_text(), base)


def _write(path: Optional[str], text: str) -> None:
    if path is not None:
        Path(path).write_text(text)


def _evolution_config(cfg: CliConfig) -> EvolutionConfig:
    overrides = {name: getattr(cfg, name) for name in
                 ("populations", "population_size", "mutation_rate", "max_generations")
                 if getattr(cfg, name) is not None}
    return EvolutionConfig(seed=cfg.seed, **overrides)


# -- commands -------------------------------------------------------------

def cmd_evolve(cfg: CliConfig, out=sys.stdout) -> int:
    world = load_world(cfg.world_path)
    ecfg = _evolution_config(cfg)
    print(f"seed {cfg.seed}", file=out)
    print(LOG_HEADER, file=out)
    rows = []

    def on_generation(row):
        rows.append(format_log_row(row))
        print(rows[-1], file=out, flush=True)

    genome = evolve(world, _profile(cfg), ecfg, on_generation)
    _write(cfg.out, serialize_genome(genome))
    _write(cfg.log_path, "\n".join([LOG_HEADER] + rows) + "\n")
    print(f"wrote {cfg.out}", file=out)
    return EXIT_OK


def cmd_run(cfg: CliConfig, out=sys.stdout) -> int:
    world, genome, profile = load_world(cfg.world_path), load_genome(cfg.genome_path), _profile(cfg)
    trace = io.StringIO() if cfg.trace else None
    ep = run_genome(world, genome, profile, cfg.mode, cfg.seed,
                    record_trail=bool(cfg.trail or cfg.svg), trace=trace)
    status = "complete" if ep.complete else "failed"
    print(f"world {world.name} mode {cfg.mode} seed {cfg.seed}: "
          f"t = {ep.t:.1f} s, c = {ep.c}, {status}", file=out)
    _write(cfg.trail, trail_csv(ep.trail))
    _write(cfg.svg, trail_svg(world, ep.trail, profile) if cfg.svg else "")
    if trace is not None:
        _write(cfg.trace, trace.getvalue())
    return EXIT_OK


def cmd_experiment(cfg: CliConfig, out=sys.stdout) -> int:
    world, genome, profile = load_world(cfg.world_path), load_genome(cfg.genome_path), _profile(cfg)
    records = run_battery(world, genome, profile, cfg.runs, cfg.paired, cfg.seed)
    records, sigma = score_runs(records)
    text = (f"world {world.name}, genome {cfg.genome_path}, profile {profile.name}, "
            f"{cfg.runs} runs per mode, {'paired' if cfg.paired else 'unpaired'}, "
            f"seed {cfg.seed}\n\n"
            + render_report(report(records, world.name, cfg.paired, sigma)))
    _write(cfg.results, results_csv(records))
    _write(cfg.report, text)
    print(text, end="", file=out)
    return EXIT_OK


def cmd_replay(cfg: CliConfig, out=sys.stdout) -> int:
    world = load_world(cfg.world_path)
    trail = parse_trail_csv(Path(cfg.trail).read_text())
    _write(cfg.svg, trail_svg(world, trail, _profile(cfg)))
    print(f"wrote {cfg.svg} ({len(trail)} poses)", file=out)
    return EXIT_OK


def cmd_inspect(cfg: CliConfig, out=sys.stdout) -> int:
    genome = load_genome(cfg.genome_path)
    profile = _profile(cfg)
    state = build_matrices(genome)
    mu = relative_fitness([s.t for s in genome.sets], [s.c for s in genome.sets], RHO_STL)
    with np.printoptions(precision=4, suppress=True):
        for i, s in enumerate(genome.sets):
            print(f"set {i}: t = {s.t}, c = {s.c}, mu = {mu[i]:.6f}", file=out)
            for g in s.genes:
                print("  " + g.to_line(), file=out)
        print(f"sum mu = {mu.sum():.6f}", file=out)
        print("P =", state.P, sep="\n", file=out)
        print("I =", state.I.astype(int), sep="\n", file=out)
    if cfg.left is not None:
        cmd = wheel_speeds_to_command(cfg.left, cfg.right, profile, EPUCK)
        print(f"{profile.name}: L = {cfg.left:g}, R = {cfg.right:g} -> "
              f"v = {cmd.v:.5f} m/s, omega = {cmd.omega:.5f} rad/s", file=out)
    return EXIT_OK


COMMANDS = {"evolve": cmd_evolve, "run": cmd_run, "experiment": cmd_experiment,
            "replay": cmd_replay, "inspect": cmd_inspect}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg, verbose = parse_config(argv)
    except UsageError as exc:
        print(f"aisnav: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[cfg.command](cfg, sys.stdout)
    except (GenomeError, WorldError) as exc:
        print(f"aisnav: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"aisnav: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"aisnav: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
