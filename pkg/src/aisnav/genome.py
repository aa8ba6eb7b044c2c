"""Behaviour encoding and the genetic-sequence text format.

A genome holds ``n`` gene sets, one per independently evolved robot. Each
set carries eight behaviour genes (one per antigen) plus the task time and
collision count measured for that robot at the end of evolution.

File layout::

    # comment
    @set 0 120 3
    0 2 537 80 51 2 37 76 50
    1 6 600 50 30 1 50 50 64
    ...

Gene lines hold nine integers: antigen index, T, S, F, A, D, R_f, R_a, score.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Iterable

import numpy as np

N_ANTIGENS = 8

# behaviour type codes
WANDER_ONE = 1
WANDER_BOTH = 2
TURN_FORWARD = 3
TURN_ON_SPOT = 4
TURN_BACKWARD = 5
TRACK_TARGET = 6

LEFT = 1
RIGHT = 2

# inclusive attribute bounds
SPEED_BOUNDS = (100, 900)
PERCENT_BOUNDS = (10, 90)
SCORE_BOUNDS = (0, 100)

# behaviour types allowed per 0-based antigen index
ALLOWED_TYPES: dict[int, tuple[int, ...]] = {
    0: (WANDER_ONE, WANDER_BOTH),
    1: (TRACK_TARGET,),
    2: (TURN_FORWARD, TURN_ON_SPOT),
    3: (TURN_FORWARD, TURN_ON_SPOT),
    4: (TURN_FORWARD, TURN_ON_SPOT),
    5: (TURN_ON_SPOT, TURN_BACKWARD),
    6: (TURN_ON_SPOT, TURN_BACKWARD),
    7: (TURN_ON_SPOT, TURN_BACKWARD),
}

# order of the evolvable attributes after the antigen index
ATTRIBUTES = ("T", "S", "F", "A", "D", "R_f", "R_a")


class GenomeError(ValueError):
    """Raised for malformed or out-of-bounds genetic sequences."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class BehaviourGene:
    antigen_index: int
    T: int
    S: int
    F: int
    A: int
    D: int
    R_f: int
    R_a: int
    score: int = 50

    def __post_init__(self):
        problem = gene_problem(self)
        if problem:
            raise GenomeError(problem)

    def as_ints(self) -> tuple[int, ...]:
        return tuple(getattr(self, f.name) for f in fields(self))

    def to_line(self) -> str:
        return " ".join(str(v) for v in self.as_ints())


@dataclass(frozen=True)
class GeneSet:
    genes: tuple[BehaviourGene, ...]
    t: int
    c: int

    def __post_init__(self):
        object.__setattr__(self, "genes", tuple(self.genes))
        idx = [g.antigen_index for g in self.genes]
        if idx != list(range(N_ANTIGENS)):
            raise GenomeError(
                f"gene set must cover antigens 0-7 once in ascending order, got {idx}")
        if self.t <= 0:
            raise GenomeError(f"task time must be positive, got {self.t}")
        if self.c < 0:
            raise GenomeError(f"collision count must be non-negative, got {self.c}")


@dataclass(frozen=True)
class Genome:
    sets: tuple[GeneSet, ...]

    def __post_init__(self):
        object.__setattr__(self, "sets", tuple(self.sets))
        if len(self.sets) < 2:
            raise GenomeError(f"a genome needs at least 2 gene sets, got {len(self.sets)}")

    @property
    def n(self) -> int:
        return len(self.sets)

    def scores(self) -> np.ndarray:
        """Score matrix of shape (n, 8)."""
        return np.array([[g.score for g in s.genes] for s in self.sets], dtype=float)


def gene_problem(g: BehaviourGene) -> str | None:
    """Describe the first bound violation of `g`, or None when valid."""
    if not 0 <= g.antigen_index < N_ANTIGENS:
        return f"antigen index {g.antigen_index} outside 0-7"
    if not 1 <= g.T <= 6:
        return f"T={g.T} out of range 1-6"
    if g.T not in ALLOWED_TYPES[g.antigen_index]:
        return (f"T={g.T} not allowed for antigen index {g.antigen_index} "
                f"(allowed {ALLOWED_TYPES[g.antigen_index]})")
    lo, hi = SPEED_BOUNDS
    if not lo <= g.S <= hi:
        return f"S={g.S} out of range {lo}-{hi}"
    lo, hi = PERCENT_BOUNDS
    for name in ("F", "A", "R_f", "R_a"):
        v = getattr(g, name)
        if not lo <= v <= hi:
            return f"{name}={v} out of range {lo}-{hi}"
    if g.D not in (LEFT, RIGHT):
        return f"D={g.D} must be 1 or 2"
    lo, hi = SCORE_BOUNDS
    if not lo <= g.score <= hi:
        return f"score={g.score} out of range {lo}-{hi}"
    return None


def random_attribute(name: str, antigen_index: int, rng: np.random.Generator) -> int:
    """Draw one attribute value uniformly within its bounds."""
    if name == "T":
        allowed = ALLOWED_TYPES[antigen_index]
        return int(allowed[rng.integers(len(allowed))])
    if name == "S":
        return int(rng.integers(SPEED_BOUNDS[0], SPEED_BOUNDS[1] + 1))
    if name == "D":
        return int(rng.integers(LEFT, RIGHT + 1))
    if name in ("F", "A", "R_f", "R_a"):
        return int(rng.integers(PERCENT_BOUNDS[0], PERCENT_BOUNDS[1] + 1))
    raise KeyError(name)


def random_gene(antigen_index: int, rng: np.random.Generator) -> BehaviourGene:
    """A fresh gene for `antigen_index` with score 50."""
    values = {name: random_attribute(name, antigen_index, rng) for name in ATTRIBUTES}
    return BehaviourGene(antigen_index, score=50, **values)


def _parse_ints(tokens: list[str], lineno: int) -> list[int]:
    out = []
    for tok in tokens:
        try:
            out.append(int(tok))
        except ValueError:
            raise GenomeError(f"non-integer field {tok!r}", lineno) from None
    return out


def parse_gene_line(line: str, lineno: int | None = None) -> BehaviourGene:
    tokens = line.split()
    if len(tokens) != 9:
        raise GenomeError(f"expected 9 fields, got {len(tokens)}", lineno)
    values = _parse_ints(tokens, lineno)
    try:
        return BehaviourGene(*values)
    except GenomeError as exc:
        raise GenomeError(str(exc), lineno) from None


def parse_genome(text: str | Iterable[str]) -> Genome:
    """Parse a genetic-sequence file.

    Parameters
    ----------
    text : str or iterable of str
        Whole file contents, or an iterable of lines (e.g. an open file).

    Returns
    -------
    Genome

    Raises
    ------
    GenomeError
        On any malformed line, bound violation, missing header, or a set
        whose genes do not cover antigens 0-7 exactly once in order. Error
        messages carry the 1-based line number.
    """
    lines = text.splitlines() if isinstance(text, str) else list(text)
    sets: list[GeneSet] = []
    header: tuple[int, int, int] | None = None
    header_line = 0
    genes: list[BehaviourGene] = []

    def close_set():
        if header is None:
            return
        if len(genes) != N_ANTIGENS:
            raise GenomeError(f"set {header[0]} has {len(genes)} genes, expected 8",
                              header_line)
        try:
            sets.append(GeneSet(tuple(genes), t=header[1], c=header[2]))
        except GenomeError as exc:
            raise GenomeError(str(exc), header_line) from None

    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("@set"):
            close_set()
            tokens = line.split()
            if len(tokens) != 4:
                raise GenomeError("set header must be '@set <index> <t> <c>'", lineno)
            index, t, c = _parse_ints(tokens[1:], lineno)
            if index != len(sets):
                raise GenomeError(f"set index {index} out of sequence, expected {len(sets)}",
                                  lineno)
            header, header_line, genes = (index, t, c), lineno, []
            continue
        if header is None:
            raise GenomeError("gene line before any '@set' header", lineno)
        gene = parse_gene_line(line, lineno)
        expected = len(genes)
        if gene.antigen_index != expected:
            kind = "duplicate" if gene.antigen_index < expected else "missing"
            raise GenomeError(
                f"{kind} antigen index: got {gene.antigen_index}, expected {expected}", lineno)
        genes.append(gene)
    close_set()
    if not sets:
        raise GenomeError("no gene sets found")
    return Genome(tuple(sets))


def serialize_genome(g: Genome) -> str:
    """Canonical text form of `g`; inverse of :func:`parse_genome`."""
    out = []
    for k, s in enumerate(g.sets):
        out.append(f"@set {k} {s.t} {s.c}")
        out.extend(gene.to_line() for gene in s.genes)
    return "\n".join(out) + "\n"


def read_genome(path) -> Genome:
    with open(path) as fh:
        return parse_genome(fh.read())


def write_genome(g: Genome, path) -> None:
    with open(path, "w") as fh:
        fh.write(serialize_genome(g))
