"""Idiotypic immune-network behaviour arbitration.

Each evolved gene set acts as one family of antibodies; antigen ``j`` is
answered by gene ``j`` of whichever set wins selection. Two matrices drive
selection:

* ``P`` (n x 8) holds reinforcement strengths, initialised from the saved
  scores weighted by each set's relative fitness and updated every tick.
* ``I`` (n x 8) is a fixed binary matrix marking, for every antigen, the set
  with the weakest initial strength.

In greedy mode only ``P`` is consulted. In idiotypic mode a provisional
winner stimulates antibodies that are strong where it is weak and is in
turn suppressed by them, all scaled by per-set concentrations.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence, TextIO

import numpy as np

from .genome import (LEFT, TRACK_TARGET, TURN_BACKWARD, TURN_FORWARD, TURN_ON_SPOT,
                     WANDER_BOTH, WANDER_ONE, BehaviourGene, Genome)
from .perception import CENTRE, Antigen, blob_zone, classify_antigen, sense
from .perception import LEFT as ZONE_LEFT
from .platform import EPUCK, PlatformProfile, wheel_speeds_to_command
from .simworld import DT, TIME_LIMIT, RobotState, World, initial_state, step, task_complete

IDIOTYPIC = "idiotypic"
GREEDY = "greedy"
MODES = (IDIOTYPIC, GREEDY)

RHO_STL = 8.0
K_STIM = 0.25
K_SUPP = 0.25
C_INIT = 1.0
C_MIN = 0.1
C_MAX = 10.0
C_GAIN = 0.05
C_DECAY = 0.99
LEARNING_RATE = 0.05

TRACE_HEADER = "tick,antigen,mode,selected_set,L,R,v,omega"


@dataclass(frozen=True, eq=False)
class AisState:
    P: np.ndarray
    I: np.ndarray
    C: np.ndarray
    mode: str = IDIOTYPIC
    last: Optional[tuple[int, int]] = None   # (set index, antigen code)
    k_stim: float = K_STIM
    k_supp: float = K_SUPP

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        self.I.setflags(write=False)

    @property
    def n(self) -> int:
        return self.P.shape[0]


@dataclass(frozen=True)
class WheelPolicyOutput:
    L: float
    R: float


def relative_fitness(t: Sequence[float], c: Sequence[float], rho: float) -> np.ndarray:
    """Normalised inverse cost ``1 / (t + rho c)`` over a population."""
    cost = np.asarray(t, dtype=float) + rho * np.asarray(c, dtype=float)
    if cost.size == 0:
        raise ValueError("empty population")
    if np.any(cost <= 0):
        raise ValueError("t + rho*c must be positive")
    inv = 1.0 / cost
    return inv / inv.sum()


def idiotope_matrix(P: np.ndarray) -> np.ndarray:
    """1.0 at the column-wise minimum of `P` (lowest row on ties), else 0.0."""
    I = np.zeros_like(P, dtype=float)
    I[np.argmin(P, axis=0), np.arange(P.shape[1])] = 1.0
    return I


def state_from_strengths(P: np.ndarray, mode: str = IDIOTYPIC, k_stim: float = K_STIM,
                         k_supp: float = K_SUPP) -> AisState:
    P = np.array(P, dtype=float)
    return AisState(P=P, I=idiotope_matrix(P), C=np.full(P.shape[0], C_INIT), mode=mode,
                    k_stim=k_stim, k_supp=k_supp)


def build_matrices(g: Genome, rho: float = RHO_STL, mode: str = IDIOTYPIC,
                   k_stim: float = K_STIM, k_supp: float = K_SUPP) -> AisState:
    """Initial network state for a genome.

    ``P[i, j] = score[i, j] / 100 * mu[i] * n`` where ``mu`` is the relative
    fitness of each set from its recorded (t, c). The factor ``n`` keeps a
    genome of equally fit sets at ``P = score / 100``.
    """
    mu = relative_fitness([s.t for s in g.sets], [s.c for s in g.sets], rho)
    P = g.scores() / 100.0 * mu[:, None] * g.n
    return state_from_strengths(np.clip(P, 0.0, 1.0), mode, k_stim, k_supp)


def _argmax(values: np.ndarray) -> int:
    # np.argmax already returns the first maximum
    return int(np.argmax(values))


def activations(state: AisState, antigen: Antigen) -> np.ndarray:
    """Idiotypic activation of every set for `antigen`."""
    j = antigen.index
    P, I, C = state.P, state.I, state.C
    w = _argmax(P[:, j] * C)
    stim = P @ I[w]
    supp = I @ P[w]
    return C * (P[:, j] + state.k_stim * stim - state.k_supp * supp)


def select_antibody(state: AisState, antigen: Antigen) -> int:
    """Index of the gene set whose antibody answers `antigen`."""
    if state.mode == GREEDY:
        return _argmax(state.P[:, antigen.index])
    return _argmax(activations(state, antigen))


def reward(previous_code: int, outcome_code: int) -> float:
    """Reward for a behaviour executed under `previous_code` that led to `outcome_code`."""
    if outcome_code >= 6:
        return 0.0
    if outcome_code >= 3:
        return 0.4
    if outcome_code == 2:
        return 1.0
    return 0.8 if previous_code >= 3 else 0.5


def reinforce(state: AisState, executed: tuple[int, int], outcome: Antigen,
              learning_rate: float = LEARNING_RATE) -> AisState:
    """Nudge the strength of the executed antibody toward its reward.

    `executed` is ``(set index, antigen code)`` from the previous tick.
    """
    i, code = executed
    r = reward(code, outcome.code)
    P = state.P.copy()
    P[i, code - 1] = min(1.0, max(0.0, P[i, code - 1] + learning_rate * (r - 0.5)))
    return replace(state, P=P)


def update_concentrations(state: AisState, selected: int) -> AisState:
    C = state.C.copy()
    C[selected] += C_GAIN
    C *= C_DECAY
    np.clip(C, C_MIN, C_MAX, out=C)
    return replace(state, C=C)


def _reduced(speed: float, percent: int) -> float:
    return speed * (100 - percent) / 100


def _turn(S: float, A: int, side: int) -> tuple[float, float]:
    # reducing a wheel turns the robot toward that side
    if side == LEFT:
        return _reduced(S, A), S
    return S, _reduced(S, A)


def execute_behaviour(gene: BehaviourGene, blob: Optional[str],
                      rng: np.random.Generator) -> WheelPolicyOutput:
    """Wheel speeds (epuck units per second) for one tick of `gene`.

    `blob` is the zone ('left', 'centre', 'right') of the tracked target,
    or None when nothing is visible.
    """
    T, S, F, A, D = gene.T, float(gene.S), gene.F, gene.A, gene.D
    if T == WANDER_ONE:
        L, R = _turn(S, A, D) if rng.random() * 100 < F else (S, S)
    elif T == WANDER_BOTH:
        if rng.random() * 100 < F:
            if rng.random() * 100 < gene.R_f:
                L, R = S, _reduced(S, gene.R_a)
            else:
                L, R = _reduced(S, A), S
        else:
            L, R = S, S
    elif T == TURN_FORWARD:
        L, R = _turn(S, A, D)
    elif T == TURN_ON_SPOT:
        spin = S * A / 100
        L, R = (-spin, spin) if D == LEFT else (spin, -spin)
    elif T == TURN_BACKWARD:
        L, R = -S, -S
        if D == LEFT:
            L = -_reduced(S, A)
        else:
            R = -_reduced(S, A)
    elif T == TRACK_TARGET:
        if blob is None or blob == CENTRE:
            L, R = S, S
        elif blob == ZONE_LEFT:
            L, R = _reduced(S, A), S
        else:
            L, R = S, _reduced(S, A)
    else:
        raise ValueError(f"unknown behaviour type {T}")
    return WheelPolicyOutput(L, R)


# -- control loop ---------------------------------------------------------

@dataclass
class Episode:
    """Outcome of one controller run."""
    t: float
    c: int
    complete: bool
    ticks: int
    final: RobotState
    trail: list = field(default_factory=list)
    ais: Optional[AisState] = None

    @property
    def failed(self) -> bool:
        return not self.complete


def run_episode(world: World, profile: PlatformProfile, gene_table: Sequence[Sequence[BehaviourGene]],
                ais: AisState, rng: np.random.Generator, *,
                reference: PlatformProfile = EPUCK, color: str = "blue",
                pose: tuple[float, float, float] | None = None,
                time_limit: float = TIME_LIMIT, dt: float = DT,
                record_trail: bool = False, trace: TextIO | None = None,
                on_reward: Callable[[int, int, float], None] | None = None) -> Episode:
    """Run the sense, score, select, execute loop until the task completes or time runs out.

    Parameters
    ----------
    gene_table : sequence of gene sets
        ``gene_table[i][j]`` is the antibody of set ``i`` for antigen index ``j``.
    ais : AisState
        Initial network state; its mode picks greedy or idiotypic selection.
    rng : numpy Generator
        Drives the stochastic wandering behaviours.
    on_reward : callable, optional
        Called as ``on_reward(set_index, antigen_code, reward)`` each time the
        previous tick's behaviour is scored.
    trace : text stream, optional
        Receives one CSV line per tick (header ``TRACE_HEADER``).
    """
    robot = initial_state(world, pose)
    max_ticks = int(round(time_limit / dt))
    trail = [(0, robot.x, robot.y, robot.theta)] if record_trail else []
    if trace is not None:
        trace.write(TRACE_HEADER + "\n")
    complete = task_complete(world, robot, profile)
    while not complete and robot.ticks < max_ticks:
        frame = sense(world, robot, profile, color)
        antigen = classify_antigen(frame, profile)
        if ais.last is not None:
            if on_reward is not None:
                on_reward(ais.last[0], ais.last[1], reward(ais.last[1], antigen.code))
            ais = reinforce(ais, ais.last, antigen)
        chosen = select_antibody(ais, antigen)
        if ais.mode == IDIOTYPIC:
            ais = update_concentrations(ais, chosen)
        ais = replace(ais, last=(chosen, antigen.code))
        zone = blob_zone(frame.blob[0], profile) if frame.blob is not None else None
        wheels = execute_behaviour(gene_table[chosen][antigen.index], zone, rng)
        cmd = wheel_speeds_to_command(wheels.L, wheels.R, profile, reference)
        if trace is not None:
            trace.write(f"{robot.ticks},{antigen.code},{ais.mode},{chosen},"
                        f"{wheels.L:.6g},{wheels.R:.6g},{cmd.v:.6g},{cmd.omega:.6g}\n")
        robot = step(world, robot, cmd, profile, dt)
        if record_trail:
            trail.append((robot.ticks, robot.x, robot.y, robot.theta))
        complete = task_complete(world, robot, profile)
    t = min(robot.t, time_limit)
    return Episode(t=t, c=robot.c, complete=complete, ticks=robot.ticks, final=robot,
                   trail=trail, ais=ais)


def run_genome(world: World, genome: Genome, profile: PlatformProfile, mode: str,
               seed: int, **kwargs) -> Episode:
    """One run of a saved genome with a fresh network, seeded for reproducibility."""
    ais = build_matrices(genome, mode=mode)
    table = [s.genes for s in genome.sets]
    return run_episode(world, profile, table, ais, np.random.default_rng(seed), **kwargs)
