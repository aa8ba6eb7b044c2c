"""Reinforcement-assisted genetic algorithm over behaviour genomes.

Each of ``n`` populations evolves in isolation. An individual is one set of
eight behaviours, evaluated by running it alone (greedy, no network) until
the task completes or time runs out. The best individual of every
population becomes one gene set of the output genome.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .genome import (ATTRIBUTES, N_ANTIGENS, BehaviourGene, GeneSet, Genome, random_attribute,
                     random_gene)
from .platform import EPUCK, PlatformProfile
from .simworld import TIME_LIMIT, World
from .stl_ais import GREEDY, relative_fitness, run_episode, state_from_strengths

log = logging.getLogger(__name__)

LOG_HEADER = "population,generation,best_t,best_c,best_cost,mean_cost"


@dataclass(frozen=True)
class EvolutionConfig:
    population_size: int = 10
    populations: int = 5
    mutation_rate: float = 0.05
    rho: float = 1.0
    max_generations: int = 20
    plateau_window: int = 3
    min_evals: int = 20
    replace_threshold: float = 0.2
    seed: int = 0
    time_limit: float = TIME_LIMIT
    color: str = "blue"

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be at least 2")
        if self.populations < 2:
            raise ValueError("populations must be at least 2")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError("mutation_rate must lie in [0, 1]")
        if self.max_generations < 1:
            raise ValueError("max_generations must be at least 1")


@dataclass
class Individual:
    genes: tuple[BehaviourGene, ...]
    fitness: Optional[float] = None
    eval: Optional[tuple[float, int]] = None
    evaluations: np.ndarray = field(default_factory=lambda: np.zeros(N_ANTIGENS, dtype=int))
    reward_sum: np.ndarray = field(default_factory=lambda: np.zeros(N_ANTIGENS))

    @property
    def mean_reward(self) -> np.ndarray:
        """Per-gene mean reward; genes never scored report a neutral 0.5."""
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(self.evaluations > 0, self.reward_sum / np.maximum(self.evaluations, 1),
                            0.5)

    def cost(self, rho: float) -> float:
        t, c = self.eval
        return t + rho * c

    def scores(self) -> list[int]:
        return [int(min(100, max(0, round(100 * m)))) for m in self.mean_reward]


def random_individual(rng: np.random.Generator) -> Individual:
    return Individual(tuple(random_gene(j, rng) for j in range(N_ANTIGENS)))


def evaluate(ind: Individual, world: World, profile: PlatformProfile, seed,
             time_limit: float = TIME_LIMIT, color: str = "blue") -> Individual:
    """Run `ind` on its own and record (t, c) plus per-gene rewards."""
    evaluations = ind.evaluations.copy()
    reward_sum = ind.reward_sum.copy()

    def on_reward(_set, code, r):
        evaluations[code - 1] += 1
        reward_sum[code - 1] += r

    ais = state_from_strengths(np.array([[g.score / 100.0 for g in ind.genes]]), GREEDY)
    ep = run_episode(world, profile, [ind.genes], ais, np.random.default_rng(seed),
                     reference=EPUCK, color=color, time_limit=time_limit, on_reward=on_reward)
    return replace(ind, eval=(ep.t, ep.c), evaluations=evaluations, reward_sum=reward_sum)


def population_fitness(evals: Sequence[tuple[float, int]], rho: float) -> np.ndarray:
    if len(evals) == 0:
        raise ValueError("empty population")
    t, c = zip(*evals)
    return relative_fitness(t, c, rho)


def roulette(weights: np.ndarray, rng: np.random.Generator, exclude: int | None = None) -> int:
    """Index drawn with probability proportional to `weights`."""
    w = np.array(weights, dtype=float)
    if exclude is not None:
        w[exclude] = 0.0
    cum = np.cumsum(w)
    pick = rng.random() * cum[-1]
    return int(min(np.searchsorted(cum, pick, side="right"), len(w) - 1))


def select_parents(mu: np.ndarray, rng: np.random.Generator) -> tuple[int, int]:
    a = roulette(mu, rng)
    b = roulette(mu, rng, exclude=a)
    return a, b


def breed(parent_a: Individual, parent_b: Individual, cfg: EvolutionConfig,
          rng: np.random.Generator) -> Individual:
    """Uniform per-attribute crossover followed by per-attribute mutation."""
    genes = []
    for ga, gb in zip(parent_a.genes, parent_b.genes):
        values = {}
        for name in ATTRIBUTES:
            source = ga if rng.random() < 0.5 else gb
            values[name] = getattr(source, name)
            if rng.random() < cfg.mutation_rate:
                values[name] = random_attribute(name, ga.antigen_index, rng)
        genes.append(BehaviourGene(ga.antigen_index, score=50, **values))
    return Individual(tuple(genes))


def rl_replace(ind: Individual, cfg: EvolutionConfig, rng: np.random.Generator) -> Individual:
    """Swap out genes that have proven poor over enough trials."""
    mean = ind.mean_reward
    poor = (ind.evaluations >= cfg.min_evals) & (mean < cfg.replace_threshold)
    if not poor.any():
        return ind
    genes = list(ind.genes)
    evaluations = ind.evaluations.copy()
    reward_sum = ind.reward_sum.copy()
    for j in np.flatnonzero(poor):
        genes[j] = random_gene(int(j), rng)
        evaluations[j] = 0
        reward_sum[j] = 0.0
    return replace(ind, genes=tuple(genes), evaluations=evaluations, reward_sum=reward_sum)


def _plateaued(best_costs: list[float], window: int) -> bool:
    if window <= 0 or len(best_costs) <= window:
        return False
    old, new = best_costs[-1 - window], best_costs[-1]
    return old - new <= 0.01 * old


def evolve_population(world: World, profile: PlatformProfile, cfg: EvolutionConfig,
                      population: int,
                      on_generation: Callable[[dict], None] | None = None) -> Individual:
    """Evolve one isolated population and return its best individual."""
    seed = (cfg.seed, population)
    rng = np.random.default_rng([*seed, 0])
    pop = [random_individual(rng) for _ in range(cfg.population_size)]
    best_costs: list[float] = []
    best = None
    for gen in range(cfg.max_generations):
        pop = [ind if ind.eval is not None else
               evaluate(ind, world, profile, [*seed, gen + 1, k], cfg.time_limit, cfg.color)
               for k, ind in enumerate(pop)]
        mu = population_fitness([ind.eval for ind in pop], cfg.rho)
        for ind, m in zip(pop, mu):
            ind.fitness = float(m)
        costs = [ind.cost(cfg.rho) for ind in pop]
        best = pop[int(np.argmin(costs))]
        best_costs.append(best.cost(cfg.rho))
        row = {"population": population, "generation": gen, "best_t": best.eval[0],
               "best_c": best.eval[1], "best_cost": best_costs[-1],
               "mean_cost": float(np.mean(costs))}
        log.info("population %d generation %d best cost %.1f", population, gen, best_costs[-1])
        if on_generation is not None:
            on_generation(row)
        if gen == cfg.max_generations - 1 or _plateaued(best_costs, cfg.plateau_window):
            break
        breed_rng = np.random.default_rng([*seed, gen + 1, 10**6])
        parents = [rl_replace(ind, cfg, breed_rng) for ind in pop]
        children = [best]
        while len(children) < cfg.population_size:
            a, b = select_parents(mu, breed_rng)
            children.append(breed(parents[a], parents[b], cfg, breed_rng))
        pop = children
    return best


def evolve(world: World, profile: PlatformProfile, cfg: EvolutionConfig,
           on_generation: Callable[[dict], None] | None = None) -> Genome:
    """Run every population and collect their champions into a genome."""
    sets = []
    for p in range(cfg.populations):
        best = evolve_population(world, profile, cfg, p, on_generation)
        t, c = best.eval
        genes = tuple(replace(g, score=s) for g, s in zip(best.genes, best.scores()))
        sets.append(GeneSet(genes, t=max(1, int(round(t))), c=int(c)))
    return Genome(tuple(sets))


def format_log_row(row: dict) -> str:
    return (f"{row['population']},{row['generation']},{row['best_t']:.1f},{row['best_c']},"
            f"{row['best_cost']:.1f},{row['mean_cost']:.3f}")
