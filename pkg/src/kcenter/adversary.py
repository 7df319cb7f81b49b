"""Evolutionary search for customer layouts where one solver beats another.

A genome is a flat float array ``(x1, y1, ..., xn, yn)`` with every gene in
the open unit interval; it decodes to customers in the 100 x 100 square.
Fitness is ``D_challenger - D_challenged`` and is minimized.
"""
from __future__ import annotations

from concurrent.futures import Executor
from dataclasses import dataclass, field

import numpy as np

from .core import Instance
from .solvers import SolverConfig, solve

SQUARE = 100.0
LOW = 1e-9
HIGH = 1.0 - 1e-9

Genome = np.ndarray


@dataclass(frozen=True)
class EAConfig:
    n_customers: int
    k: int
    challenger: SolverConfig
    challenged: SolverConfig
    population: int = 20
    generations: int = 100
    mutation_sigma: float = 0.05
    recombination_prob: float = 0.3
    recombination_alpha: float = 0.5
    tournament_size: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.n_customers < 1 or self.population < 1 or self.tournament_size < 1:
            raise ValueError("n_customers, population and tournament_size must be positive")
        if self.generations < 0:
            raise ValueError("generations must be >= 0")
        if not 1 <= self.k <= self.n_customers:
            raise ValueError(f"k must satisfy 1 <= k <= n_customers ({self.n_customers})")
        if not 0.0 <= self.recombination_prob <= 1.0:
            raise ValueError("recombination_prob must lie in [0, 1]")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass
class EvolutionResult:
    best_genome: Genome
    best_fitness: float
    fitness_history: list[float]
    best_instance: Instance
    evaluations: int = 0
    config: EAConfig | None = field(default=None, repr=False)


def check_genome(g, n_customers: int | None = None) -> Genome:
    g = np.asarray(g, dtype=float)
    if g.ndim != 1 or g.size == 0 or g.size % 2:
        raise ValueError("genome must be a flat vector of even, non-zero length")
    if n_customers is not None and g.size != 2 * n_customers:
        raise ValueError(f"genome length {g.size} does not match {n_customers} customers")
    if not np.all((g > 0.0) & (g < 1.0)):
        raise ValueError("genes must lie strictly inside (0, 1)")
    return g


def decode(g: Genome, k: int) -> Instance:
    return Instance.from_array(SQUARE * np.asarray(g, dtype=float).reshape(-1, 2), k)


def encode(inst: Instance) -> Genome:
    return inst.coords.reshape(-1) / SQUARE


def fitness(g: Genome, cfg: EAConfig) -> float:
    inst = decode(g, cfg.k)
    d_challenger = solve(inst, cfg.challenger)[0].objective
    d_challenged = solve(inst, cfg.challenged)[0].objective
    return d_challenger - d_challenged


def mutate(g: Genome, rng: np.random.Generator, sigma: float = 0.05) -> Genome:
    """Perturb one uniformly chosen gene by N(0, sigma), clamped into the open interval."""
    child = np.array(g, dtype=float)
    i = rng.integers(child.size)
    child[i] = min(max(child[i] + rng.normal(0.0, sigma), LOW), HIGH)
    return child


def recombine(
    a: Genome,
    b: Genome,
    rng: np.random.Generator,
    prob: float = 0.3,
    alpha: float = 0.5,
) -> Genome:
    """Whole arithmetic recombination; returns a copy of ``a`` when the coin misses."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"parent length mismatch: {a.size} vs {b.size}")
    if rng.random() < prob:
        return alpha * a + (1.0 - alpha) * b
    return a.copy()


def _tournament(fit: list[float], size: int, rng: np.random.Generator) -> int:
    # lower fitness wins; on ties the earlier individual (smaller index) wins
    entrants = rng.integers(len(fit), size=size)
    return int(min(entrants, key=lambda i: (fit[i], i)))


def _variation_rng(seed: int, generation: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), generation, index]))


def _evaluate(genomes: list[Genome], cfg: EAConfig, executor: Executor | None) -> list[float]:
    if executor is None:
        return [fitness(g, cfg) for g in genomes]
    return list(executor.map(fitness, genomes, [cfg] * len(genomes)))


def evolve(cfg: EAConfig, executor: Executor | None = None) -> EvolutionResult:
    """Run the (mu + lambda) evolutionary search described by ``cfg``.

    ``executor`` may parallelize fitness evaluation; all random draws happen
    in the calling process in a fixed order, so results do not depend on it.
    """
    init_rng = _variation_rng(cfg.seed, 0, 2**32 - 1)
    pop = [
        np.clip(init_rng.random(2 * cfg.n_customers), LOW, HIGH)
        for _ in range(cfg.population)
    ]
    fit = _evaluate(pop, cfg, executor)
    evaluations = len(pop)
    history = [min(fit)]

    for gen in range(1, cfg.generations + 1):
        offspring = []
        for i in range(cfg.population):
            rng = _variation_rng(cfg.seed, gen, i)
            pa = _tournament(fit, cfg.tournament_size, rng)
            pb = _tournament(fit, cfg.tournament_size, rng)
            child = recombine(pop[pa], pop[pb], rng, cfg.recombination_prob, cfg.recombination_alpha)
            offspring.append(mutate(child, rng, cfg.mutation_sigma))
        off_fit = _evaluate(offspring, cfg, executor)
        evaluations += len(offspring)

        # parents precede offspring, so a stable sort favours older individuals on ties
        merged = pop + offspring
        merged_fit = fit + off_fit
        keep = sorted(range(len(merged)), key=lambda j: merged_fit[j])[: cfg.population]
        pop = [merged[j] for j in keep]
        fit = [merged_fit[j] for j in keep]
        history.append(fit[0])

    best = min(range(len(pop)), key=lambda j: (fit[j], j))
    return EvolutionResult(
        best_genome=pop[best],
        best_fitness=fit[best],
        fitness_history=history,
        best_instance=decode(pop[best], cfg.k),
        evaluations=evaluations,
        config=cfg,
    )
