"""Speciation, stagnation, reproduction and the generational loop."""
from __future__ import annotations

import logging
import math
import os
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import count

from tdneat.config import Config
from tdneat.genome import Genome, InnovationRegistry, compatibility_distance, initial_genome
from tdneat.network import evaluate
from tdneat.plants import Dataset
from tdneat.variation import crossover, mutate

log = logging.getLogger(__name__)

THREADS_ENV = "TDNEAT_THREADS"


class ExtinctionError(RuntimeError):
    """Every species was removed; the caller has to start over."""


@dataclass(eq=False)
class Species:
    id: int
    representative: Genome
    members: list[Genome]
    created: int = 0
    best_fitness_ever: float = -math.inf
    last_improved_generation: int = 0

    def best_fitness(self) -> float:
        return max(_fit(m) for m in self.members)

    def ranked(self) -> list[Genome]:
        return sorted(self.members, key=_fit, reverse=True)


@dataclass(frozen=True)
class LogEntry:
    generation: int
    mean_fitness: float
    best_fitness: float
    species_count: int
    best_du: int
    best_dy: int
    best_node_count: int
    best_connection_count: int


@dataclass
class RunResult:
    winner: Genome
    log: list[LogEntry] = field(default_factory=list)
    wall_time: float = 0.0
    reinitializations: int = 0


def _fit(g: Genome) -> float:
    return -math.inf if g.fitness is None else g.fitness


def speciate(genomes: list[Genome], previous: list[Species], config: Config,
             generation: int = 0, ids=None) -> list[Species]:
    """Assign each genome to the first species whose representative is close enough.

    Representatives are then moved to the member closest to the old one, and
    species left without members are dropped.
    """
    if ids is None:
        ids = count(max((s.id for s in previous), default=0) + 1)
    species = [Species(s.id, s.representative, [], s.created, s.best_fitness_ever,
                       s.last_improved_generation) for s in previous]
    threshold = config.compatibility_threshold
    for g in genomes:
        for s in species:
            if compatibility_distance(g, s.representative, config) < threshold:
                s.members.append(g)
                break
        else:
            species.append(Species(next(ids), g, [g], generation, -math.inf, generation))
    alive = []
    for s in species:
        if s.members:
            old = s.representative
            s.representative = min(s.members, key=lambda m: compatibility_distance(m, old, config))
            alive.append(s)
    return alive


def update_stagnation(species: list[Species], config: Config, generation: int) -> list[Species]:
    for s in species:
        best = s.best_fitness()
        if best > s.best_fitness_ever:
            s.best_fitness_ever = best
            s.last_improved_generation = generation
    ranked = sorted(species, key=lambda s: s.best_fitness(), reverse=True)
    protected = {s.id for s in ranked[:config.species_elitism]}
    survivors = []
    for s in species:
        if s.id in protected or generation - s.last_improved_generation <= config.max_stagnation:
            survivors.append(s)
        else:
            log.debug("species %d stagnant since generation %d", s.id, s.last_improved_generation)
    return survivors


def allocate(weights: list[float], total: int) -> list[int]:
    """Split ``total`` proportionally to ``weights`` by largest remainder.

    Ties in the fractional parts go to the earlier entry. All-zero weights
    split evenly.
    """
    if not weights:
        return []
    mass = sum(weights)
    if mass <= 0:
        weights, mass = [1.0] * len(weights), float(len(weights))
    exact = [w / mass * total for w in weights]
    quotas = [math.floor(x) for x in exact]
    order = sorted(range(len(weights)), key=lambda i: (-(exact[i] - quotas[i]), i))
    for i in order[:total - sum(quotas)]:
        quotas[i] += 1
    return quotas


def adjusted_fitness(species: list[Species]) -> list[float]:
    """Shared fitness mass per species: mean of member fitness shifted by the population minimum."""
    finite = [m.fitness for s in species for m in s.members
              if m.fitness is not None and math.isfinite(m.fitness)]
    floor = min(finite, default=0.0)
    out = []
    for s in species:
        shifted = [(_fit(m) if math.isfinite(_fit(m)) else floor) - floor for m in s.members]
        out.append(sum(shifted) / len(shifted))
    return out


def parent_pool(ranked: list[Genome], survival_threshold: float) -> list[Genome]:
    size = max(math.ceil(len(ranked) * survival_threshold), min(2, len(ranked)))
    return ranked[:size]


def reproduce(species: list[Species], config: Config, rng: random.Random,
              registry: InnovationRegistry) -> list[Genome]:
    if not species:
        raise ExtinctionError("all species extinct")
    elites = [min(config.elitism, len(s.members)) for s in species]
    # species sorted worst first lose elite slots if they cannot all fit
    for i in sorted(range(len(species)), key=lambda i: species[i].best_fitness()):
        excess = sum(elites) - config.pop_size
        if excess <= 0:
            break
        elites[i] -= min(excess, elites[i])
    offspring = allocate(adjusted_fitness(species), config.pop_size - sum(elites))

    new = []
    for s, n_elite, n_child in zip(species, elites, offspring):
        ranked = s.ranked()
        new.extend(g.copy() for g in ranked[:n_elite])
        pool = parent_pool(ranked, config.survival_threshold)
        for _ in range(n_child):
            p1, p2 = rng.choice(pool), rng.choice(pool)
            child = crossover(p1, p2, config, rng)
            new.append(mutate(child, config, rng, registry))
    return new


def thread_count(threads: int | None = None) -> int:
    if threads is None:
        raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
        try:
            threads = int(raw)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if threads <= 0:
        threads = os.cpu_count() or 1
    return threads


def evaluate_genomes(genomes: list[Genome], dataset: Dataset, threads: int = 1) -> None:
    """Fill in missing fitness values; the result does not depend on ``threads``."""
    todo = [g for g in genomes if g.fitness is None]
    if threads > 1 and len(todo) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            scores = list(pool.map(lambda g: evaluate(g, dataset.u, dataset.t), todo))
    else:
        scores = [evaluate(g, dataset.u, dataset.t) for g in todo]
    for g, f in zip(todo, scores):
        g.fitness = f


class Population:
    def __init__(self, config: Config, dataset: Dataset, rng: random.Random | None = None,
                 threads: int | None = None):
        self.config = config
        self.dataset = dataset
        self.rng = rng if rng is not None else random.Random(config.seed)
        self.threads = thread_count(threads)
        self.registry = InnovationRegistry()
        self.generation = 0
        self.species: list[Species] = []
        self.species_ids = count(1)
        self.best: Genome | None = None
        self.log: list[LogEntry] = []
        self.initial_delays: set[tuple[int, int]] = set()
        self.reinitializations = 0
        self.genomes = self.initial_population()

    def initial_population(self) -> list[Genome]:
        genomes = [initial_genome(self.config, self.rng, self.registry)
                   for _ in range(self.config.pop_size)]
        self.initial_delays.update((g.du, g.dy) for g in genomes)
        return genomes

    def evaluate(self) -> None:
        evaluate_genomes(self.genomes, self.dataset, self.threads)
        for g in self.genomes:
            if self.best is None or _fit(g) > _fit(self.best):
                self.best = g.copy()

    def speciate(self) -> None:
        self.species = speciate(self.genomes, self.species, self.config, self.generation,
                                self.species_ids)

    def record(self) -> LogEntry:
        best = self.best
        entry = LogEntry(
            generation=self.generation,
            mean_fitness=sum(_fit(g) for g in self.genomes) / len(self.genomes),
            best_fitness=_fit(best),
            species_count=len(self.species),
            best_du=best.du,
            best_dy=best.dy,
            best_node_count=len(best.nodes),
            best_connection_count=sum(c.enabled for c in best.connections.values()),
        )
        self.log.append(entry)
        return entry

    def advance(self) -> None:
        """Stagnation and reproduction; the next generation is left unevaluated."""
        survivors = update_stagnation(self.species, self.config, self.generation)
        try:
            self.genomes = reproduce(survivors, self.config, self.rng, self.registry)
            self.species = survivors
        except ExtinctionError:
            log.warning("generation %d: all species extinct, reinitializing", self.generation)
            self.reinitializations += 1
            self.species = []
            self.genomes = self.initial_population()
        self.generation += 1


def evolve(config: Config, dataset: Dataset, rng: random.Random | None = None,
           threads: int | None = None, observer=None) -> RunResult:
    """Run ``config.generations`` generations and return the best-ever genome.

    ``observer(population)`` is called after each generation is evaluated and
    speciated.
    """
    start = time.perf_counter()
    pop = Population(config, dataset, rng, threads)
    while True:
        pop.evaluate()
        pop.speciate()
        pop.record()
        if observer is not None:
            observer(pop)
        if pop.generation >= config.generations:
            break
        pop.advance()
    return RunResult(pop.best.copy(), pop.log, time.perf_counter() - start, pop.reinitializations)
