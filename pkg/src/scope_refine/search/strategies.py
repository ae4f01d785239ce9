"""Search strategies over transformation genomes.

Fitness is the combined validity score of the transformed variant, computed
with the run's fixed (K, base_seed); no labels are consulted. All three
strategies are pure functions of (input, config, seed) and track the best
candidate ever evaluated, so best-so-far histories are non-decreasing.
Candidate ties break toward the shorter genome, then earlier discovery.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from ..errors import BudgetTooSmallError
from ..minic import nodes as n
from ..minic import print_source
from ..model.surrogate import tokens_of_source
from ..transform import (
    GenomeEdit,
    TransformGenome,
    all_applicable_sites,
    apply_genome,
    random_genome,
)
from ..validate.dsmg import DsmgValidator


@dataclass(frozen=True)
class SearchConfig:
    population: int = 20
    generations: int = 10
    tournament_size: int = 3
    crossover_rate: float = 0.7
    mutation_rate: float = 0.3
    elitism: int = 1
    eval_budget: int | None = None  # default population * (generations + 1)
    early_stop_tau: float | None = None
    max_genome_len: int = 8
    max_stall: int = 25  # hill climbing

    def __post_init__(self):
        if self.population < 2:
            raise ValueError("population must be >= 2")
        if not 0 <= self.elitism < self.population:
            raise ValueError("elitism must be in [0, population)")

    @property
    def default_budget(self) -> int:
        return self.eval_budget or self.population * (self.generations + 1)


@dataclass(frozen=True)
class Candidate:
    genome: TransformGenome
    unit: n.SourceUnit
    fitness: float
    order: int  # discovery index within the run

    def sort_key(self):
        return (-self.fitness, len(self.genome), self.order)


@dataclass(frozen=True)
class GenerationStats:
    best: float  # best-so-far at the end of the generation
    mean: float  # mean fitness of the candidates evaluated in it


@dataclass
class SearchResult:
    best: Candidate
    history: list[GenerationStats]
    evaluations_used: int
    strategy: str
    wall_seconds: float = 0.0
    transforms_applied: int = 0
    transform_seconds: float = 0.0


class _Evaluator:
    """Applies genomes and scores the result, accounting for the evaluation
    budget and transformation-only wall time."""

    def __init__(self, original: n.SourceUnit, model, validator: DsmgValidator):
        self.original = original
        self.model = model
        self.validator = validator
        self.evaluations = 0
        self.order = 0
        self.transforms_applied = 0
        self.transform_seconds = 0.0

    def evaluate(self, genome: TransformGenome) -> Candidate:
        t0 = time.perf_counter()
        unit, applied = apply_genome(self.original, genome)
        self.transform_seconds += time.perf_counter() - t0
        self.transforms_applied += applied
        score = self.validator.score_tokens(
            self.model, tokens_of_source(print_source(unit)))
        self.evaluations += 1
        self.order += 1
        return Candidate(genome, unit, score.combined, self.order)


def _best(a: Candidate, b: Candidate) -> Candidate:
    return a if a.sort_key() <= b.sort_key() else b


def _finish(result: SearchResult, ev: _Evaluator, t0: float) -> SearchResult:
    result.wall_seconds = time.perf_counter() - t0
    result.transforms_applied = ev.transforms_applied
    result.transform_seconds = ev.transform_seconds
    result.evaluations_used = ev.evaluations
    return result


def _mutate(genome: TransformGenome, site_counts: dict, rng: random.Random,
            max_len: int) -> TransformGenome:
    """One of {append, replace, drop}, uniform. Appended/replacement edits
    draw an operator uniformly over those applicable to the original unit
    and a rank over its site count; ranks re-resolve at application time."""
    edits = list(genome.edits)
    options = [(op, count) for op, count in site_counts.items() if count]
    move = rng.choice(("append", "replace", "drop"))

    def fresh_edit() -> GenomeEdit | None:
        if not options:
            return None
        op, count = options[rng.randrange(len(options))]
        return GenomeEdit(op, rng.randrange(count), rng.getrandbits(64))

    if move == "drop" and edits:
        edits.pop(rng.randrange(len(edits)))
    elif move == "replace" and edits:
        edit = fresh_edit()
        if edit is not None:
            edits[rng.randrange(len(edits))] = edit
    else:
        edit = fresh_edit()
        if edit is not None and len(edits) < max_len:
            edits.append(edit)
    return TransformGenome(tuple(edits))


def _crossover(g1: TransformGenome, g2: TransformGenome, rng: random.Random,
               max_len: int) -> TransformGenome:
    cut = rng.randint(0, min(len(g1), len(g2)))
    return TransformGenome((g1.edits[:cut] + g2.edits[cut:])[:max_len])


def _tournament(pop: list[Candidate], size: int, rng: random.Random) -> Candidate:
    picks = [pop[rng.randrange(len(pop))] for _ in range(min(size, len(pop)))]
    return min(picks, key=Candidate.sort_key)


def aes_search(original: n.SourceUnit, model, validator: DsmgValidator,
               cfg: SearchConfig = SearchConfig(), seed: int = 0) -> SearchResult:
    """Adaptation by evolutionary search: elitism, tournament selection,
    one-point genome crossover, and append/replace/drop mutation."""
    t0 = time.perf_counter()
    budget = cfg.default_budget
    if budget < cfg.population:
        raise BudgetTooSmallError(
            f"budget {budget} cannot evaluate generation 0 of {cfg.population}")
    rng = random.Random(seed)
    ev = _Evaluator(original, model, validator)
    site_counts = {op: len(sites) for op, sites in all_applicable_sites(original).items()}

    pop = [ev.evaluate(TransformGenome())]
    for _ in range(cfg.population - 1):
        length = rng.randint(1, cfg.max_genome_len)
        pop.append(ev.evaluate(random_genome(original, length, rng.getrandbits(64),
                                             cfg.max_genome_len)))
    best = min(pop, key=Candidate.sort_key)
    history = [GenerationStats(best.fitness, sum(c.fitness for c in pop) / len(pop))]
    result = SearchResult(best, history, ev.evaluations, "aes")

    for _ in range(cfg.generations):
        if cfg.early_stop_tau is not None and best.fitness >= cfg.early_stop_tau:
            break
        if ev.evaluations >= budget:
            break
        ranked = sorted(pop, key=Candidate.sort_key)
        children = ranked[:cfg.elitism]
        fresh: list[Candidate] = []
        while len(children) + len(fresh) < cfg.population and ev.evaluations < budget:
            parent = _tournament(pop, cfg.tournament_size, rng)
            genome = parent.genome
            if rng.random() < cfg.crossover_rate:
                other = _tournament(pop, cfg.tournament_size, rng)
                genome = _crossover(genome, other.genome, rng, cfg.max_genome_len)
            if rng.random() < cfg.mutation_rate:
                genome = _mutate(genome, site_counts, rng, cfg.max_genome_len)
            fresh.append(ev.evaluate(genome))
        pop = children + fresh
        for cand in fresh:
            best = _best(best, cand)
        history.append(GenerationStats(
            best.fitness, sum(c.fitness for c in pop) / len(pop)))

    result.best = best
    return _finish(result, ev, t0)


def hill_climb(original: n.SourceUnit, model, validator: DsmgValidator,
               budget: int, seed: int = 0,
               cfg: SearchConfig = SearchConfig()) -> SearchResult:
    """First-improvement hill climbing over single-edit genome neighbors,
    stopping on budget exhaustion or max_stall consecutive non-improvements
    (a local optimum)."""
    t0 = time.perf_counter()
    if budget < 1:
        raise BudgetTooSmallError("hill climbing needs at least 1 evaluation")
    rng = random.Random(seed)
    ev = _Evaluator(original, model, validator)
    site_counts = {op: len(sites) for op, sites in all_applicable_sites(original).items()}

    current = ev.evaluate(TransformGenome())
    history = [GenerationStats(current.fitness, current.fitness)]
    stall = 0
    while ev.evaluations < budget and stall < cfg.max_stall:
        neighbor_genome = _mutate(current.genome, site_counts, rng, cfg.max_genome_len)
        neighbor = ev.evaluate(neighbor_genome)
        if neighbor.fitness > current.fitness:  # strict improvement only
            current = neighbor
            stall = 0
        else:
            stall += 1
        history.append(GenerationStats(current.fitness, neighbor.fitness))
    result = SearchResult(current, history, ev.evaluations, "hc")
    return _finish(result, ev, t0)


def random_search(original: n.SourceUnit, model, validator: DsmgValidator,
                  budget: int, tau: float, seed: int = 0,
                  cfg: SearchConfig = SearchConfig()) -> SearchResult:
    """Independent random genomes until one reaches tau or the budget runs
    out; returns the best seen."""
    t0 = time.perf_counter()
    if budget < 1:
        raise BudgetTooSmallError("random search needs at least 1 evaluation")
    rng = random.Random(seed)
    ev = _Evaluator(original, model, validator)
    best: Candidate | None = None
    history: list[GenerationStats] = []
    while ev.evaluations < budget:
        length = rng.randint(1, cfg.max_genome_len)
        cand = ev.evaluate(random_genome(original, length, rng.getrandbits(64),
                                         cfg.max_genome_len))
        best = cand if best is None else _best(best, cand)
        history.append(GenerationStats(best.fitness, cand.fitness))
        if cand.fitness >= tau:
            break
    result = SearchResult(best, history, ev.evaluations, "rand")
    return _finish(result, ev, t0)
