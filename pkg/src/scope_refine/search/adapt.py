"""The adaptation gate: validate, then search only when out of scope.

Outcomes:
  Unchanged  - the input already scored in-scope; zero search evaluations.
  Refined    - a variant reached the threshold.
  BestEffort - the search budget ran out below the threshold; the best
               variant found is returned anyway.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..minic import nodes as n
from ..minic import print_source
from ..model.surrogate import tokens_of_source
from ..validate.dsmg import DsmgValidator, ValidityScore, Verdict
from .strategies import (
    Candidate,
    SearchConfig,
    SearchResult,
    TransformGenome,
    aes_search,
    hill_climb,
    random_search,
)


class Strategy(str, Enum):
    AES = "aes"
    HILL_CLIMB = "hc"
    RANDOM = "rand"


class AdaptKind(str, Enum):
    UNCHANGED = "Unchanged"
    REFINED = "Refined"
    BEST_EFFORT = "BestEffort"


@dataclass(frozen=True)
class AdaptOutcome:
    kind: AdaptKind
    unit: n.SourceUnit
    genome: TransformGenome
    original_score: ValidityScore
    final_score: float
    prediction: int  # model's class on the returned unit
    evaluations_used: int
    search: SearchResult | None


def adapt(original: n.SourceUnit, model, validator: DsmgValidator,
          strategy: Strategy | str = Strategy.AES,
          cfg: SearchConfig = SearchConfig(), seed: int = 0) -> AdaptOutcome:
    strategy = Strategy(strategy)
    score0 = validator.score_unit(model, original)

    def predict(unit: n.SourceUnit) -> int:
        out = model.infer_tokens(tokens_of_source(print_source(unit)))
        return out.predicted_class

    if validator.verdict(score0).verdict is Verdict.IN_SCOPE:
        return AdaptOutcome(AdaptKind.UNCHANGED, original, TransformGenome(),
                            score0, score0.combined, predict(original), 0, None)

    tau = validator.tau
    budget = cfg.default_budget
    if strategy is Strategy.AES:
        search_cfg = cfg if cfg.early_stop_tau is not None else \
            SearchConfig(**{**cfg.__dict__, "early_stop_tau": tau})
        result = aes_search(original, model, validator, search_cfg, seed)
    elif strategy is Strategy.HILL_CLIMB:
        result = hill_climb(original, model, validator, budget, seed, cfg)
    else:
        result = random_search(original, model, validator, budget, tau, seed, cfg)

    best: Candidate = result.best
    kind = AdaptKind.REFINED if best.fitness >= tau else AdaptKind.BEST_EFFORT
    return AdaptOutcome(kind, best.unit, best.genome, score0, best.fitness,
                        predict(best.unit), result.evaluations_used, result)
