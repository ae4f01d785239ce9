"""Adaptive search over transformation genomes: evolutionary search plus
hill-climbing and random-search baselines, and the adapt() gate."""

from .adapt import AdaptKind, AdaptOutcome, Strategy, adapt
from .strategies import (
    Candidate,
    GenerationStats,
    SearchConfig,
    SearchResult,
    aes_search,
    hill_climb,
    random_search,
)

__all__ = [
    "AdaptKind",
    "AdaptOutcome",
    "Candidate",
    "GenerationStats",
    "SearchConfig",
    "SearchResult",
    "Strategy",
    "adapt",
    "aes_search",
    "hill_climb",
    "random_search",
]
