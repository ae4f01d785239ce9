"""Semantic-preserving rewrites: operator catalogue, applicability analysis,
genome representation, and the interpreter-equivalence oracle."""

from .equivalence import equivalent_on_args, equivalent_on_random_args, random_args
from .genome import (
    DEFAULT_MAX_GENOME_LEN,
    GenomeEdit,
    TransformGenome,
    apply_genome,
    random_edit,
    random_genome,
)
from .operators import (
    ALL_OPERATORS,
    Applied,
    Inapplicable,
    OperatorId,
    Site,
    TransformOutcome,
    all_applicable_sites,
    applicable_sites,
    apply_op,
)

__all__ = [
    "ALL_OPERATORS",
    "Applied",
    "DEFAULT_MAX_GENOME_LEN",
    "GenomeEdit",
    "Inapplicable",
    "OperatorId",
    "Site",
    "TransformGenome",
    "TransformOutcome",
    "all_applicable_sites",
    "applicable_sites",
    "apply_genome",
    "apply_op",
    "equivalent_on_args",
    "equivalent_on_random_args",
    "random_args",
    "random_edit",
    "random_genome",
]
