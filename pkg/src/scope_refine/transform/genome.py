"""Transformation genomes: ordered (operator, site rank, seed) edit lists.

A rank indexes into the operator's applicable-site list at application time,
so a genome stays meaningful as earlier edits reshape the tree; edits whose
rank falls outside the current site list are skipped.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from ..minic import nodes as n
from .operators import (
    ALL_OPERATORS,
    Applied,
    OperatorId,
    all_applicable_sites,
    apply_op,
    applicable_sites,
)

DEFAULT_MAX_GENOME_LEN = 8


@dataclass(frozen=True)
class GenomeEdit:
    op: OperatorId
    rank: int
    seed: int


@dataclass(frozen=True)
class TransformGenome:
    edits: tuple[GenomeEdit, ...] = ()

    def __len__(self) -> int:
        return len(self.edits)

    def describe(self) -> str:
        return ";".join(f"{e.op.value}@{e.rank}#{e.seed}" for e in self.edits) or "identity"


def apply_genome(unit: n.SourceUnit, genome: TransformGenome) -> tuple[n.SourceUnit, int]:
    """Apply edits left to right, skipping inapplicable ones. Returns the
    final unit (the input object itself when nothing applied) and the count
    of edits that applied."""
    current = unit
    applied = 0
    for edit in genome.edits:
        sites = applicable_sites(current, edit.op)
        if edit.rank >= len(sites):
            continue
        outcome = apply_op(current, edit.op, sites[edit.rank], edit.seed)
        if isinstance(outcome, Applied):
            current = outcome.unit
            applied += 1
    return current, applied


def random_genome(unit: n.SourceUnit, length: int, rng_seed: int,
                  max_genome_len: int = DEFAULT_MAX_GENOME_LEN) -> TransformGenome:
    """Draw a genome of up to `length` edits, deterministically in
    (unit, length, rng_seed). Each edit draws an operator uniformly from
    those applicable to the unit as transformed so far, then a rank uniform
    over that operator's sites; stops early if nothing applies."""
    if length > max_genome_len:
        raise ValueError(f"genome length {length} exceeds max {max_genome_len}")
    rng = random.Random(rng_seed)
    current = unit
    edits: list[GenomeEdit] = []
    for _ in range(length):
        by_op = all_applicable_sites(current)
        options = [(op, len(sites)) for op, sites in by_op.items() if sites]
        if not options:
            break
        op, n_sites = options[rng.randrange(len(options))]
        rank = rng.randrange(n_sites)
        seed = rng.getrandbits(64)
        outcome = apply_op(current, op, by_op[op][rank], seed)
        assert isinstance(outcome, Applied)
        current = outcome.unit
        edits.append(GenomeEdit(op, rank, seed))
    return TransformGenome(tuple(edits))


def random_edit(site_counts: dict[OperatorId, int], rng: random.Random) -> GenomeEdit | None:
    """One uniform edit over operators with at least one site (counts taken
    against a reference unit). Used by search mutation."""
    options = [(op, count) for op, count in site_counts.items() if count]
    if not options:
        return None
    op, count = options[rng.randrange(len(options))]
    return GenomeEdit(op, rng.randrange(count), rng.getrandbits(64))
