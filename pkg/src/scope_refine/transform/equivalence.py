"""Interpreter oracle for transformation soundness.

Rewrites may legitimately execute extra bookkeeping steps (dead stores,
desugared loops, re-tested chain conditions), so the transformed run gets
2x the original's observed steps plus a small per-edit constant before a
FuelExhausted mismatch counts as divergence. Results compare by value or
fault kind; step counts are never compared.
"""

from __future__ import annotations

import random

from ..minic import nodes as n
from ..minic.interp import DEFAULT_FUEL, FaultKind, interpret

_EDIT_SLACK = 24


def equivalent_on_args(original: n.SourceUnit, transformed: n.SourceUnit,
                       entry: str, args: tuple, fuel: int = DEFAULT_FUEL,
                       edits: int = 1) -> bool:
    base = interpret(original, entry, args, fuel)
    if base.fault is FaultKind.FUEL_EXHAUSTED:
        other = interpret(transformed, entry, args, 2 * fuel)
        return other.fault is FaultKind.FUEL_EXHAUSTED
    slack_fuel = 2 * base.steps_used + _EDIT_SLACK * max(1, edits)
    other = interpret(transformed, entry, args, slack_fuel)
    return base.same_result(other)


def random_args(fn: n.FunctionDef, rng: random.Random) -> tuple:
    """One argument vector matching the signature: small ints mostly, with
    occasional near-boundary magnitudes to exercise wrapping."""
    args = []
    for p in fn.params:
        if p.var_type == n.BOOL:
            args.append(rng.random() < 0.5)
        else:
            roll = rng.random()
            if roll < 0.70:
                args.append(rng.randint(-20, 20))
            elif roll < 0.95:
                args.append(rng.randint(-10_000, 10_000))
            else:
                args.append(rng.randint(-(1 << 62), 1 << 62))
    return tuple(args)


def equivalent_on_random_args(original: n.SourceUnit, transformed: n.SourceUnit,
                              entry: str, n_vectors: int = 20, rng_seed: int = 0,
                              fuel: int = DEFAULT_FUEL, edits: int = 1) -> bool:
    fn = next(f for f in original.functions if f.name == entry)
    rng = random.Random(rng_seed)
    for _ in range(n_vectors):
        if not equivalent_on_args(original, transformed, entry,
                                  random_args(fn, rng), fuel, edits):
            return False
    return True
