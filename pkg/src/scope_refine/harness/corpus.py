"""Corpus records: JSONL IO and synthetic corpus generation."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from ..errors import (
    CorpusError,
    GenerationExhaustedError,
    MalformedLineError,
    UnparseableSourceError,
)
from ..minic import interpret, parse, print_source
from ..minic.interp import FaultKind
from ..minic.nodes import DEFAULT_ENTRY, SourceUnit
from ..minic.parser import ParseError
from ..transform.equivalence import random_args
from .generator import GeneratorConfig, ProgramSampler, div_risk_label


@dataclass(frozen=True)
class CorpusRecord:
    id: str
    source: str
    label: int


def load_corpus(path: str | Path) -> list[CorpusRecord]:
    """Read a JSONL corpus: one {"id","source","label"} object per line.
    Bad JSON or missing/ill-typed fields raise MalformedLineError with the
    1-based line number; sources that fail to parse raise
    UnparseableSourceError carrying the parser diagnostic."""
    records = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedLineError(line_no, f"invalid JSON: {exc.msg}")
            if not isinstance(obj, dict):
                raise MalformedLineError(line_no, "expected a JSON object")
            for key, kind in (("id", str), ("source", str), ("label", int)):
                if key not in obj:
                    raise MalformedLineError(line_no, f"missing {key!r}")
                if not isinstance(obj[key], kind) or isinstance(obj[key], bool):
                    raise MalformedLineError(line_no, f"{key!r} must be {kind.__name__}")
            rec = CorpusRecord(obj["id"], obj["source"], obj["label"])
            try:
                parse(rec.source)
            except ParseError as exc:
                raise UnparseableSourceError(rec.id, str(exc))
            if rec.id in seen:
                raise CorpusError(f"duplicate record id {rec.id!r}")
            seen.add(rec.id)
            records.append(rec)
    return records


def save_corpus(records, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps({"id": rec.id, "source": rec.source,
                                 "label": rec.label}) + "\n")


def _halts_on_probes(unit: SourceUnit, rng: random.Random, fuel: int = 50_000) -> bool:
    fn = next(f for f in unit.functions if f.name == DEFAULT_ENTRY)
    for _ in range(3):
        outcome = interpret(unit, DEFAULT_ENTRY, random_args(fn, rng), fuel)
        if outcome.fault is FaultKind.FUEL_EXHAUSTED:
            return False
    return True


def synth_corpus(count: int, class_rule: str = "div-risk",
                 gen_seed: int = 0) -> list[CorpusRecord]:
    """Generate a balanced labeled corpus of random programs.

    div-risk labels a program 1 iff it divides by a variable; label-0
    programs mix no-division and constant-divisor cases so the token-level
    signal is learnable but imperfect. Balance is forced to an exact
    floor(n/2) split. Deterministic in (count, gen_seed)."""
    if class_rule != "div-risk":
        raise CorpusError(f"unknown class rule {class_rule!r}")
    want = {1: count // 2, 0: count - count // 2}
    have = {0: 0, 1: 0}
    records: list[CorpusRecord] = []
    rng = random.Random(gen_seed)
    attempts = 0
    max_attempts = 60 * count
    while len(records) < count:
        attempts += 1
        if attempts > max_attempts:
            raise GenerationExhaustedError(
                f"could not reach class balance within {max_attempts} attempts")
        if have[1] < want[1] and (have[0] >= want[0] or rng.random() < 0.5):
            mode = "var"
        else:
            mode = "const" if rng.random() < 0.45 else "none"
        sampler = ProgramSampler(random.Random(rng.getrandbits(64)),
                                 GeneratorConfig(div_mode=mode))
        unit = sampler.generate()
        label = div_risk_label(unit)
        if have[label] >= want[label]:
            continue
        if not _halts_on_probes(unit, random.Random(rng.getrandbits(64))):
            continue
        have[label] += 1
        records.append(CorpusRecord(f"synth-{len(records):05d}", print_source(unit), label))
    return records
