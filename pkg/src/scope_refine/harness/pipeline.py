"""End-to-end experiment runner.

Stages: split -> train surrogate + probes -> calibrate temperature and tau
on the calibration split -> baseline test evaluation -> validity verdict per
test input -> adapt the OutOfScope ones with the configured strategy ->
re-evaluate -> report. The report embeds the full config so a run can be
reproduced; wall-clock fields (tps, mean_adapt_seconds) are the only
nondeterministic entries.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from ..errors import EmptyDenominatorError, ReportVersionError, SingleClassError
from ..minic import parse
from ..model.protocol import LocalModel
from ..model.surrogate import (
    ModelSpec,
    TrainConfig,
    fit_layer_probes,
    tokenize_unit,
    train_surrogate,
)
from ..search.adapt import AdaptKind, Strategy, adapt
from ..search.strategies import SearchConfig
from ..validate.dsmg import DsmgValidator, DsmgWeights, classify_input
from ..validate.threshold import (
    CalibrationMode,
    ThresholdConfig,
    calibrate_threshold,
    fit_temperature,
)
from ..validate.uncertainty import (
    SAMPLE_METRICS,
    SINGLE_OUTPUT_METRICS,
    Metric,
    score as metric_score,
)
from .corpus import CorpusRecord, load_corpus, synth_corpus
from .metrics import auc, classification_metrics, cvr_mvr

REPORT_VERSION = "scope-refine-report/1"

_BASELINE_METRICS = tuple(m for m in Metric if m is not Metric.DEEP_ENSEMBLE)


@dataclass(frozen=True)
class SplitSpec:
    train: float = 0.5
    calibrate: float = 0.25
    test: float = 0.25
    split_seed: int = 0

    def __post_init__(self):
        if abs(self.train + self.calibrate + self.test - 1.0) > 1e-9:
            raise ValueError("split fractions must sum to 1")

    def split(self, records: list) -> tuple[list, list, list]:
        """Deterministic disjoint exhaustive split."""
        order = list(range(len(records)))
        random.Random(self.split_seed).shuffle(order)
        n = len(records)
        n_train = round(self.train * n)
        n_cal = round(self.calibrate * n)
        train = [records[i] for i in order[:n_train]]
        cal = [records[i] for i in order[n_train:n_train + n_cal]]
        test = [records[i] for i in order[n_train + n_cal:]]
        return train, cal, test


@dataclass(frozen=True)
class ExperimentConfig:
    corpus_path: str | None = None  # None -> synthesize
    synth_n: int = 1000
    gen_seed: int = 1
    class_rule: str = "div-risk"
    split: SplitSpec = SplitSpec()
    model: ModelSpec = ModelSpec()
    train: TrainConfig = TrainConfig()
    train_seed: int = 0
    k: int = 30
    base_seed: int = 17
    weights: DsmgWeights = DsmgWeights()
    threshold: ThresholdConfig = ThresholdConfig()
    strategy: str = "aes"  # 'aes' | 'hc' | 'rand' | 'none'
    search: SearchConfig = SearchConfig()
    search_seed: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    @staticmethod
    def from_dict(data: dict) -> "ExperimentConfig":
        data = dict(data)
        for key, cls in (("split", SplitSpec), ("model", ModelSpec),
                         ("train", TrainConfig), ("weights", DsmgWeights),
                         ("search", SearchConfig)):
            if key in data and isinstance(data[key], dict):
                data[key] = cls(**data[key])
        if isinstance(data.get("threshold"), dict):
            t = dict(data["threshold"])
            t["calibration"] = CalibrationMode(t.get("calibration", "mvr_budget"))
            data["threshold"] = ThresholdConfig(**t)
        return ExperimentConfig(**data)


@dataclass
class MetricsReport:
    config: dict
    partial: bool = False
    error: str | None = None
    n_total: int = 0
    n_train: int = 0
    n_calibrate: int = 0
    n_test: int = 0
    train_accuracy: float = 0.0
    temperature: float = 1.0
    tau: float = 0.0
    baseline: dict = field(default_factory=dict)  # accuracy/precision/recall/f1
    post: dict = field(default_factory=dict)
    auc: float | None = None  # validity-score AUC for predicting correctness
    baseline_aucs: dict = field(default_factory=dict)  # metric name -> AUC
    cvr: float | None = None
    mvr: float | None = None
    n_baseline_mispredictions: int = 0
    n_flagged: int = 0
    n_adapted: int = 0
    n_corrected: int = 0
    n_regressed: int = 0
    corrected_fraction: float = 0.0
    regressed_fraction: float = 0.0
    transforms_applied: int = 0
    tps: float = 0.0
    mean_adapt_seconds: float = 0.0

    WALL_CLOCK_FIELDS = ("tps", "mean_adapt_seconds")

    def to_dict(self) -> dict:
        return asdict(self)

    @staticmethod
    def from_dict(data: dict) -> "MetricsReport":
        return MetricsReport(**data)


def report_write(report: MetricsReport, path: str | Path) -> None:
    doc = {"version": REPORT_VERSION, "report": report.to_dict()}
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n",
                          encoding="utf-8")


def report_read(path: str | Path) -> MetricsReport:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("version") != REPORT_VERSION:
        raise ReportVersionError(
            f"expected version {REPORT_VERSION!r}, got {doc.get('version')!r}")
    return MetricsReport.from_dict(doc["report"])


def report_json(report: MetricsReport, include_wall_clock: bool = True) -> str:
    data = report.to_dict()
    if not include_wall_clock:
        for key in MetricsReport.WALL_CLOCK_FIELDS:
            data.pop(key, None)
    return json.dumps({"version": REPORT_VERSION, "report": data},
                      sort_keys=True, indent=2)


def _load_records(cfg: ExperimentConfig) -> list[CorpusRecord]:
    if cfg.corpus_path is not None:
        return load_corpus(cfg.corpus_path)
    return synth_corpus(cfg.synth_n, cfg.class_rule, cfg.gen_seed)


def run_pipeline(cfg: ExperimentConfig) -> MetricsReport:
    """Run the full experiment. Component failures mark the report partial
    with the error recorded; nothing is silently truncated."""
    report = MetricsReport(config=cfg.to_dict())
    try:
        return _run(cfg, report)
    except Exception as exc:  # partial report, never a half-written one
        report.partial = True
        report.error = f"{type(exc).__name__}: {exc}"
        return report


def _run(cfg: ExperimentConfig, report: MetricsReport) -> MetricsReport:
    records = _load_records(cfg)
    train_recs, cal_recs, test_recs = cfg.split.split(records)
    report.n_total = len(records)
    report.n_train, report.n_calibrate, report.n_test = (
        len(train_recs), len(cal_recs), len(test_recs))

    handle = train_surrogate(train_recs, cfg.model, cfg.train, cfg.train_seed)
    handle = fit_layer_probes(handle, train_recs, cfg.train)
    report.train_accuracy = handle.train_accuracy
    model = LocalModel(handle)

    # calibration split: temperature, then tau on validity scores
    cal_units = [parse(r.source) for r in cal_recs]
    cal_outputs = [model.infer_tokens(_tokens(u)) for u in cal_units]
    cal_correct = [out.predicted_class == r.label
                   for out, r in zip(cal_outputs, cal_recs)]
    report.temperature = fit_temperature([o.logits for o in cal_outputs],
                                         [r.label for r in cal_recs])
    validator = DsmgValidator(k=cfg.k, base_seed=cfg.base_seed, weights=cfg.weights)
    cal_scores = [validator.score_tokens(model, _tokens(u)).combined for u in cal_units]
    tau = calibrate_threshold(list(zip(cal_scores, cal_correct)), cfg.threshold)
    report.tau = tau
    validator = replace(validator, tau=tau)

    # baseline evaluation on the test split
    test_units = [parse(r.source) for r in test_recs]
    test_labels = [r.label for r in test_recs]
    test_outputs = [model.infer_tokens(_tokens(u)) for u in test_units]
    base_preds = [o.predicted_class for o in test_outputs]
    base_correct = [p == y for p, y in zip(base_preds, test_labels)]
    report.baseline = classification_metrics(test_labels, base_preds)
    report.n_baseline_mispredictions = sum(1 for ok in base_correct if not ok)

    # validity scoring and verdicts
    sample_sets = [model.submodel_samples(_tokens(u), cfg.k, cfg.base_seed)
                   for u in test_units]
    validity = [_dsmg_from_samples(validator, samples) for samples in sample_sets]
    verdicts = [classify_input(v.combined, tau) for v in validity]
    try:
        report.auc = auc([v.combined for v in validity], base_correct)
    except SingleClassError:
        report.auc = None
    report.baseline_aucs = _baseline_aucs(test_outputs, sample_sets, base_correct,
                                          report.temperature)
    try:
        report.cvr, report.mvr = cvr_mvr(verdicts, base_correct)
    except EmptyDenominatorError:
        report.cvr = report.mvr = None
    flagged = [i for i, v in enumerate(verdicts)
               if v.verdict.value == "OutOfScope"]
    report.n_flagged = len(flagged)

    # adaptation
    post_preds = list(base_preds)
    if cfg.strategy != "none" and flagged:
        strategy = Strategy(cfg.strategy)
        adapt_seconds = []
        transforms = 0
        transform_seconds = 0.0
        for idx in flagged:
            t0 = time.perf_counter()
            outcome = adapt(test_units[idx], model, validator, strategy,
                            cfg.search, cfg.search_seed + idx)
            adapt_seconds.append(time.perf_counter() - t0)
            post_preds[idx] = outcome.prediction
            if outcome.search is not None:
                transforms += outcome.search.transforms_applied
                transform_seconds += outcome.search.transform_seconds
        report.n_adapted = len(flagged)
        report.transforms_applied = transforms
        report.tps = transforms / transform_seconds if transform_seconds > 0 else 0.0
        report.mean_adapt_seconds = float(np.mean(adapt_seconds))

    post_correct = [p == y for p, y in zip(post_preds, test_labels)]
    report.post = classification_metrics(test_labels, post_preds)
    report.n_corrected = sum(1 for b, a in zip(base_correct, post_correct)
                             if not b and a)
    report.n_regressed = sum(1 for b, a in zip(base_correct, post_correct)
                             if b and not a)
    n_right = sum(base_correct)
    report.corrected_fraction = (report.n_corrected / report.n_baseline_mispredictions
                                 if report.n_baseline_mispredictions else 0.0)
    report.regressed_fraction = report.n_regressed / n_right if n_right else 0.0
    return report


def _tokens(unit):
    from ..minic import print_source
    from ..model.surrogate import tokens_of_source

    return tokens_of_source(print_source(unit))


def _dsmg_from_samples(validator: DsmgValidator, samples):
    from ..validate.dsmg import dsmg_score

    return dsmg_score(samples, validator.weights, validator.layer_weights)


def _baseline_aucs(outputs, sample_sets, correct, temperature) -> dict:
    out: dict[str, float | None] = {}
    for metric in _BASELINE_METRICS:
        if metric in SINGLE_OUTPUT_METRICS:
            scores = [metric_score(metric, o, temperature) for o in outputs]
        elif metric in SAMPLE_METRICS:
            scores = [metric_score(metric, s) for s in sample_sets]
        else:
            continue
        try:
            out[metric.value] = auc(scores, correct)
        except SingleClassError:
            out[metric.value] = None
    return out
