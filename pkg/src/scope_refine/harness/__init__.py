"""Corpus ingestion and synthesis, evaluation metrics, and the end-to-end
experiment pipeline."""

from .corpus import CorpusRecord, load_corpus, save_corpus, synth_corpus
from .generator import GeneratorConfig, ProgramSampler, div_risk_label, sample_program
from .metrics import auc, classification_metrics, confusion_counts, cvr_mvr
from .pipeline import (
    REPORT_VERSION,
    ExperimentConfig,
    MetricsReport,
    SplitSpec,
    report_json,
    report_read,
    report_write,
    run_pipeline,
)

__all__ = [
    "CorpusRecord",
    "ExperimentConfig",
    "GeneratorConfig",
    "MetricsReport",
    "ProgramSampler",
    "REPORT_VERSION",
    "SplitSpec",
    "auc",
    "classification_metrics",
    "confusion_counts",
    "cvr_mvr",
    "div_risk_label",
    "load_corpus",
    "report_json",
    "report_read",
    "report_write",
    "run_pipeline",
    "sample_program",
    "save_corpus",
    "synth_corpus",
]
