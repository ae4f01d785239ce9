"""The classifier under refinement: built-in surrogate encoder with layer
snapshots, seeded dropout sub-models and per-layer probes, plus the wire
protocol client for plugging in an external model."""

from .protocol import (
    ConformanceReport,
    CheckResult,
    LocalModel,
    RemoteModel,
    check_protocol,
    handle_stream,
    respond,
    serve_handle,
)
from .serialize import load_model, save_model
from .surrogate import (
    ModelHandle,
    ModelOutput,
    ModelSpec,
    SubmodelSample,
    TokenizedInput,
    TrainConfig,
    apply_dropout_mask,
    batch_gradients,
    batch_loss,
    fit_layer_probes,
    hash_token,
    infer,
    infer_submodels,
    softmax,
    softmax_with_temperature,
    tokenize_tokens,
    tokenize_unit,
    tokens_of_source,
    train_surrogate,
)

__all__ = [
    "CheckResult",
    "ConformanceReport",
    "LocalModel",
    "ModelHandle",
    "ModelOutput",
    "ModelSpec",
    "RemoteModel",
    "SubmodelSample",
    "TokenizedInput",
    "TrainConfig",
    "apply_dropout_mask",
    "batch_gradients",
    "batch_loss",
    "check_protocol",
    "fit_layer_probes",
    "handle_stream",
    "hash_token",
    "infer",
    "infer_submodels",
    "load_model",
    "respond",
    "save_model",
    "serve_handle",
    "softmax",
    "softmax_with_temperature",
    "tokenize_tokens",
    "tokenize_unit",
    "tokens_of_source",
    "train_surrogate",
]
