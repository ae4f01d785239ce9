"""Built-in surrogate encoder.

Architecture: hashed token embedding -> L position-wise feed-forward ReLU
layers -> mean pool per layer (the layer snapshots) -> linear head on the
last snapshot. Per-layer linear probes are fitted post hoc with the backbone
frozen. Dropout is inference-only: a seeded per-layer unit mask (shared
across token positions, inverted scaling) turns the trained network into a
reproducible sub-model sample.

Everything is float64 and deterministic given seeds; training is plain
seeded mini-batch gradient descent on cross-entropy.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import (
    EmptyCorpusError,
    EmptyTokenListError,
    KTooSmallError,
    LabelOutOfRangeError,
    NonpositiveTemperatureError,
)
from ..minic import lex, print_source
from ..minic.nodes import SourceUnit


@dataclass(frozen=True)
class ModelSpec:
    num_layers: int = 4
    hidden_dim: int = 64
    num_classes: int = 2
    vocab_hash_dim: int = 2048
    dropout_rate: float = 0.1

    def __post_init__(self):
        if self.num_layers < 2:
            raise ValueError("num_layers must be >= 2 (layerwise metrics need depth)")
        if self.num_classes < 2:
            raise ValueError("num_classes must be >= 2")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError("dropout_rate must be in [0, 1)")


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 12
    batch_size: int = 32
    learning_rate: float = 0.01
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    probe_iters: int = 200
    probe_learning_rate: float = 0.05


@dataclass(frozen=True)
class TokenizedInput:
    tokens: tuple[str, ...]  # lexemes of the canonical print, in order
    indices: np.ndarray  # hashed into [0, vocab_hash_dim)


@dataclass(frozen=True)
class ModelOutput:
    logits: np.ndarray  # (C,)
    probs: np.ndarray  # (C,)
    layer_snapshots: np.ndarray  # (L, H)
    probe_logits: np.ndarray  # (L, C)

    @property
    def predicted_class(self) -> int:
        return int(np.argmax(self.logits))


@dataclass(frozen=True)
class SubmodelSample:
    dropout_seed: int
    output: ModelOutput


@dataclass(frozen=True)
class ModelHandle:
    spec: ModelSpec
    train_seed: int
    embedding: np.ndarray  # (V, H)
    layer_w: tuple[np.ndarray, ...]  # L x (H, H)
    layer_b: tuple[np.ndarray, ...]  # L x (H,)
    head_w: np.ndarray  # (C, H)
    head_b: np.ndarray  # (C,)
    probe_w: tuple[np.ndarray, ...]  # L x (C, H)
    probe_b: tuple[np.ndarray, ...]  # L x (C,)
    probes_fitted: bool = False
    train_accuracy: float = 0.0


def hash_token(token: str, vocab_dim: int) -> int:
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little") % vocab_dim


def tokens_of_source(text: str) -> tuple[str, ...]:
    return tuple(t.text for t in lex(text) if t.kind != "eof")


def tokenize_tokens(tokens: list[str] | tuple[str, ...], spec: ModelSpec) -> TokenizedInput:
    idx = np.array([hash_token(t, spec.vocab_hash_dim) for t in tokens], dtype=np.int64)
    return TokenizedInput(tuple(tokens), idx)


def tokenize_unit(unit: SourceUnit, spec: ModelSpec) -> TokenizedInput:
    """Tokenize the canonical print of a unit; models never see raw text."""
    return tokenize_tokens(tokens_of_source(print_source(unit)), spec)


def softmax(logits: np.ndarray, axis: int = -1) -> np.ndarray:
    shifted = logits - np.max(logits, axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / np.sum(e, axis=axis, keepdims=True)


def softmax_with_temperature(logits: np.ndarray, temperature: float) -> np.ndarray:
    """softmax(logits / T), computed with max subtraction."""
    if not temperature > 0:
        raise NonpositiveTemperatureError(f"temperature must be > 0, got {temperature}")
    return softmax(np.asarray(logits, dtype=np.float64) / temperature)


# --- forward passes ---------------------------------------------------------


def _forward_single(handle: ModelHandle, indices: np.ndarray,
                    masks: np.ndarray | None = None) -> ModelOutput:
    """One input. `masks` is (L, H) of {0, 1/(1-p)} factors or None."""
    acts = handle.embedding[indices]  # (T, H)
    snapshots = np.empty((handle.spec.num_layers, handle.spec.hidden_dim))
    for layer in range(handle.spec.num_layers):
        acts = np.maximum(acts @ handle.layer_w[layer].T + handle.layer_b[layer], 0.0)
        if masks is not None:
            acts = acts * masks[layer]
        snapshots[layer] = acts.mean(axis=0)
    logits = handle.head_w @ snapshots[-1] + handle.head_b
    probe_logits = np.stack([handle.probe_w[l] @ snapshots[l] + handle.probe_b[l]
                             for l in range(handle.spec.num_layers)])
    return ModelOutput(logits, softmax(logits), snapshots, probe_logits)


def infer(handle: ModelHandle, tok: TokenizedInput) -> ModelOutput:
    """Deterministic forward with dropout disabled."""
    if len(tok.indices) == 0:
        raise EmptyTokenListError("cannot infer on an empty token list")
    return _forward_single(handle, tok.indices)


def infer_submodels(handle: ModelHandle, tok: TokenizedInput, k: int,
                    base_seed: int) -> list[SubmodelSample]:
    """K dropout sub-model samples; sample i uses dropout_seed = base_seed+i.
    Masks are per-layer unit masks (keep prob 1-p, inverted scaling) shared
    across token positions."""
    if k < 2:
        raise KTooSmallError(f"need at least 2 sub-model samples, got {k}")
    if len(tok.indices) == 0:
        raise EmptyTokenListError("cannot infer on an empty token list")
    spec = handle.spec
    p = spec.dropout_rate
    if p == 0.0:
        out = _forward_single(handle, tok.indices)
        return [SubmodelSample(base_seed + i, out) for i in range(k)]

    L, H = spec.num_layers, spec.hidden_dim
    # batched across samples: (K, T, H) activations share the embedding
    emb = handle.embedding[tok.indices]
    acts = np.broadcast_to(emb, (k,) + emb.shape).copy()
    masks = np.empty((k, L, H))
    for i in range(k):
        rng = np.random.Generator(np.random.PCG64(base_seed + i))
        masks[i] = (rng.random((L, H)) >= p) / (1.0 - p)
    snapshots = np.empty((k, L, H))
    for layer in range(L):
        acts = np.maximum(acts @ handle.layer_w[layer].T + handle.layer_b[layer], 0.0)
        acts = acts * masks[:, layer][:, None, :]
        snapshots[:, layer] = acts.mean(axis=1)
    logits = snapshots[:, -1] @ handle.head_w.T + handle.head_b  # (K, C)
    probs = softmax(logits, axis=1)
    probe_logits = np.stack(
        [snapshots[:, l] @ handle.probe_w[l].T + handle.probe_b[l] for l in range(L)],
        axis=1)  # (K, L, C)
    return [SubmodelSample(base_seed + i,
                           ModelOutput(logits[i], probs[i], snapshots[i], probe_logits[i]))
            for i in range(k)]


def apply_dropout_mask(activation: np.ndarray, p: float, seed: int) -> np.ndarray:
    """Single mask application (exposed for the unbiasedness check)."""
    rng = np.random.Generator(np.random.PCG64(seed))
    mask = (rng.random(activation.shape) >= p) / (1.0 - p)
    return activation * mask


# --- training ----------------------------------------------------------------


def _prepare(token_arrays: list[np.ndarray]):
    """Concatenate ragged token index arrays; return flat indices, segment
    offsets and per-example lengths."""
    lengths = np.array([len(a) for a in token_arrays], dtype=np.int64)
    flat = np.concatenate(token_arrays) if token_arrays else np.empty(0, dtype=np.int64)
    offsets = np.zeros(len(token_arrays), dtype=np.int64)
    np.cumsum(lengths[:-1], out=offsets[1:])
    return flat, offsets, lengths


def _forward_batch(handle: ModelHandle, flat, offsets, lengths):
    """Shared-token batch forward. Returns per-layer token activations and
    per-example pooled snapshots."""
    L = handle.spec.num_layers
    token_acts = [handle.embedding[flat]]
    pooled = []
    for layer in range(L):
        z = token_acts[-1] @ handle.layer_w[layer].T + handle.layer_b[layer]
        a = np.maximum(z, 0.0)
        token_acts.append(a)
        seg_sum = np.add.reduceat(a, offsets, axis=0)
        pooled.append(seg_sum / lengths[:, None])
    logits = pooled[-1] @ handle.head_w.T + handle.head_b
    return token_acts, pooled, logits


def batch_loss(handle: ModelHandle, token_arrays: list[np.ndarray],
               labels: np.ndarray) -> float:
    """Mean cross-entropy of the head on a batch (no dropout)."""
    flat, offsets, lengths = _prepare(token_arrays)
    _, _, logits = _forward_batch(handle, flat, offsets, lengths)
    logp = logits - np.max(logits, axis=1, keepdims=True)
    logp = logp - np.log(np.sum(np.exp(logp), axis=1, keepdims=True))
    return float(-logp[np.arange(len(labels)), labels].mean())


def batch_gradients(handle: ModelHandle, token_arrays: list[np.ndarray],
                    labels: np.ndarray) -> dict[str, np.ndarray | list[np.ndarray]]:
    """Analytic gradients of batch_loss w.r.t. every backbone parameter."""
    flat, offsets, lengths = _prepare(token_arrays)
    token_acts, pooled, logits = _forward_batch(handle, flat, offsets, lengths)
    B = len(labels)
    L = handle.spec.num_layers

    probs = softmax(logits, axis=1)
    dlogits = probs.copy()
    dlogits[np.arange(B), labels] -= 1.0
    dlogits /= B

    grads: dict = {
        "head_w": dlogits.T @ pooled[-1],
        "head_b": dlogits.sum(axis=0),
        "layer_w": [None] * L,
        "layer_b": [None] * L,
    }
    d_pooled_last = dlogits @ handle.head_w  # (B, H)
    # distribute pooled gradient back to token rows of each example
    d_act = np.repeat(d_pooled_last / lengths[:, None], lengths, axis=0)
    for layer in range(L - 1, -1, -1):
        a = token_acts[layer + 1]
        dz = d_act * (a > 0.0)
        grads["layer_w"][layer] = dz.T @ token_acts[layer]
        grads["layer_b"][layer] = dz.sum(axis=0)
        d_act = dz @ handle.layer_w[layer]
    demb = np.zeros_like(handle.embedding)
    np.add.at(demb, flat, d_act)
    grads["embedding"] = demb
    return grads


def _records_to_arrays(corpus, spec: ModelSpec):
    """Corpus records -> (token index arrays, labels). Accepts any records
    with .source and .label; sources are canonicalized before tokenizing."""
    from ..minic import parse  # local import to avoid cycles at module load

    token_arrays = []
    labels = []
    for rec in corpus:
        unit = parse(rec.source)
        token_arrays.append(tokenize_unit(unit, spec).indices)
        labels.append(rec.label)
    return token_arrays, np.array(labels, dtype=np.int64)


def train_surrogate(corpus, spec: ModelSpec = ModelSpec(),
                    cfg: TrainConfig = TrainConfig(), seed: int = 0) -> ModelHandle:
    """Train the surrogate on labeled records (.source, .label). Deterministic
    in (corpus order, spec, cfg, seed). Probes start at zero; fit them with
    fit_layer_probes."""
    corpus = list(corpus)
    if not corpus:
        raise EmptyCorpusError("training corpus is empty")
    for rec in corpus:
        if not 0 <= rec.label < spec.num_classes:
            raise LabelOutOfRangeError(
                f"label {rec.label} outside [0, {spec.num_classes}) for record {rec.id!r}")

    token_arrays, labels = _records_to_arrays(corpus, spec)
    rng = np.random.Generator(np.random.PCG64(seed))
    H, C, V, L = spec.hidden_dim, spec.num_classes, spec.vocab_hash_dim, spec.num_layers
    handle = ModelHandle(
        spec=spec,
        train_seed=seed,
        embedding=rng.normal(0.0, 1.0, (V, H)),
        layer_w=tuple(rng.normal(0.0, np.sqrt(2.0 / H), (H, H)) for _ in range(L)),
        layer_b=tuple(np.zeros(H) for _ in range(L)),
        head_w=np.zeros((C, H)),
        head_b=np.zeros(C),
        probe_w=tuple(np.zeros((C, H)) for _ in range(L)),
        probe_b=tuple(np.zeros(C) for _ in range(L)),
    )

    n = len(corpus)
    for _ in range(cfg.epochs):
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            batch = order[start:start + cfg.batch_size]
            g = batch_gradients(handle, [token_arrays[i] for i in batch], labels[batch])
            lr = cfg.learning_rate
            handle = replace(
                handle,
                embedding=handle.embedding - lr * g["embedding"],
                layer_w=tuple(w - lr * gw for w, gw in zip(handle.layer_w, g["layer_w"])),
                layer_b=tuple(b - lr * gb for b, gb in zip(handle.layer_b, g["layer_b"])),
                head_w=handle.head_w - lr * g["head_w"],
                head_b=handle.head_b - lr * g["head_b"],
            )

    flat, offsets, lengths = _prepare(token_arrays)
    _, _, logits = _forward_batch(handle, flat, offsets, lengths)
    accuracy = float((np.argmax(logits, axis=1) == labels).mean())
    return replace(handle, train_accuracy=accuracy)


def fit_layer_probes(handle: ModelHandle, corpus,
                     cfg: TrainConfig = TrainConfig()) -> ModelHandle:
    """Fit one linear softmax probe per layer on the frozen backbone's pooled
    snapshots. Deterministic (zero init, full-batch gradient descent)."""
    corpus = list(corpus)
    if not corpus:
        raise EmptyCorpusError("probe corpus is empty")
    token_arrays, labels = _records_to_arrays(corpus, handle.spec)
    flat, offsets, lengths = _prepare(token_arrays)
    _, pooled, _ = _forward_batch(handle, flat, offsets, lengths)

    B = len(labels)
    C = handle.spec.num_classes
    onehot = np.zeros((B, C))
    onehot[np.arange(B), labels] = 1.0

    probe_w, probe_b = [], []
    for snap in pooled:  # (B, H) per layer
        w = np.zeros((C, snap.shape[1]))
        b = np.zeros(C)
        for _ in range(cfg.probe_iters):
            probs = softmax(snap @ w.T + b, axis=1)
            diff = (probs - onehot) / B
            w -= cfg.probe_learning_rate * (diff.T @ snap)
            b -= cfg.probe_learning_rate * diff.sum(axis=0)
        probe_w.append(w)
        probe_b.append(b)
    return replace(handle, probe_w=tuple(probe_w), probe_b=tuple(probe_b),
                   probes_fitted=True)
