"""Versioned binary model container.

Layout: magic 'SRM1', u32 version, u32 L/H/C/V, f64 dropout rate, u64 train
seed, u8 probes-fitted flag, f64 train accuracy, then row-major little-endian
float64 blocks in a fixed order (embedding, per-layer W and b, head W and b,
per-layer probe W and b). Round trips are bit exact.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ..errors import ModelFormatError
from .surrogate import ModelHandle, ModelSpec

MAGIC = b"SRM1"
VERSION = 1

_HEADER = struct.Struct("<4sIIIIIdQBd")


def _blocks(handle: ModelHandle):
    yield handle.embedding
    for w, b in zip(handle.layer_w, handle.layer_b):
        yield w
        yield b
    yield handle.head_w
    yield handle.head_b
    for w, b in zip(handle.probe_w, handle.probe_b):
        yield w
        yield b


def save_model(handle: ModelHandle, path: str | Path) -> None:
    spec = handle.spec
    header = _HEADER.pack(MAGIC, VERSION, spec.num_layers, spec.hidden_dim,
                          spec.num_classes, spec.vocab_hash_dim, spec.dropout_rate,
                          handle.train_seed, int(handle.probes_fitted),
                          handle.train_accuracy)
    with open(path, "wb") as fh:
        fh.write(header)
        for block in _blocks(handle):
            fh.write(np.ascontiguousarray(block, dtype="<f8").tobytes())


def load_model(path: str | Path) -> ModelHandle:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ModelFormatError("file too short for a model header")
    magic, version, L, H, C, V, p, train_seed, fitted, accuracy = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ModelFormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise ModelFormatError(f"unsupported container version {version}")
    spec = ModelSpec(L, H, C, V, p)

    offset = _HEADER.size

    def take(shape) -> np.ndarray:
        nonlocal offset
        count = int(np.prod(shape))
        end = offset + 8 * count
        if end > len(data):
            raise ModelFormatError("truncated weight block")
        arr = np.frombuffer(data, dtype="<f8", count=count, offset=offset)
        offset = end
        return arr.reshape(shape).copy()

    embedding = take((V, H))
    layer_w, layer_b = [], []
    for _ in range(L):
        layer_w.append(take((H, H)))
        layer_b.append(take((H,)))
    head_w = take((C, H))
    head_b = take((C,))
    probe_w, probe_b = [], []
    for _ in range(L):
        probe_w.append(take((C, H)))
        probe_b.append(take((C,)))
    if offset != len(data):
        raise ModelFormatError("trailing bytes after weight blocks")
    return ModelHandle(spec=spec, train_seed=train_seed, embedding=embedding,
                       layer_w=tuple(layer_w), layer_b=tuple(layer_b),
                       head_w=head_w, head_b=head_b,
                       probe_w=tuple(probe_w), probe_b=tuple(probe_b),
                       probes_fitted=bool(fitted), train_accuracy=accuracy)
