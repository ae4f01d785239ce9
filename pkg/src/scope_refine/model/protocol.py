"""Model wire protocol: newline-delimited JSON over a byte stream.

Request:  {"id": <int>, "op": "infer" | "infer_submodels",
           "tokens": [<str>, ...], "k": <int>, "base_seed": <int>}
Response: {"id": <int>, "logits": [...], "probs": [...],
           "layers": [[...], ...], "probe_logits": [[...], ...],
           "samples": [{...}, ...]}          (samples only for submodels)
Error:    {"id": <int>, "error": <str>}

Unknown request fields are ignored and the id is echoed verbatim. One bad
request never closes the stream. Floats cross the boundary at 1e-6 fidelity.
"""

from __future__ import annotations

import json
import shlex
import socket
import socketserver
import subprocess
import threading
from dataclasses import dataclass

import numpy as np

from ..errors import ConnectionFailedError, ProtocolError
from .surrogate import (
    ModelHandle,
    ModelOutput,
    SubmodelSample,
    infer,
    infer_submodels,
    tokenize_tokens,
)


def _output_fields(out: ModelOutput) -> dict:
    return {
        "logits": out.logits.tolist(),
        "probs": out.probs.tolist(),
        "layers": out.layer_snapshots.tolist(),
        "probe_logits": out.probe_logits.tolist(),
    }


def respond(handle: ModelHandle, request: dict) -> dict:
    """Handle one decoded request against a local handle."""
    rid = request.get("id")
    try:
        op = request.get("op")
        tokens = request.get("tokens")
        if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
            return {"id": rid, "error": "tokens must be a list of strings"}
        if not tokens:
            return {"id": rid, "error": "empty token list"}
        tok = tokenize_tokens(tokens, handle.spec)
        if op == "infer":
            return {"id": rid, **_output_fields(infer(handle, tok))}
        if op == "infer_submodels":
            k = request.get("k", 0)
            if not isinstance(k, int) or k < 2:
                return {"id": rid, "error": "k must be >= 2"}
            base_seed = request.get("base_seed", 0)
            if not isinstance(base_seed, int):
                return {"id": rid, "error": "base_seed must be an integer"}
            samples = infer_submodels(handle, tok, k, base_seed)
            return {
                "id": rid,
                **_output_fields(infer(handle, tok)),
                "samples": [{"dropout_seed": s.dropout_seed, **_output_fields(s.output)}
                            for s in samples],
            }
        return {"id": rid, "error": f"unknown op {op!r}"}
    except Exception as exc:  # a single bad request must not kill the stream
        return {"id": rid, "error": f"{type(exc).__name__}: {exc}"}


def handle_stream(handle: ModelHandle, rfile, wfile) -> None:
    """Serve NDJSON requests from rfile to wfile until EOF."""
    for line in rfile:
        line = line.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
            if not isinstance(request, dict):
                response = {"id": None, "error": "request must be a JSON object"}
            else:
                response = respond(handle, request)
        except json.JSONDecodeError as exc:
            response = {"id": None, "error": f"malformed JSON: {exc.msg}"}
        wfile.write((json.dumps(response) + "\n").encode("utf-8"))
        wfile.flush()


class _Server(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True


def serve_handle(handle: ModelHandle, host: str = "127.0.0.1",
                 port: int = 0) -> tuple[_Server, int]:
    """Serve a handle over TCP in a daemon thread; returns (server, port).
    Used by protocol self-tests and ad hoc experiments."""

    class Handler(socketserver.StreamRequestHandler):
        def handle(self):
            handle_stream(handle, self.rfile, self.wfile)

    server = _Server((host, port), Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server, server.server_address[1]


# --- client ------------------------------------------------------------------


def _parse_arrays(payload: dict) -> ModelOutput:
    try:
        logits = np.asarray(payload["logits"], dtype=np.float64)
        probs = np.asarray(payload["probs"], dtype=np.float64)
        layers = np.asarray(payload["layers"], dtype=np.float64)
        probe_logits = np.asarray(payload["probe_logits"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise ProtocolError(f"response missing or malformed field: {exc}")
    if layers.ndim != 2 or probe_logits.ndim != 2:
        raise ProtocolError("layers/probe_logits must be 2-d arrays")
    return ModelOutput(logits, probs, layers, probe_logits)


class RemoteModel:
    """Client for an external model server.

    Endpoints: "host:port" (TCP) or "stdio:<command line>" (subprocess with
    the protocol on stdin/stdout).
    """

    def __init__(self, endpoint: str):
        self.endpoint = endpoint
        self._lock = threading.Lock()
        self._next_id = 0
        self._proc: subprocess.Popen | None = None
        try:
            if endpoint.startswith("stdio:"):
                self._proc = subprocess.Popen(
                    shlex.split(endpoint[len("stdio:"):]),
                    stdin=subprocess.PIPE, stdout=subprocess.PIPE)
                self._rfile = self._proc.stdout
                self._wfile = self._proc.stdin
            else:
                hostport = endpoint.removeprefix("tcp://")
                host, _, port = hostport.rpartition(":")
                sock = socket.create_connection((host or "127.0.0.1", int(port)), timeout=30)
                self._rfile = sock.makefile("rb")
                self._wfile = sock.makefile("wb")
                self._sock = sock
        except (OSError, ValueError) as exc:
            raise ConnectionFailedError(f"cannot reach {endpoint!r}: {exc}")

    def close(self):
        try:
            self._wfile.close()
            self._rfile.close()
            if self._proc is not None:
                self._proc.terminate()
            elif hasattr(self, "_sock"):
                self._sock.close()
        except OSError:
            pass

    def request(self, payload: dict) -> dict:
        with self._lock:
            self._next_id += 1
            rid = self._next_id
            payload = {"id": rid, **payload}
            self._wfile.write((json.dumps(payload) + "\n").encode("utf-8"))
            self._wfile.flush()
            line = self._rfile.readline()
            if not line:
                raise ConnectionFailedError(f"{self.endpoint!r} closed the stream")
            try:
                response = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ProtocolError(f"unparseable response: {exc.msg}")
            if response.get("id") != rid:
                raise ProtocolError(f"response id {response.get('id')!r} != request id {rid}")
            return response

    def infer_tokens(self, tokens: list[str] | tuple[str, ...]) -> ModelOutput:
        response = self.request({"op": "infer", "tokens": list(tokens)})
        if "error" in response:
            raise ProtocolError(response["error"])
        return _parse_arrays(response)

    def submodel_samples(self, tokens, k: int, base_seed: int) -> list[SubmodelSample]:
        response = self.request({"op": "infer_submodels", "tokens": list(tokens),
                                 "k": k, "base_seed": base_seed})
        if "error" in response:
            raise ProtocolError(response["error"])
        samples = response.get("samples")
        if not isinstance(samples, list):
            raise ProtocolError("infer_submodels response lacks a samples list")
        return [SubmodelSample(int(s.get("dropout_seed", base_seed + i)), _parse_arrays(s))
                for i, s in enumerate(samples)]


class LocalModel:
    """Adapter giving a ModelHandle the same token-level surface as
    RemoteModel, so validators and search are transport-agnostic."""

    def __init__(self, handle: ModelHandle):
        self.handle = handle

    def infer_tokens(self, tokens) -> ModelOutput:
        return infer(self.handle, tokenize_tokens(tokens, self.handle.spec))

    def submodel_samples(self, tokens, k: int, base_seed: int) -> list[SubmodelSample]:
        return infer_submodels(self.handle, tokenize_tokens(tokens, self.handle.spec),
                               k, base_seed)

    def close(self):
        pass


# --- conformance checking -----------------------------------------------------

GOLDEN_TOKENS = ["int", "main_entry", "(", "int", "x", ")", "{", "return",
                 "x", "+", "1", ";", "}"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class ConformanceReport:
    endpoint: str
    checks: tuple[CheckResult, ...]

    @property
    def passed_all(self) -> bool:
        return all(c.passed for c in self.checks)


def _close_enough(a, b, tol=1e-6) -> bool:
    return bool(np.max(np.abs(np.asarray(a) - np.asarray(b))) <= tol) if np.size(a) else True


def check_protocol(endpoint: str) -> ConformanceReport:
    """Run the golden conformance checks against a server. Raises
    ConnectionFailedError if the endpoint is unreachable; every schema
    problem becomes a failed named check."""
    checks: list[CheckResult] = []

    def record(name: str, passed: bool, detail: str = ""):
        checks.append(CheckResult(name, passed, detail))

    client = RemoteModel(endpoint)
    try:
        # id echo, checked at the raw layer with a distinctive id
        raw = client.request({"op": "infer", "tokens": GOLDEN_TOKENS})
        record("id-echo", True)  # request() already verifies the echo
        ok = all(key in raw for key in ("logits", "probs", "layers", "probe_logits"))
        record("infer-fields", ok, "" if ok else f"missing keys in {sorted(raw)}")
        if not ok:
            return ConformanceReport(endpoint, tuple(checks))

        out = _parse_arrays(raw)
        L, H = out.layer_snapshots.shape
        C = len(out.logits)
        shape_ok = (L >= 2 and len(out.probs) == C and out.probe_logits.shape == (L, C))
        record("shape-consistency", shape_ok,
               f"L={L} H={H} C={C} probe_logits={out.probe_logits.shape}")
        norm_ok = abs(float(np.sum(out.probs)) - 1.0) <= 1e-6
        record("normalization", norm_ok, f"sum={float(np.sum(out.probs)):.9f}")
        record("argmax-consistency",
               int(np.argmax(out.probs)) == int(np.argmax(out.logits)))

        out2 = client.infer_tokens(GOLDEN_TOKENS)
        det = (_close_enough(out.logits, out2.logits)
               and _close_enough(out.layer_snapshots, out2.layer_snapshots)
               and _close_enough(out.probe_logits, out2.probe_logits))
        record("infer-determinism", det)

        try:
            samples = client.submodel_samples(GOLDEN_TOKENS, k=3, base_seed=7)
            seeds_ok = [s.dropout_seed for s in samples] == [7, 8, 9]
            shapes_ok = all(s.output.layer_snapshots.shape == (L, H)
                            and len(s.output.logits) == C for s in samples)
            record("submodels-schema", len(samples) == 3 and seeds_ok and shapes_ok,
                   f"n={len(samples)} seeds={[s.dropout_seed for s in samples]}")
            samples2 = client.submodel_samples(GOLDEN_TOKENS, k=3, base_seed=7)
            rep_ok = all(_close_enough(a.output.probs, b.output.probs)
                         for a, b in zip(samples, samples2))
            record("submodels-determinism", rep_ok)
        except ProtocolError as exc:
            record("submodels-schema", False, str(exc))

        bad = client.request({"op": "infer_submodels", "tokens": GOLDEN_TOKENS,
                              "k": 1, "base_seed": 0})
        record("k-too-small-error", "error" in bad, json.dumps(bad)[:120])
        bogus = client.request({"op": "definitely_not_an_op", "tokens": GOLDEN_TOKENS})
        record("unknown-op-error", "error" in bogus)
        # the stream must survive the bad requests above
        again = client.infer_tokens(GOLDEN_TOKENS)
        record("stream-survives-errors", _close_enough(out.logits, again.logits))
    except ProtocolError as exc:
        record("protocol", False, str(exc))
    finally:
        client.close()
    return ConformanceReport(endpoint, tuple(checks))
