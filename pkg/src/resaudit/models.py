"""Uniform model interface for diagnostics that refit or simulate.

Two built-in models (least squares, constant) cover the common cases;
anything else is reached through an external adapter: a subprocess speaking
newline-delimited JSON on stdin/stdout. One adapter process serves one
model; repeated ``fit`` requests reuse the process, whose state is the last
fit. stderr of the adapter is passed through for its own logging.

Wire format (one message per line, UTF-8):

    {"cmd":"hello"}                      -> {"ok":true,"name":...,"capabilities":[...]}
    {"cmd":"fit","x":[[...]],"y":[...]}  -> {"ok":true}
    {"cmd":"predict","x":[[...]]}        -> {"ok":true,"yhat":[...]}
    {"cmd":"simulate","m":m,"seed":s}    -> {"ok":true,"ysim":[[...],...]}
    any failure                          -> {"ok":false,"error":"..."}
"""
from __future__ import annotations

import json
import math
import queue
import subprocess
import threading
from dataclasses import dataclass

import numpy as np

from .errors import AdapterError, ValidationError
from .numerics import LinearModelFit, normal_sample, ols_fit, spawn_seeds

CAP_FIT = "fit"
CAP_PREDICT = "predict"
CAP_SIMULATE = "simulate"
CAP_SIMULATE_NONDET = "simulate-nondeterministic"

_KNOWN_CAPS = {CAP_FIT, CAP_PREDICT, CAP_SIMULATE, CAP_SIMULATE_NONDET}

DEFAULT_HANDSHAKE_TIMEOUT = 10.0
DEFAULT_REQUEST_TIMEOUT = 60.0


def encode_message(message: dict) -> str:
    """Serialize one protocol message to its single-line wire form."""
    line = json.dumps(message, allow_nan=False, separators=(",", ":"))
    if "\n" in line:
        raise ValidationError("protocol messages must be single-line")
    return line


def decode_message(line: str) -> dict:
    """Parse one wire line back into a message dict."""
    try:
        message = json.loads(line)
    except json.JSONDecodeError as exc:
        raise AdapterError(f"malformed protocol line: {exc}", last_message=line)
    if not isinstance(message, dict):
        raise AdapterError("protocol line is not a JSON object", last_message=line)
    return message


def _as_matrix(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2:
        raise ValidationError("X must be a 2-d matrix")
    if not np.all(np.isfinite(X)):
        raise ValidationError("X must be finite")
    return X


def _check_vector(values, n: int, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.shape != (n,):
        raise AdapterError(f"{what} has shape {arr.shape}, expected ({n},)")
    if not np.all(np.isfinite(arr)):
        raise AdapterError(f"{what} contains non-finite values")
    return arr


class BuiltinOls:
    """Least-squares model handle (fit, predict, simulate)."""

    name = "builtin-ols"
    capabilities = frozenset({CAP_FIT, CAP_PREDICT, CAP_SIMULATE})
    deterministic_simulation = True

    def fit(self, X, y) -> "OlsFitted":
        X = _as_matrix(X)
        return OlsFitted(ols_fit(X, np.asarray(y, dtype=float)), X.shape[1])


@dataclass(frozen=True)
class OlsFitted:
    fit_result: LinearModelFit
    n_features: int

    def predict(self, X) -> np.ndarray:
        X = _as_matrix(X) if np.asarray(X).size else np.zeros((0, self.n_features))
        if X.shape[1] != self.n_features:
            raise ValidationError(
                f"predict got {X.shape[1]} columns, model was trained on "
                f"{self.n_features}")
        beta = self.fit_result.coefficients
        return beta[0] + X @ beta[1:]

    def simulate(self, m: int, seed: int) -> np.ndarray:
        """Fitted values plus normal errors with the fit's residual variance.

        Each simulation row draws from its own child seed (split by
        simulation index), so parallel generation reproduces the
        sequential stream.
        """
        m = int(m)
        n = self.fit_result.n
        sd = math.sqrt(self.fit_result.sigma2)
        out = np.empty((m, n))
        for j, child in enumerate(spawn_seeds(seed, m)):
            rng = np.random.Generator(np.random.PCG64(child))
            out[j] = self.fit_result.fitted + sd * normal_sample(rng, n)
        return out


class BuiltinConstant:
    """Model predicting the training mean everywhere (fit, predict)."""

    name = "builtin-constant"
    capabilities = frozenset({CAP_FIT, CAP_PREDICT})
    deterministic_simulation = True

    def fit(self, X, y) -> "ConstantFitted":
        X = _as_matrix(X)
        y = np.asarray(y, dtype=float)
        return ConstantFitted(float(np.mean(y)), X.shape[1])


@dataclass(frozen=True)
class ConstantFitted:
    mean: float
    n_features: int

    def predict(self, X) -> np.ndarray:
        X = _as_matrix(X) if np.asarray(X).size else np.zeros((0, self.n_features))
        if X.shape[1] != self.n_features:
            raise ValidationError(
                f"predict got {X.shape[1]} columns, model was trained on "
                f"{self.n_features}")
        return np.full(X.shape[0], self.mean)


class AdapterHandle:
    """Handle over an external adapter subprocess.

    The process is started lazily and kept alive across fits; requests run
    in lockstep (one outstanding request at a time). Use as a context
    manager or call :meth:`close` when done.
    """

    def __init__(self, command: list[str],
                 handshake_timeout: float = DEFAULT_HANDSHAKE_TIMEOUT,
                 request_timeout: float = DEFAULT_REQUEST_TIMEOUT):
        if not command:
            raise ValidationError("adapter command must not be empty")
        self.command = list(command)
        self.handshake_timeout = handshake_timeout
        self.request_timeout = request_timeout
        self.name = command[0]
        self.deterministic_simulation = True
        self._capabilities: frozenset[str] = frozenset()
        self._proc: subprocess.Popen | None = None
        self._lines: queue.Queue = queue.Queue()
        self._lock = threading.Lock()
        self._fit_shape: tuple[int, int] | None = None

    @property
    def capabilities(self) -> frozenset[str]:
        """Declared capabilities; connects and handshakes on first use."""
        if self._proc is None:
            self._start()
        return self._capabilities

    # -- process management -------------------------------------------------

    def _start(self):
        try:
            self._proc = subprocess.Popen(
                self.command, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                stderr=None, text=True, bufsize=1)
        except OSError as exc:
            raise AdapterError(f"cannot launch adapter {self.command!r}: {exc}")
        self._lines = queue.Queue()
        thread = threading.Thread(target=self._pump, args=(self._proc.stdout,),
                                  daemon=True)
        thread.start()
        self._handshake()

    def _pump(self, stream):
        for line in stream:
            self._lines.put(line.rstrip("\n"))
        self._lines.put(None)

    def close(self):
        proc, self._proc = self._proc, None
        if proc is None:
            return
        try:
            if proc.stdin:
                proc.stdin.close()
            proc.wait(timeout=5)
        except (OSError, subprocess.TimeoutExpired):
            proc.kill()
            proc.wait()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def __del__(self):
        try:
            self.close()
        except Exception:
            pass

    # -- protocol -----------------------------------------------------------

    def _request(self, message: dict, timeout: float) -> dict:
        if self._proc is None:
            self._start()
        line = encode_message(message)
        with self._lock:
            try:
                self._proc.stdin.write(line + "\n")
                self._proc.stdin.flush()
            except (OSError, ValueError) as exc:
                raise AdapterError(f"adapter stdin closed: {exc}", last_message=line)
            try:
                reply = self._lines.get(timeout=timeout)
            except queue.Empty:
                self.close()
                raise AdapterError(
                    f"adapter timed out after {timeout}s on {message.get('cmd')!r}",
                    last_message=line)
        if reply is None:
            self.close()
            raise AdapterError("adapter exited before replying", last_message=line)
        parsed = decode_message(reply)
        if "ok" not in parsed:
            raise AdapterError("adapter reply missing 'ok' field", last_message=reply)
        if not parsed["ok"]:
            raise AdapterError(
                f"adapter error: {parsed.get('error', 'unspecified')}",
                last_message=reply)
        return parsed

    def _handshake(self):
        reply = self._request({"cmd": "hello"}, self.handshake_timeout)
        name = reply.get("name")
        caps = reply.get("capabilities")
        if not isinstance(name, str) or not isinstance(caps, list):
            raise AdapterError("hello reply must carry 'name' and 'capabilities'",
                               last_message=json.dumps(reply))
        self.name = name
        declared = {c for c in caps if c in _KNOWN_CAPS}
        if CAP_SIMULATE_NONDET in declared:
            declared.add(CAP_SIMULATE)
            self.deterministic_simulation = False
        self._capabilities = frozenset(declared)

    # -- model interface ----------------------------------------------------

    def fit(self, X, y) -> "AdapterFitted":
        if self._proc is None:
            self._start()
        if CAP_FIT not in self.capabilities:
            raise AdapterError(f"adapter {self.name!r} lacks 'fit' capability")
        X = _as_matrix(X)
        y = np.asarray(y, dtype=float)
        if y.shape != (X.shape[0],):
            raise ValidationError("X rows and y length must agree")
        self._request({"cmd": "fit", "x": X.tolist(), "y": y.tolist()},
                      self.request_timeout)
        self._fit_shape = X.shape
        return AdapterFitted(self, X.shape[1], X.shape[0])


def adapter_handshake(command: list[str],
                      timeout: float = DEFAULT_HANDSHAKE_TIMEOUT) -> AdapterHandle:
    """Launch an adapter, perform the hello exchange, return the live handle."""
    handle = AdapterHandle(command, handshake_timeout=timeout)
    handle._start()
    return handle


@dataclass
class AdapterFitted:
    """Token for the adapter's current fit; invalidated by the next fit."""

    handle: AdapterHandle
    n_features: int
    n_rows: int

    def _check_current(self):
        if self.handle._fit_shape != (self.n_rows, self.n_features):
            raise AdapterError("stale fit token: the adapter was refit since")

    def predict(self, X) -> np.ndarray:
        self._check_current()
        X = np.asarray(X, dtype=float)
        if X.size == 0:
            return np.zeros(0)
        X = _as_matrix(X)
        if X.shape[1] != self.n_features:
            raise ValidationError(
                f"predict got {X.shape[1]} columns, adapter was fit on "
                f"{self.n_features}")
        reply = self.handle._request({"cmd": "predict", "x": X.tolist()},
                                     self.handle.request_timeout)
        return _check_vector(reply.get("yhat"), X.shape[0], "adapter 'yhat'")

    def simulate(self, m: int, seed: int) -> np.ndarray:
        self._check_current()
        if CAP_SIMULATE not in self.handle.capabilities:
            raise AdapterError(
                f"adapter {self.handle.name!r} lacks 'simulate' capability")
        m = int(m)
        reply = self.handle._request(
            {"cmd": "simulate", "m": m, "seed": int(seed)},
            self.handle.request_timeout)
        ysim = reply.get("ysim")
        if not isinstance(ysim, list) or len(ysim) != m:
            raise AdapterError(f"adapter 'ysim' must be a list of {m} vectors")
        rows = [_check_vector(row, self.n_rows, f"adapter 'ysim[{j}]'")
                for j, row in enumerate(ysim)]
        return np.asarray(rows).reshape(m, self.n_rows)


def make_handle(spec: str, adapter_command: list[str] | None = None,
                handshake_timeout: float = DEFAULT_HANDSHAKE_TIMEOUT,
                request_timeout: float = DEFAULT_REQUEST_TIMEOUT):
    """Build a model handle from a CLI-style spec string."""
    if spec == "builtin-ols":
        return BuiltinOls()
    if spec == "builtin-constant":
        return BuiltinConstant()
    if spec == "adapter":
        if not adapter_command:
            raise ValidationError("model 'adapter' requires an adapter command")
        return AdapterHandle(adapter_command, handshake_timeout=handshake_timeout,
                             request_timeout=request_timeout)
    raise ValidationError(
        f"unknown model {spec!r}; use builtin-ols, builtin-constant or adapter")
