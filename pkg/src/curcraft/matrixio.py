"""CSV matrices, seeded test-matrix generators and fixed-precision JSON."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import BadParams, NonFiniteEntry, ParseError, RaggedRows, UnknownKind

GEN_KINDS = ("gaussian", "lowrank-noise", "perturbed")


def parse_matrix(text: str) -> np.ndarray:
    rows = []
    width = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        row = []
        for col, cell in enumerate(line.split(","), start=1):
            cell = cell.strip()
            try:
                value = float(cell)
            except ValueError:
                raise ParseError(f"line {lineno}, column {col}: not a number: {cell!r}", lineno, col) from None
            if not math.isfinite(value):
                raise NonFiniteEntry(f"line {lineno}, column {col}: non-finite entry {cell!r}", lineno, col)
            row.append(value)
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise RaggedRows(f"line {lineno}: {len(row)} columns, expected {width}", lineno, len(row))
        rows.append(row)
    if not rows:
        raise ParseError("no matrix rows found")
    return np.array(rows, dtype=float)


def load_matrix(path) -> np.ndarray:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return parse_matrix(text)


def format_matrix(M: np.ndarray) -> str:
    return "".join(",".join(format(float(v), ".17g") for v in row) + "\n" for row in M)


def write_matrix(M: np.ndarray, path=None) -> str:
    text = format_matrix(M)
    if path is not None:
        Path(path).write_text(text)
    return text


# ---------------------------------------------------------------------------
# generators


def gaussian_stream(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard normals by Box-Muller from the generator's uniforms."""
    count = int(np.prod(shape))
    half = (count + 1) // 2
    u1 = rng.random(half)
    u2 = rng.random(half)
    radius = np.sqrt(-2.0 * np.log1p(-u1))
    z = np.concatenate([radius * np.cos(2 * np.pi * u2), radius * np.sin(2 * np.pi * u2)])
    return z[:count].reshape(shape)


def kernel_matrix(n: int, d: int) -> np.ndarray:
    """E(i, j) = exp(-(i-j)^2 / (2 max(n, d)^2)); totally positive."""
    i = np.arange(n)[:, None]
    j = np.arange(d)[None, :]
    return np.exp(-((i - j) ** 2) / (2.0 * max(n, d) ** 2))


def perturb(A: np.ndarray, t: float) -> np.ndarray:
    if t == 0:
        return A.copy()
    return A + t * kernel_matrix(*A.shape)


def parse_params(spec: str | None) -> dict:
    """'n=3,d=4' -> {'n': '3', 'd': '4'}."""
    out = {}
    if not spec:
        return out
    for item in spec.split(","):
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise BadParams(f"malformed parameter {item!r}; expected key=value")
        out[key.strip()] = value.strip()
    return out


def _get(params: dict, key: str, cast, check=None):
    if key not in params:
        raise BadParams(f"missing parameter {key!r}")
    try:
        value = cast(params[key])
    except (TypeError, ValueError):
        raise BadParams(f"bad value for {key!r}: {params[key]!r}") from None
    if check is not None and not check(value):
        raise BadParams(f"out-of-range value for {key!r}: {value!r}")
    return value


def gen_matrix(kind: str, params: dict, seed: int = 0) -> np.ndarray:
    if kind not in GEN_KINDS:
        raise UnknownKind(f"unknown generator {kind!r}; choose from {', '.join(GEN_KINDS)}")
    positive = lambda v: v >= 1  # noqa: E731
    if kind == "perturbed":
        base = params.get("base")
        if base is None:
            raise BadParams("perturbed needs base=<path>")
        t = _get(params, "t", float, math.isfinite)
        return perturb(base if isinstance(base, np.ndarray) else load_matrix(base), t)
    rng = np.random.default_rng(seed)
    n = _get(params, "n", int, positive)
    d = _get(params, "d", int, positive)
    if kind == "gaussian":
        return gaussian_stream(rng, (n, d))
    t = _get(params, "t", int, positive)
    sigma = _get(params, "sigma", float, lambda v: v >= 0 and math.isfinite(v))
    left = gaussian_stream(rng, (n, t))
    right = gaussian_stream(rng, (t, d))
    return left @ right + sigma * gaussian_stream(rng, (n, d))


# ---------------------------------------------------------------------------
# JSON with 17 significant digits


def _format_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    if not any(c in text for c in ".en"):
        text += ".0"
    return text


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    close = " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + close + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [_encode(v, indent, level + 1) for v in obj]
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(items) + "]"
        return "[\n" + ",\n".join(pad + it for it in items) + "\n" + close + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    return _encode(obj, indent, 0)
