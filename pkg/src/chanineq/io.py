"""JSON documents for channels, states and Gaussian parameters, plus reports.

Complex entries are ``[re, im]`` pairs. Emitted floats are rounded to 12
significant digits, so ``parse(emit(x))`` re-emits byte-identically.
"""

from __future__ import annotations

import dataclasses
import json
import math
from importlib import resources
from pathlib import Path

import numpy as np

from .channels import QuantumChannel, as_state
from .entropic import is_infinite
from .errors import SchemaError
from .gaussian import GaussianChannelParams

SCHEMA_VERSION = "1.0"
REPORT_VERSION = "1.0"
SIG_DIGITS = 12


def round_sig(x: float, digits: int = SIG_DIGITS) -> float:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite float {x!r}")
    return float(f"{x:.{digits}g}") + 0.0


def to_jsonable(obj):
    """Convert reports to plain JSON types with rounded floats.

    Complex arrays become nested ``[re, im]`` pairs; the infinity sentinel
    becomes the string ``"inf"``.
    """
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if is_infinite(obj):
        return "inf"
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return round_sig(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return [round_sig(obj.real), round_sig(obj.imag)]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return to_jsonable(np.stack([obj.real, obj.imag], axis=-1).tolist())
        return to_jsonable(obj.tolist())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2) + "\n"


def encode_complex_matrix(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[round_sig(z.real), round_sig(z.imag)] for z in row] for row in m]


def _require(doc: dict, key: str, path: str = ""):
    if not isinstance(doc, dict):
        raise SchemaError(path or "$", "expected an object")
    if key not in doc:
        raise SchemaError(f"{path}{key}", "missing field")
    return doc[key]


def _check_version(doc: dict):
    version = _require(doc, "schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaError("schema_version", f"unsupported version {version!r}, expected {SCHEMA_VERSION!r}")


def _positive_int(doc: dict, key: str) -> int:
    value = _require(doc, key)
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise SchemaError(key, "expected a positive integer")
    return value


def _number(x, path: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
        raise SchemaError(path, "expected a finite number")
    return float(x)


def decode_complex_matrix(obj, path: str, shape: tuple[int, int] | None = None) -> np.ndarray:
    if not isinstance(obj, list) or not obj or not all(isinstance(row, list) for row in obj):
        raise SchemaError(path, "expected a nonempty array of rows")
    n_cols = len(obj[0])
    out = np.zeros((len(obj), n_cols), dtype=complex)
    for i, row in enumerate(obj):
        if len(row) != n_cols:
            raise SchemaError(f"{path}[{i}]", f"row has {len(row)} entries, expected {n_cols}")
        for j, z in enumerate(row):
            if not isinstance(z, list) or len(z) != 2:
                raise SchemaError(f"{path}[{i}][{j}]", "expected a [re, im] pair")
            out[i, j] = complex(_number(z[0], f"{path}[{i}][{j}][0]"), _number(z[1], f"{path}[{i}][{j}][1]"))
    if shape is not None and out.shape != shape:
        raise SchemaError(path, f"shape {out.shape} does not match expected {shape}")
    return out


def decode_real_matrix(obj, path: str, shape: tuple[int, int]) -> np.ndarray:
    if not isinstance(obj, list) or len(obj) != shape[0]:
        raise SchemaError(path, f"expected {shape[0]} rows")
    out = np.zeros(shape)
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != shape[1]:
            raise SchemaError(f"{path}[{i}]", f"expected {shape[1]} entries")
        for j, x in enumerate(row):
            out[i, j] = _number(x, f"{path}[{i}][{j}]")
    return out


def channel_to_document(channel: QuantumChannel) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "dim_in": channel.dim_in,
        "dim_out": channel.dim_out,
        "kraus": [encode_complex_matrix(a) for a in channel.kraus],
    }


def channel_from_document(doc: dict) -> QuantumChannel:
    """Parse and validate a channel document.

    Raises:
        SchemaError: structural problems, located by JSON path.
        NotTracePreserving, NotCP: the operators do not form a channel.
    """
    _check_version(doc)
    d_in = _positive_int(doc, "dim_in")
    d_out = _positive_int(doc, "dim_out")
    kraus = _require(doc, "kraus")
    if not isinstance(kraus, list) or not kraus:
        raise SchemaError("kraus", "expected a nonempty array of matrices")
    ops = [decode_complex_matrix(a, f"kraus[{i}]", (d_out, d_in)) for i, a in enumerate(kraus)]
    return QuantumChannel(ops)


def state_to_document(rho) -> dict:
    rho = as_state(rho)
    return {"schema_version": SCHEMA_VERSION, "dim": rho.shape[0], "matrix": encode_complex_matrix(rho)}


def state_from_document(doc: dict) -> np.ndarray:
    _check_version(doc)
    d = _positive_int(doc, "dim")
    return as_state(decode_complex_matrix(_require(doc, "matrix"), "matrix", (d, d)))


def gaussian_to_document(params: GaussianChannelParams) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "s_a": params.s_a,
        "s_b": params.s_b,
        "k": to_jsonable(params.k),
        "l": to_jsonable(params.l),
        "alpha": to_jsonable(params.alpha),
    }


def gaussian_from_document(doc: dict, check_nid: bool = True) -> GaussianChannelParams:
    _check_version(doc)
    s_a = _positive_int(doc, "s_a")
    s_b = _positive_int(doc, "s_b")
    k = decode_real_matrix(_require(doc, "k"), "k", (2 * s_a, 2 * s_b))
    alpha = decode_real_matrix(_require(doc, "alpha"), "alpha", (2 * s_b, 2 * s_b))
    l_raw = doc.get("l", [0.0] * (2 * s_b))
    if not isinstance(l_raw, list) or len(l_raw) != 2 * s_b:
        raise SchemaError("l", f"expected {2 * s_b} numbers")
    l = np.array([_number(x, f"l[{i}]") for i, x in enumerate(l_raw)])
    return GaussianChannelParams(k, alpha, l, check_nid=check_nid)


def document_kind(doc) -> str:
    """``"channel"``, ``"gaussian"`` or ``"state"`` from the document's fields."""
    if isinstance(doc, dict):
        if "kraus" in doc:
            return "channel"
        if "alpha" in doc or "k" in doc:
            return "gaussian"
        if "matrix" in doc:
            return "state"
    raise SchemaError("$", "cannot tell the document kind (need kraus, k/alpha or matrix)")


def load_json(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError("$", f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc.msg} at line {exc.lineno}") from exc


def save_json(doc, path) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8")


def load_channel(path) -> QuantumChannel:
    return channel_from_document(load_json(path))


def load_state(path) -> np.ndarray:
    return state_from_document(load_json(path))


def load_gaussian(path, check_nid: bool = True) -> GaussianChannelParams:
    return gaussian_from_document(load_json(path), check_nid)


def bundled(name: str) -> Path:
    """Path of a document shipped in ``chanineq/data``."""
    path = Path(str(resources.files("chanineq") / "data" / name))
    if not path.exists():
        raise FileNotFoundError(name)
    return path


def bundled_names() -> list[str]:
    return sorted(p.name for p in Path(str(resources.files("chanineq") / "data")).glob("*.json"))
