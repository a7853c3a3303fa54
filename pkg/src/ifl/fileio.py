"""Binary and JSON file formats.

All binary files are little-endian with a 4-byte magic and a u32
version:

  ACTV: magic "ACTV", u32 version=1, u32 N, u32 d, N*d float32 row-major.
  PRED: magic "PRED", u32 version=1, u32 N, N u16 labels.
  ITNS: magic "ITNS", u32 version=1, u32 M, u32 N, u32 T, f32 gamma_corr,
        f32 gamma_data, u64 nnz, nnz triples (u32 m, u32 n, u32 t) sorted
        lexicographically.

The manifest is JSON: {"models": [{"id", "activations", "predictions"}],
"labels": path, "pcs": 50, "corr_percentile": 90, "data_percentile": 90}.

Writes go to a temp file in the target directory and are renamed into
place.
"""

from __future__ import annotations

import json
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .errors import FormatError, ValidationError
from .pipeline import InteractionTensor

ACTV_MAGIC = b"ACTV"
PRED_MAGIC = b"PRED"
ITNS_MAGIC = b"ITNS"
FORMAT_VERSION = 1


def _atomic_write(path, payload: bytes):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_exact(data: bytes, fmt: str, offset: int, what: str, path):
    size = struct.calcsize(fmt)
    if offset + size > len(data):
        raise FormatError(f"{path}: truncated {what}")
    return struct.unpack_from(fmt, data, offset), offset + size


def write_activations(path, values: np.ndarray):
    v = np.ascontiguousarray(values, dtype="<f4")
    if v.ndim != 2:
        raise ValidationError(f"activation matrix must be 2-d, got shape {v.shape}")
    header = struct.pack("<4sIII", ACTV_MAGIC, FORMAT_VERSION, v.shape[0], v.shape[1])
    _atomic_write(path, header + v.tobytes())


def read_activations(path) -> np.ndarray:
    data = Path(path).read_bytes()
    (magic, version, n, d), offset = _read_exact(data, "<4sIII", 0, "header", path)
    if magic != ACTV_MAGIC:
        raise FormatError(f"{path}: bad ACTV header (magic {magic!r})")
    if version != FORMAT_VERSION:
        raise FormatError(f"{path}: unsupported ACTV version {version}")
    expected = offset + 4 * n * d
    if len(data) != expected:
        raise FormatError(
            f"{path}: ACTV payload is {len(data) - offset} bytes, "
            f"expected {4 * n * d}"
        )
    return np.frombuffer(data, dtype="<f4", offset=offset).reshape(n, d).copy()


def write_labels(path, labels: np.ndarray):
    v = np.asarray(labels)
    if v.ndim != 1:
        raise ValidationError(f"labels must be 1-d, got shape {v.shape}")
    if v.size and (v.min() < 0 or v.max() > 0xFFFF):
        raise ValidationError("labels must fit in u16")
    header = struct.pack("<4sII", PRED_MAGIC, FORMAT_VERSION, v.size)
    _atomic_write(path, header + v.astype("<u2").tobytes())


def read_labels(path) -> np.ndarray:
    data = Path(path).read_bytes()
    (magic, version, n), offset = _read_exact(data, "<4sII", 0, "header", path)
    if magic != PRED_MAGIC:
        raise FormatError(f"{path}: bad PRED header (magic {magic!r})")
    if version != FORMAT_VERSION:
        raise FormatError(f"{path}: unsupported PRED version {version}")
    if len(data) != offset + 2 * n:
        raise FormatError(
            f"{path}: PRED payload is {len(data) - offset} bytes, expected {2 * n}"
        )
    return np.frombuffer(data, dtype="<u2", offset=offset).astype(np.int64)


def write_interaction_tensor(path, omega: InteractionTensor):
    m, n, t = omega.dims
    header = struct.pack("<4sIIIIffQ", ITNS_MAGIC, FORMAT_VERSION, m, n, t,
                         omega.gamma_corr, omega.gamma_data, omega.nnz)
    body = np.ascontiguousarray(omega.triples, dtype="<u4").tobytes()
    _atomic_write(path, header + body)


def read_interaction_tensor(path) -> InteractionTensor:
    data = Path(path).read_bytes()
    (magic, version, m, n, t, g_corr, g_data, nnz), offset = _read_exact(
        data, "<4sIIIIffQ", 0, "header", path)
    if magic != ITNS_MAGIC:
        raise FormatError(f"{path}: bad ITNS header (magic {magic!r})")
    if version != FORMAT_VERSION:
        raise FormatError(f"{path}: unsupported ITNS version {version}")
    if len(data) != offset + 12 * nnz:
        raise FormatError(
            f"{path}: ITNS payload is {len(data) - offset} bytes, "
            f"expected {12 * nnz}"
        )
    triples = np.frombuffer(data, dtype="<u4", offset=offset).reshape(-1, 3).copy()
    if nnz:
        if (triples[:, 0].max() >= m or triples[:, 1].max() >= n
                or triples[:, 2].max() >= t):
            raise FormatError(f"{path}: ITNS triple out of bounds")
        order = np.lexsort((triples[:, 2], triples[:, 1], triples[:, 0]))
        if not np.array_equal(order, np.arange(nnz)):
            raise FormatError(f"{path}: ITNS triples not sorted")
    return InteractionTensor(dims=(m, n, t), triples=triples,
                             gamma_corr=float(g_corr), gamma_data=float(g_data))


def load_manifest(path) -> dict:
    base = Path(path).parent
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path}: malformed manifest JSON: {e}") from e
    if not isinstance(raw, dict) or "models" not in raw:
        raise ValidationError(f"{path}: manifest must be an object with a 'models' list")
    models = raw["models"]
    if not isinstance(models, list) or not models:
        raise ValidationError(f"{path}: manifest 'models' must be a nonempty list")
    resolved = []
    for entry in models:
        if "id" not in entry or "activations" not in entry:
            raise ValidationError(
                f"{path}: each model entry needs 'id' and 'activations'"
            )
        resolved.append({
            "id": str(entry["id"]),
            "activations": str(base / entry["activations"]),
            "predictions": (str(base / entry["predictions"])
                            if entry.get("predictions") else None),
        })
    return {
        "models": resolved,
        "labels": str(base / raw["labels"]) if raw.get("labels") else None,
        "pcs": int(raw.get("pcs", 50)),
        "corr_percentile": float(raw.get("corr_percentile", 90)),
        "data_percentile": float(raw.get("data_percentile", 90)),
    }
