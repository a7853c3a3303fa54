"""Writers for the ACTV and PRED wire formats.

Little-endian; 4-byte magic + u32 version=1. ACTV carries u32 N, u32 d
and N*d float32 row-major; PRED carries u32 N and N u16 labels. These
layouts are the interface to the analysis package, which owns the
readers. Writes are atomic (temp file + rename) so a crashed export
never leaves a truncated file in place.
"""

from __future__ import annotations

import os
import struct
import tempfile
from pathlib import Path

import numpy as np

ACTV_MAGIC = b"ACTV"
PRED_MAGIC = b"PRED"
VERSION = 1


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


def write_activations(path, values: np.ndarray):
    v = np.ascontiguousarray(values, dtype="<f4")
    if v.ndim != 2:
        raise ValueError(f"activations must be 2-d, got shape {v.shape}")
    header = struct.pack("<4sIII", ACTV_MAGIC, VERSION, v.shape[0], v.shape[1])
    payload = v.tobytes()
    if len(payload) != 4 * v.shape[0] * v.shape[1]:
        raise ValueError("payload size does not match header shape")
    _atomic_write(path, header + payload)


def write_predictions(path, labels: np.ndarray):
    v = np.asarray(labels)
    if v.ndim != 1:
        raise ValueError(f"labels must be 1-d, got shape {v.shape}")
    if v.size and (v.min() < 0 or v.max() > 0xFFFF):
        raise ValueError("labels must fit in u16")
    header = struct.pack("<4sII", PRED_MAGIC, VERSION, v.size)
    _atomic_write(path, header + v.astype("<u2").tobytes())
