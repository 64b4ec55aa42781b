"""Binary field snapshots.

Layout (little-endian): magic ``b"CSSR"``, u32 version (1), u32 n_x,
u32 m_y (1 for 1D fields), f64 l_x, f64 time, f64 epsilon, f64 beta, then
the field as interleaved (re, im) f64 pairs with the x index fastest.
"""

import os
from pathlib import Path
import struct
import tempfile

import numpy as np

from .errors import SnapshotError

MAGIC = b"CSSR"
VERSION = 1
HEADER = struct.Struct("<4sIII4d")
META_KEYS = ("l_x", "time", "epsilon", "beta")


def encode_snapshot(field, meta):
    a = np.asarray(field, dtype=np.complex128)
    if a.ndim not in (1, 2):
        raise SnapshotError(f"snapshot field must be 1D or 2D, got shape {a.shape}")
    n_x = a.shape[0]
    m_y = a.shape[1] if a.ndim == 2 else 1
    vals = [float(meta.get(k, 0.0)) for k in META_KEYS]
    payload = a.astype("<c16").tobytes(order="F")
    return HEADER.pack(MAGIC, VERSION, n_x, m_y, *vals) + payload


def decode_snapshot(data):
    if len(data) < HEADER.size:
        raise SnapshotError(f"truncated header ({len(data)} bytes)")
    magic, version, n_x, m_y, *vals = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise SnapshotError(f"bad magic {magic!r}")
    if version != VERSION:
        raise SnapshotError(f"unsupported version {version}")
    expected = 16 * n_x * m_y
    got = len(data) - HEADER.size
    if got != expected:
        raise SnapshotError(f"payload has {got} bytes, expected {expected}")
    flat = np.frombuffer(data, dtype="<c16", offset=HEADER.size).astype(np.complex128)
    field = flat if m_y == 1 else flat.reshape((n_x, m_y), order="F")
    return field.copy(), dict(zip(META_KEYS, vals))


def write_snapshot(field, meta, path):
    """Write atomically: a partial file never appears at ``path``."""
    path = Path(path)
    blob = encode_snapshot(field, meta)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(blob)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_snapshot(path):
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise SnapshotError(f"cannot read snapshot {path}: {exc}") from exc
    return decode_snapshot(data)
