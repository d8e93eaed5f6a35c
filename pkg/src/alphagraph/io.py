"""BigANN-style vector files (.fvecs/.bvecs/.ivecs) and binary index persistence.

Vector records are a little-endian int32 dimension followed by that many
components.  Index files are::

    b"APGR" | u32 version=1 | u64 n | u32 start | per vertex: u32 degree, degree x u32 ids

with a JSON sidecar ``<path>.meta.json`` describing how the index was built.
"""

from __future__ import annotations

import json
import logging
import struct
from pathlib import Path

import numpy as np

from alphagraph import _kernels as K
from alphagraph.core import Dataset
from alphagraph.graph import ProximityGraph

log = logging.getLogger(__name__)

MAGIC = b"APGR"
VERSION = 1
_COMPONENT = {"fvecs": np.dtype("<f4"), "bvecs": np.dtype("u1"), "ivecs": np.dtype("<i4")}


class FormatError(ValueError):
    """Malformed or mismatched file."""


def _kind_of(path, kind: str | None) -> str:
    kind = kind or Path(path).suffix.lstrip(".")
    if kind not in _COMPONENT:
        raise ValueError(f"unknown vector file kind {kind!r}")
    return kind


def read_vecs_array(path, kind: str | None = None, limit: int | None = None) -> np.ndarray:
    """Raw ``n x d`` array in the file's component dtype."""
    kind = _kind_of(path, kind)
    comp = _COMPONENT[kind]
    raw = Path(path).read_bytes()
    if limit is not None and limit < 1:
        raise FormatError("limit must be at least 1 (an empty dataset is invalid)")
    if len(raw) < 4:
        raise FormatError(f"{path}: file too short for a record header")
    d = int(np.frombuffer(raw, dtype="<i4", count=1)[0])
    if d <= 0:
        raise FormatError(f"{path}: non-positive dimension {d}")
    rec = 4 + d * comp.itemsize
    if len(raw) % rec:
        raise FormatError(f"{path}: truncated file ({len(raw)} bytes is not a multiple of {rec})")
    n = len(raw) // rec
    if limit is not None:
        n = min(n, limit)
    buf = np.frombuffer(raw, dtype=np.uint8, count=n * rec).reshape(n, rec)
    dims = buf[:, :4].copy().view("<i4").ravel()
    if np.any(dims != d):
        bad = int(np.argmax(dims != d))
        raise FormatError(f"{path}: record {bad} has dimension {dims[bad]}, expected {d}")
    return buf[:, 4:].copy().view(comp).reshape(n, d)


def read_vecs(path, kind: str | None = None, limit: int | None = None):
    """fvecs/bvecs -> Euclidean :class:`Dataset` (widened to float64); ivecs -> int64 table."""
    kind = _kind_of(path, kind)
    arr = read_vecs_array(path, kind, limit)
    if kind == "ivecs":
        return arr.astype(np.int64)
    return Dataset.from_points(arr.astype(np.float64))


def read_queries(path, kind: str | None = None, limit: int | None = None) -> np.ndarray:
    """Query vectors as float64 without the dataset's distinctness check."""
    return read_vecs_array(path, kind, limit).astype(np.float64)


def write_vecs(path, data, kind: str | None = None) -> None:
    """Write an ``n x d`` array (or a Dataset) in vecs format; values must fit the component type."""
    kind = _kind_of(path, kind)
    comp = _COMPONENT[kind]
    arr = data.points if isinstance(data, Dataset) else np.asarray(data)
    if arr.ndim != 2 or arr.shape[1] < 1:
        raise ValueError(f"expected an n x d array, got shape {arr.shape}")
    conv = arr.astype(comp)
    if not np.array_equal(conv.astype(arr.dtype), arr):
        raise ValueError(f"values are not exactly representable as {kind} components")
    n, d = conv.shape
    rec = np.empty((n, 4 + d * comp.itemsize), dtype=np.uint8)
    rec[:, :4] = np.frombuffer(struct.pack("<i", d), dtype=np.uint8)
    rec[:, 4:] = conv.view(np.uint8).reshape(n, -1)
    Path(path).write_bytes(rec.tobytes())


def dataset_checksum(ds: Dataset) -> str:
    """64-bit FNV-1a over the dataset's float64 little-endian bytes, as 16 hex digits."""
    h = K.fnv1a64_bytes(np.frombuffer(ds.raw_bytes(), dtype=np.uint8))
    return f"{int(h):016x}"


def meta_path(path) -> Path:
    return Path(str(path) + ".meta.json")


def index_bytes(g: ProximityGraph) -> bytes:
    if g.n > 0xFFFFFFFF:
        raise ValueError("graph too large for u32 vertex ids")
    head = MAGIC + struct.pack("<IQI", VERSION, g.n, g.start)
    # interleave degree and ids per vertex
    parts = [head]
    for p in range(g.n):
        deg = int(g.degrees[p])
        row = np.empty(deg + 1, dtype="<u4")
        row[0] = deg
        row[1:] = g.table[p, :deg]
        parts.append(row.tobytes())
    return b"".join(parts)


def write_index(g: ProximityGraph, meta: dict, path, ds: Dataset | None = None) -> None:
    g.validate()
    Path(path).write_bytes(index_bytes(g))
    meta = dict(meta)
    if ds is not None:
        meta.setdefault("checksum", dataset_checksum(ds))
        meta.setdefault("n", ds.n)
    meta_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def read_meta(path) -> dict:
    mp = meta_path(path)
    return json.loads(mp.read_text()) if mp.exists() else {}


def parse_index(raw: bytes) -> ProximityGraph:
    if len(raw) < 20:
        raise FormatError("index file too short for its header")
    if raw[:4] != MAGIC:
        raise FormatError(f"bad magic {raw[:4]!r}")
    version, n, start = struct.unpack_from("<IQI", raw, 4)
    if version != VERSION:
        raise FormatError(f"unsupported index version {version}")
    if n < 1:
        raise FormatError("index declares no vertices")
    words = len(raw) - 20
    if words % 4:
        raise FormatError("index body is not a whole number of u32 words")
    body = np.frombuffer(raw, dtype="<u4", offset=20).astype(np.int64)
    lists = []
    pos = 0
    for p in range(n):
        if pos >= body.size:
            raise FormatError(f"index truncated before vertex {p}")
        deg = int(body[pos])
        if pos + 1 + deg > body.size:
            raise FormatError(f"vertex {p} declares {deg} neighbours beyond end of file")
        lists.append(body[pos + 1 : pos + 1 + deg])
        pos += 1 + deg
    if pos != body.size:
        raise FormatError("trailing bytes after last vertex")
    if not 0 <= start < n:
        raise FormatError(f"start vertex {start} out of range")
    g = ProximityGraph(n, start, capacity=max((len(x) for x in lists), default=0))
    for p, row in enumerate(lists):
        g.table[p, : row.size] = row
        g.degrees[p] = row.size
    try:
        g.validate()
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
    return g


def read_index(path, ds: Dataset, strict_checksum: bool = False) -> ProximityGraph:
    """Load an index for ``ds``; a checksum mismatch warns unless ``strict_checksum``."""
    g = parse_index(Path(path).read_bytes())
    if g.n != ds.n:
        raise FormatError(f"index has {g.n} vertices but dataset has {ds.n} points")
    expected = read_meta(path).get("checksum")
    if expected is not None and expected != dataset_checksum(ds):
        msg = f"{path}: dataset checksum {dataset_checksum(ds)} does not match index meta {expected}"
        if strict_checksum:
            raise FormatError(msg)
        log.warning(msg)
    return g
