"""
Binary index file.

Layout: one JSON header line ``{"format", "dimension", "embedder", "count"}``
followed by ``count`` records, node records first, each sorted by id::

    u8 kind | u32 id length | id (UTF-8) | u32 owner length | owner | D x float32

All integers and floats are little-endian.
"""
import json
import struct

import numpy as np

from src.exceptions import ParseError
from src.index.vector_index import EmbeddingIndex, VectorKind

FORMAT = "kg-vectors-1"
_KIND_CODES = {VectorKind.NODE: 0, VectorKind.WALK: 1}
_CODE_KINDS = {code: kind for kind, code in _KIND_CODES.items()}
_U8 = struct.Struct("<B")
_U32 = struct.Struct("<I")


def _record(kind: VectorKind, id: str, owner: str, vector: np.ndarray) -> bytes:
    id_bytes = id.encode("utf-8")
    owner_bytes = owner.encode("utf-8")
    return b"".join(
        [
            _U8.pack(_KIND_CODES[kind]),
            _U32.pack(len(id_bytes)),
            id_bytes,
            _U32.pack(len(owner_bytes)),
            owner_bytes,
            np.asarray(vector, dtype="<f4").tobytes(),
        ]
    )


def dump_index(idx: EmbeddingIndex) -> bytes:
    header = {
        "format": FORMAT,
        "dimension": idx.dimension,
        "embedder": idx.embedder_id,
        "count": len(idx),
    }
    parts = [json.dumps(header, sort_keys=True).encode("utf-8") + b"\n"]
    for node in sorted(idx.node_vectors):
        parts.append(_record(VectorKind.NODE, node, "", idx.node_vectors[node]))
    for key in sorted(idx.walk_vectors):
        vector, owner = idx.walk_vectors[key]
        parts.append(_record(VectorKind.WALK, key, owner, vector))
    return b"".join(parts)


def load_index(data: bytes) -> EmbeddingIndex:
    newline = data.find(b"\n")
    if newline < 0:
        raise ParseError("index file has no header")
    try:
        header = json.loads(data[:newline].decode("utf-8"))
        if header.get("format") != FORMAT:
            raise ParseError(f"unsupported index format {header.get('format')!r}")
        dimension = int(header["dimension"])
        count = int(header["count"])
    except (KeyError, ValueError) as exc:
        raise ParseError(f"invalid index header: {exc}") from exc

    idx = EmbeddingIndex(dimension, header.get("embedder", ""))
    vector_bytes = 4 * dimension
    pos = newline + 1
    try:
        for _ in range(count):
            (code,) = _U8.unpack_from(data, pos)
            pos += _U8.size
            (id_len,) = _U32.unpack_from(data, pos)
            pos += _U32.size
            id = data[pos:pos + id_len].decode("utf-8")
            pos += id_len
            (owner_len,) = _U32.unpack_from(data, pos)
            pos += _U32.size
            owner = data[pos:pos + owner_len].decode("utf-8")
            pos += owner_len
            if pos + vector_bytes > len(data):
                raise ParseError("truncated vector record")
            vector = np.frombuffer(data, dtype="<f4", count=dimension, offset=pos)
            pos += vector_bytes
            kind = _CODE_KINDS[code]
            idx.upsert(id, vector, kind, owner if kind is VectorKind.WALK else None)
    except (struct.error, KeyError, UnicodeDecodeError) as exc:
        raise ParseError(f"corrupt index record: {exc}") from exc
    if pos != len(data):
        raise ParseError("trailing bytes after last index record")
    return idx
