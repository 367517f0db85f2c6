"""``RVAE`` checkpoint container.

Layout, all little-endian::

    b"RVAE"  u16 version
    u32 length, UTF-8 model kind ("recvae", "ease")
    u32 length, UTF-8 JSON hyperparameter block (sorted keys)
    u32 n_tensors, then per tensor:
        u32 name length, UTF-8 name, u32 rank, u32[rank] dims, float32[prod(dims)]
"""
import json
import struct

import numpy as np

from ..errors import FormatError

MAGIC = b"RVAE"
VERSION = 1


def encode_checkpoint(kind, hyper, tensors):
    def text(s):
        raw = s.encode("utf-8")
        return struct.pack("<I", len(raw)) + raw

    parts = [MAGIC, struct.pack("<H", VERSION), text(kind),
             text(json.dumps(hyper, sort_keys=True)), struct.pack("<I", len(tensors))]
    for name in sorted(tensors):
        arr = np.asarray(tensors[name])
        parts.append(text(name))
        parts.append(struct.pack(f"<I{arr.ndim}I", arr.ndim, *arr.shape))
        parts.append(np.ascontiguousarray(arr, dtype="<f4").tobytes())
    return b"".join(parts)


def save_checkpoint(path, kind, hyper, tensors):
    with open(path, "wb") as fh:
        fh.write(encode_checkpoint(kind, hyper, tensors))


def decode_checkpoint(buf):
    view = memoryview(buf)
    pos = 0

    def take(n):
        nonlocal pos
        if pos + n > len(view):
            raise FormatError("checkpoint is truncated")
        chunk = view[pos:pos + n]
        pos += n
        return chunk

    def u32():
        return struct.unpack("<I", take(4))[0]

    def text():
        return bytes(take(u32())).decode("utf-8")

    if bytes(take(4)) != MAGIC:
        raise FormatError("not a checkpoint (bad magic)")
    version = struct.unpack("<H", take(2))[0]
    if version != VERSION:
        raise FormatError(f"unsupported checkpoint version {version}")
    kind = text()
    try:
        hyper = json.loads(text())
    except ValueError as exc:
        raise FormatError(f"corrupt hyperparameter block: {exc}") from None
    tensors = {}
    for _ in range(u32()):
        name = text()
        rank = u32()
        shape = tuple(u32() for _ in range(rank))
        count = int(np.prod(shape, dtype=np.int64))
        tensors[name] = np.frombuffer(take(4 * count), dtype="<f4").astype(np.float32).reshape(shape)
    if pos != len(view):
        raise FormatError("trailing bytes after checkpoint")
    return kind, hyper, tensors


def load_checkpoint(path):
    with open(path, "rb") as fh:
        return decode_checkpoint(fh.read())
