"""Binary dataset bundle (``RVDS``) and its text manifest.

Layout, all little-endian::

    b"RVDS"  u16 version
    u32 n_users  then per user:  u32 byte length, UTF-8 id
    u32 n_items  then per item:  u32 byte length, UTF-8 id
    per user row: u32 length, u32[length] item indices
    u8 has_split; when 1:
        u32 n_train, u32[n_train] user indices
        validation, then test:  u32 n, u32[n] users, then per user
                                u32 length, u32[length] fold-in items

Holdout items are the row minus its fold-in items.
"""
import struct

import numpy as np

from ..errors import FormatError
from .interactions import InteractionMatrix
from .split import DatasetSplit, HeldOutUsers

MAGIC = b"RVDS"
VERSION = 1


def _u32_array(values):
    values = np.asarray(values, dtype="<u4")
    return struct.pack("<I", len(values)) + values.tobytes()


def _strings(strings):
    out = [struct.pack("<I", len(strings))]
    for s in strings:
        raw = str(s).encode("utf-8")
        out.append(struct.pack("<I", len(raw)) + raw)
    return b"".join(out)


def encode_bundle(matrix, split=None):
    parts = [MAGIC, struct.pack("<H", VERSION), _strings(matrix.user_ids), _strings(matrix.item_ids)]
    parts.extend(_u32_array(matrix.row(u)) for u in range(matrix.n_users))
    parts.append(struct.pack("<B", split is not None))
    if split is not None:
        parts.append(_u32_array(split.train_users))
        for held in (split.validation, split.test):
            parts.append(_u32_array(held.users))
            parts.extend(_u32_array(held.fold_in(j)) for j in range(len(held)))
    return b"".join(parts)


def write_bundle(path, matrix, split=None):
    with open(path, "wb") as fh:
        fh.write(encode_bundle(matrix, split))


class _Reader:
    def __init__(self, buf):
        self.buf = memoryview(buf)
        self.pos = 0

    def take(self, n):
        if self.pos + n > len(self.buf):
            raise FormatError("dataset bundle is truncated")
        chunk = self.buf[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def unpack(self, fmt):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))[0]

    def u32_array(self):
        n = self.unpack("<I")
        return np.frombuffer(self.take(4 * n), dtype="<u4").astype(np.int64)

    def strings(self):
        return [bytes(self.take(self.unpack("<I"))).decode("utf-8") for _ in range(self.unpack("<I"))]


def decode_bundle(buf):
    r = _Reader(buf)
    if bytes(r.take(4)) != MAGIC:
        raise FormatError("not a dataset bundle (bad magic)")
    version = r.unpack("<H")
    if version != VERSION:
        raise FormatError(f"unsupported dataset bundle version {version}")
    user_ids, item_ids = r.strings(), r.strings()
    matrix = InteractionMatrix.from_rows([r.u32_array() for _ in user_ids], len(item_ids),
                                         user_ids, item_ids)
    split = None
    if r.unpack("<B"):
        train = r.u32_array()
        held = []
        for _ in range(2):
            users = r.u32_array()
            fold_ins = [r.u32_array() for _ in users]
            holdouts = [np.setdiff1d(matrix.row(u), f) for u, f in zip(users, fold_ins)]
            held.append(HeldOutUsers.from_parts(users, fold_ins, holdouts))
        split = DatasetSplit(train, *held)
    if r.pos != len(r.buf):
        raise FormatError("trailing bytes after dataset bundle")
    return matrix, split


def read_bundle(path):
    with open(path, "rb") as fh:
        return decode_bundle(fh.read())


def write_manifest(path, entries):
    with open(path, "w") as fh:
        for key in sorted(entries):
            fh.write(f"{key} = {entries[key]}\n")


def read_manifest(path):
    entries = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                key, _, value = line.partition("=")
                entries[key.strip()] = value.strip()
    return entries
