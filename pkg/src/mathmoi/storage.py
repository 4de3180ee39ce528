"""On-disk formats for corpus and text indexes.

Container layout (little-endian)::

    magic      8 bytes   b"MOIINDEX" (corpus) or b"MOITEXT\\0" (text index)
    version    u32
    length     u64       payload byte count
    sha256     32 bytes  digest of the payload
    payload

Corpus payload sections, in order:

1. stats header: n_documents, n_formulae, n_occurrences, n_unique (u64 each),
   max_complexity (u32), avg_doc_length, avg_complexity (f64), shard label
   (u32 byte length, ``0xFFFFFFFF`` for none, then UTF-8).
2. records sorted by key: count (u64), then per row key (u32 length + UTF-8),
   complexity (u32), total_tf (u64), df (u64).  A row's position is its key id.
3. documents sorted by id: count (u64), then per document id (u32 length +
   UTF-8), n_formulae (u64), nnz (u32) and nnz pairs of key id (u32) and tf
   (u64) in ascending key id order.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import struct
from pathlib import Path

from .errors import ChecksumError, IndexFormatError, TruncatedIndexError, VersionMismatchError
from .index import CorpusIndex, CorpusStats, DocumentIndex, MoiRecord

CORPUS_MAGIC = b"MOIINDEX"
TEXT_MAGIC = b"MOITEXT\0"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<8sIQ32s")
_STATS = struct.Struct("<QQQQIdd")
_NONE = 0xFFFFFFFF


def _write_container(path, magic: bytes, payload: bytes) -> None:
    header = _HEADER.pack(magic, FORMAT_VERSION, len(payload), hashlib.sha256(payload).digest())
    tmp = Path(f"{path}.tmp")
    with open(tmp, "wb") as fh:
        fh.write(header)
        fh.write(payload)
    os.replace(tmp, path)


def _read_container(path, magic: bytes) -> bytes:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise TruncatedIndexError(f"{path}: file too short ({len(data)} bytes)")
    got_magic, version, length, digest = _HEADER.unpack_from(data)
    if got_magic != magic:
        raise IndexFormatError(f"{path}: not a {magic.rstrip(bytes(1)).decode()} file")
    if version != FORMAT_VERSION:
        raise VersionMismatchError(f"{path}: format version {version}, expected {FORMAT_VERSION}")
    payload = data[_HEADER.size:]
    if len(payload) < length:
        raise TruncatedIndexError(f"{path}: payload truncated ({len(payload)} of {length} bytes)")
    if len(payload) > length:
        raise IndexFormatError(f"{path}: {len(payload) - length} trailing bytes")
    if hashlib.sha256(payload).digest() != digest:
        raise ChecksumError(f"{path}: checksum mismatch")
    return payload


def _str(s: str) -> bytes:
    b = s.encode("utf-8")
    return struct.pack("<I", len(b)) + b


class _Reader:
    def __init__(self, buf: bytes):
        self.buf = memoryview(buf)
        self.pos = 0

    def unpack(self, st: struct.Struct):
        try:
            vals = st.unpack_from(self.buf, self.pos)
        except struct.error:
            raise IndexFormatError("corrupt payload") from None
        self.pos += st.size
        return vals

    def string(self, n=None):
        if n is None:
            (n,) = self.unpack(_U32)
        if self.pos + n > len(self.buf):
            raise IndexFormatError("corrupt payload")
        s = bytes(self.buf[self.pos:self.pos + n]).decode("utf-8")
        self.pos += n
        return s


_U32 = struct.Struct("<I")
_U64 = struct.Struct("<Q")
_REC = struct.Struct("<IQQ")
_DOC = struct.Struct("<QI")
_PAIR = struct.Struct("<IQ")


def dump_index(index: CorpusIndex) -> bytes:
    """Serialize the payload; identical indexes give identical bytes."""
    s = index.stats
    out = [_STATS.pack(s.n_documents, s.n_formulae, s.n_occurrences, s.n_unique,
                       s.max_complexity, s.avg_doc_length, s.avg_complexity)]
    out.append(_U32.pack(_NONE) if index.shard_label is None else _str(index.shard_label))

    keys = sorted(index.records)
    key_id = {k: i for i, k in enumerate(keys)}
    out.append(_U64.pack(len(keys)))
    for k in keys:
        r = index.records[k]
        out.append(_str(k))
        out.append(_REC.pack(r.complexity, r.total_tf, r.df))

    out.append(_U64.pack(len(index.documents)))
    for doc_id in sorted(index.documents):
        doc = index.documents[doc_id]
        out.append(_str(doc_id))
        out.append(_DOC.pack(doc.n_formulae, len(doc.tf)))
        pairs = sorted((key_id[k], n) for k, n in doc.tf.items())
        out.extend(_PAIR.pack(i, n) for i, n in pairs)
    return b"".join(out)


def parse_index(payload: bytes) -> CorpusIndex:
    rd = _Reader(payload)
    n_docs, n_form, n_occ, n_uniq, max_c, avg_dl, avg_c = rd.unpack(_STATS)
    stats = CorpusStats(n_docs, n_form, n_occ, n_uniq, avg_dl, avg_c, max_c)
    (label_len,) = rd.unpack(_U32)
    label = None if label_len == _NONE else rd.string(label_len)

    (n_keys,) = rd.unpack(_U64)
    keys = []
    records = {}
    for _ in range(n_keys):
        k = rd.string()
        c, tf, df = rd.unpack(_REC)
        keys.append(k)
        records[k] = MoiRecord(k, c, tf, df)

    (n_documents,) = rd.unpack(_U64)
    documents = {}
    for _ in range(n_documents):
        doc_id = rd.string()
        n_formulae, nnz = rd.unpack(_DOC)
        tf = {}
        comp = {}
        for _ in range(nnz):
            i, n = rd.unpack(_PAIR)
            if i >= n_keys:
                raise IndexFormatError(f"key id {i} out of range")
            k = keys[i]
            tf[k] = n
            comp[k] = records[k].complexity
        documents[doc_id] = DocumentIndex(doc_id, tf, comp, n_formulae)
    if rd.pos != len(payload):
        raise IndexFormatError("unexpected data after documents section")
    return CorpusIndex(records, documents, stats, label)


def save_index(index: CorpusIndex, path) -> None:
    _write_container(path, CORPUS_MAGIC, dump_index(index))


def load_index(path) -> CorpusIndex:
    return parse_index(_read_container(path, CORPUS_MAGIC))


def save_json_container(obj, path) -> None:
    payload = json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":")).encode("utf-8")
    _write_container(path, TEXT_MAGIC, payload)


def load_json_container(path):
    return json.loads(_read_container(path, TEXT_MAGIC).decode("utf-8"))


def export_tsv(index: CorpusIndex, path_or_file) -> None:
    """Write ``key, complexity, total_tf, df`` rows sorted by key."""
    own = not hasattr(path_or_file, "write")
    fh = open(path_or_file, "w", encoding="utf-8", newline="") if own else path_or_file
    try:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(["key", "complexity", "total_tf", "df"])
        for k in sorted(index.records):
            r = index.records[k]
            w.writerow([k, r.complexity, r.total_tf, r.df])
    finally:
        if own:
            fh.close()


def tsv_string(index: CorpusIndex) -> str:
    buf = io.StringIO()
    export_tsv(index, buf)
    return buf.getvalue()
