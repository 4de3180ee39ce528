"""Per-document and corpus-wide MOI frequency indexes."""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

from .errors import DuplicateDocumentError
from .extract import enumerate_mois
from .pmml import MathTree

log = logging.getLogger(__name__)


@dataclass(eq=True)
class DocumentIndex:
    doc_id: str
    tf: dict[str, int]
    complexities: dict[str, int]
    n_formulae: int = 0

    @cached_property
    def length(self) -> int:
        """|d|: number of subexpression occurrences."""
        return sum(self.tf.values())

    @cached_property
    def max_tf_by_complexity(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for key, n in self.tf.items():
            c = self.complexities[key]
            if n > out.get(c, 0):
                out[c] = n
        return out


@dataclass(frozen=True, slots=True)
class MoiRecord:
    key: str
    complexity: int
    total_tf: int
    df: int


@dataclass(frozen=True)
class CorpusStats:
    n_documents: int = 0
    n_formulae: int = 0
    n_occurrences: int = 0
    n_unique: int = 0
    avg_doc_length: float = 0.0
    avg_complexity: float = 0.0
    max_complexity: int = 0

    def as_dict(self) -> dict:
        return {
            "documents": self.n_documents,
            "formulae": self.n_formulae,
            "subexpressions": self.n_occurrences,
            "unique_subexpressions": self.n_unique,
            "average_document_length": self.avg_doc_length,
            "average_complexity": self.avg_complexity,
            "maximum_complexity": self.max_complexity,
        }


@dataclass(eq=True)
class CorpusIndex:
    records: dict[str, MoiRecord]
    documents: dict[str, DocumentIndex]
    stats: CorpusStats = field(default_factory=CorpusStats)
    shard_label: str | None = None

    def __contains__(self, key):
        return key in self.records

    def sorted_keys(self) -> list[str]:
        return sorted(self.records)


def ingest_document(doc_id: str, formulae: Iterable[MathTree]) -> DocumentIndex:
    tf: Counter[str] = Counter()
    complexities: dict[str, int] = {}
    n = 0
    for tree in formulae:
        n += 1
        for occ in enumerate_mois(tree):
            tf[occ.key] += 1
            complexities[occ.key] = occ.complexity
    return DocumentIndex(doc_id, dict(tf), complexities, n)


def corpus_stats(index: CorpusIndex) -> CorpusStats:
    return _compute_stats(index.records, index.documents)


def _compute_stats(records, documents) -> CorpusStats:
    n_docs = len(documents)
    n_occ = sum(r.total_tf for r in records.values())
    if n_docs == 0:
        return CorpusStats()
    weighted = sum(r.total_tf * r.complexity for r in records.values())
    return CorpusStats(
        n_documents=n_docs,
        n_formulae=sum(d.n_formulae for d in documents.values()),
        n_occurrences=n_occ,
        n_unique=len(records),
        avg_doc_length=n_occ / n_docs,
        avg_complexity=weighted / n_occ if n_occ else 0.0,
        max_complexity=max((r.complexity for r in records.values()), default=0),
    )


class IndexBuilder:
    """Accumulates document indexes; the result is independent of insertion order."""

    def __init__(self, shard_label: str | None = None):
        self.shard_label = shard_label
        self._docs: dict[str, DocumentIndex] = {}

    def add(self, doc: DocumentIndex) -> None:
        if doc.doc_id in self._docs:
            raise DuplicateDocumentError(f"duplicate document id {doc.doc_id!r}")
        self._docs[doc.doc_id] = doc

    def build(self) -> CorpusIndex:
        tf: Counter[str] = Counter()
        df: Counter[str] = Counter()
        comp: dict[str, int] = {}
        for doc in self._docs.values():
            for key, n in doc.tf.items():
                tf[key] += n
                df[key] += 1
                comp[key] = doc.complexities[key]
        records = {k: MoiRecord(k, comp[k], tf[k], df[k]) for k in sorted(tf)}
        documents = {d: self._docs[d] for d in sorted(self._docs)}
        return CorpusIndex(records, documents, _compute_stats(records, documents), self.shard_label)


def build_index(documents: Iterable[tuple[str, Iterable[MathTree]]],
                shard_label: str | None = None) -> CorpusIndex:
    builder = IndexBuilder(shard_label)
    for doc_id, formulae in documents:
        builder.add(ingest_document(doc_id, formulae))
    return builder.build()


def merge_shards(shards: Iterable[CorpusIndex]) -> CorpusIndex:
    shards = list(shards)
    labels = {s.shard_label for s in shards}
    builder = IndexBuilder(labels.pop() if len(labels) == 1 else None)
    for shard in shards:
        for doc in shard.documents.values():
            builder.add(doc)
    return builder.build()
