"""BM25-family relevance scores for mathematical subexpressions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .errors import AbsentTermError
from .index import CorpusIndex, CorpusStats, DocumentIndex, MoiRecord


@dataclass(frozen=True)
class RankingParams:
    k: float = 1.2
    b: float = 0.95
    log_base: float = math.e

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be non-negative")
        if not 0 <= self.b <= 1:
            raise ValueError("b must lie in [0, 1]")
        if self.log_base <= 0 or self.log_base == 1:
            raise ValueError("log_base must be positive and not 1")

    def log(self, x: float) -> float:
        return math.log(x) if self.log_base == math.e else math.log(x, self.log_base)


DEFAULT_PARAMS = RankingParams()


@dataclass(frozen=True, slots=True)
class ScoredMoi:
    key: str
    score: float
    df: int
    total_tf: int
    best_doc: str
    hit_count: int

    def as_dict(self) -> dict:
        return {"key": self.key, "score": self.score, "df": self.df, "total_tf": self.total_tf,
                "best_doc": self.best_doc, "hit_count": self.hit_count}


def idf(record: MoiRecord | int, stats: CorpusStats | int, params: RankingParams = DEFAULT_PARAMS) -> float:
    """log((N - n(t) + 1/2) / (n(t) + 1/2)); accepts records or raw counts."""
    n_t = record.df if isinstance(record, MoiRecord) else record
    n = stats.n_documents if isinstance(stats, CorpusStats) else stats
    return params.log((n - n_t + 0.5) / (n_t + 0.5))


def itf(tf: int, doc_length: int, params: RankingParams = DEFAULT_PARAMS) -> float:
    """Inverse term frequency of a term within one document."""
    if tf <= 0:
        raise ValueError("itf is undefined for a term absent from the document")
    if tf > doc_length:
        raise ValueError("term frequency exceeds document length")
    return params.log((doc_length - tf + 0.5) / (tf + 0.5))


def okapi_bm25(tf: int, doc_length: int, record: MoiRecord | int, stats: CorpusStats,
               params: RankingParams = DEFAULT_PARAMS) -> float:
    if stats.avg_doc_length <= 0:
        raise ValueError("average document length must be positive")
    k, b = params.k, params.b
    norm = tf + k * (1 - b + b * doc_length / stats.avg_doc_length)
    return (k + 1) * idf(record, stats, params) * tf / norm


def _doc(d, index) -> DocumentIndex:
    return d if isinstance(d, DocumentIndex) else index.documents[d]


def score_std(term: str, d: DocumentIndex | str, index: CorpusIndex,
              params: RankingParams = DEFAULT_PARAMS) -> float:
    """Complexity-aware score s(t, d) of a subexpression within a document.

    The term frequency is normalized by the largest frequency among the
    document's terms of the same complexity, multiplied by an inverse term
    frequency, and the length normalization is inverted relative to BM25 with
    the average length scaled down by the average complexity.
    """
    doc = _doc(d, index)
    tf = doc.tf.get(term, 0)
    if tf == 0:
        raise ValueError(f"{term!r} does not occur in document {doc.doc_id!r}")
    record = index.records[term]
    stats = index.stats
    k, b = params.k, params.b
    length = doc.length
    norm = doc.max_tf_by_complexity[record.complexity] + k * (
        1 - b + b * stats.avg_doc_length / (length * stats.avg_complexity))
    return (k + 1) * idf(record, stats, params) * itf(tf, length, params) * tf / norm


def _max_over(score, term, doc_set, index, params) -> ScoredMoi:
    best = None
    best_doc = None
    hits = 0
    for d in doc_set:
        doc = _doc(d, index)
        if term not in doc.tf:
            continue
        hits += 1
        s = score(term, doc, index, params)
        if best is None or s > best or (s == best and doc.doc_id < best_doc):
            best, best_doc = s, doc.doc_id
    if best is None:
        raise AbsentTermError(f"{term!r} occurs in none of the given documents")
    r = index.records[term]
    return ScoredMoi(term, best, r.df, r.total_tf, best_doc, hits)


def mbm25(term: str, doc_set: Iterable[DocumentIndex | str], index: CorpusIndex,
          params: RankingParams = DEFAULT_PARAMS) -> ScoredMoi:
    """Maximum of :func:`score_std` over the documents of ``doc_set`` holding ``term``.

    Ties go to the lexicographically smallest document id.
    """
    return _max_over(score_std, term, doc_set, index, params)


def tfidf_normalized(term: str, d: DocumentIndex | str, index: CorpusIndex,
                     params: RankingParams = DEFAULT_PARAMS) -> float:
    doc = _doc(d, index)
    tf = doc.tf.get(term, 0)
    if tf == 0:
        raise ValueError(f"{term!r} does not occur in document {doc.doc_id!r}")
    return tf / doc.length * idf(index.records[term], index.stats, params)


def max_tfidf(term: str, doc_set: Iterable[DocumentIndex | str], index: CorpusIndex,
              params: RankingParams = DEFAULT_PARAMS) -> ScoredMoi:
    """Baseline counterpart of :func:`mbm25` using normalized TF-IDF."""
    return _max_over(tfidf_normalized, term, doc_set, index, params)


def order_key(s: ScoredMoi):
    """Score descending, then df descending, then key."""
    return (-s.score, -s.df, s.key)


def rank_terms(terms: Iterable[str], doc_set, index: CorpusIndex,
               params: RankingParams = DEFAULT_PARAMS, baseline: bool = False) -> list[ScoredMoi]:
    docs = [_doc(d, index) for d in doc_set]
    score = max_tfidf if baseline else mbm25
    return sorted((score(t, docs, index, params) for t in terms), key=order_key)
