"""Topic-specific MOI retrieval: text query -> document subset -> ranked subexpressions."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, replace

from .index import CorpusIndex
from .ranking import DEFAULT_PARAMS, RankingParams, ScoredMoi, rank_terms
from .textsearch import TextIndex, TextQuery


@dataclass(frozen=True)
class RetrievalSettings:
    retrieved_docs: int = 200
    min_hit_freq: int = 7
    min_df: int = 10
    max_df: float = 10_000
    min_complexity: int = 1

    def __post_init__(self):
        if self.retrieved_docs < 1:
            raise ValueError("retrieved_docs must be at least 1")
        if self.min_hit_freq < 1:
            raise ValueError("min_hit_freq must be at least 1")
        if self.min_df > self.max_df:
            raise ValueError("min_df exceeds max_df")

    def with_overrides(self, **kw) -> RetrievalSettings:
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


ZBMATH_SETTINGS = RetrievalSettings(retrieved_docs=200, min_hit_freq=7, min_df=10, max_df=10_000)
ARXIV_SETTINGS = RetrievalSettings(retrieved_docs=40, min_hit_freq=7, min_df=50, max_df=10_000)
# no filtering at all: every key of the retrieved documents survives
OPEN_SETTINGS = RetrievalSettings(retrieved_docs=1, min_hit_freq=1, min_df=1, max_df=math.inf)
PRESETS = {"zbmath": ZBMATH_SETTINGS, "arxiv": ARXIV_SETTINGS}


@dataclass(frozen=True)
class SearchResult:
    query: TextQuery
    documents: tuple[str, ...]
    mbm25: tuple[ScoredMoi, ...]
    tfidf: tuple[ScoredMoi, ...]


def hit_counts(doc_ids, index: CorpusIndex) -> Counter:
    """Number of the given documents each key occurs in."""
    hits: Counter[str] = Counter()
    for d in doc_ids:
        doc = index.documents.get(d)
        if doc is not None:
            hits.update(doc.tf.keys())
    return hits


def candidate_keys(doc_ids, index: CorpusIndex, settings: RetrievalSettings) -> list[str]:
    out = []
    for key, hits in hit_counts(doc_ids, index).items():
        r = index.records[key]
        if (hits >= settings.min_hit_freq and settings.min_df <= r.df <= settings.max_df
                and r.complexity >= settings.min_complexity):
            out.append(key)
    return sorted(out)


def topic_documents(query: TextQuery | str, settings: RetrievalSettings, text_index: TextIndex,
                    index: CorpusIndex) -> list[str]:
    """D_q restricted to documents known to the formula index."""
    docs = text_index.search(query, settings.retrieved_docs)
    return [d for d in docs if d in index.documents]


def retrieve_mois(query: TextQuery | str, settings: RetrievalSettings, index: CorpusIndex,
                  text_index: TextIndex, params: RankingParams = DEFAULT_PARAMS) -> list[ScoredMoi]:
    return search(query, settings, index, text_index, params).mbm25


def search(query: TextQuery | str, settings: RetrievalSettings, index: CorpusIndex,
           text_index: TextIndex, params: RankingParams = DEFAULT_PARAMS,
           baseline: bool = True) -> SearchResult:
    """Rank the filtered subexpressions of D_q by mBM25 (and the TF-IDF baseline)."""
    if isinstance(query, str):
        query = TextQuery.parse(query)
    docs = topic_documents(query, settings, text_index, index)
    keys = candidate_keys(docs, index, settings)
    ranked = tuple(rank_terms(keys, docs, index, params))
    base = tuple(rank_terms(keys, docs, index, params, baseline=True)) if baseline else ()
    return SearchResult(query, tuple(docs), ranked, base)


def facet_counts(query: TextQuery | str, settings: RetrievalSettings, index: CorpusIndex,
                 text_index: TextIndex, top_n: int = 5) -> dict[int, list[tuple[str, int]]]:
    """Most frequent keys inside D_q per complexity, with their occurrence counts."""
    if isinstance(query, str):
        query = TextQuery.parse(query)
    docs = topic_documents(query, settings, text_index, index)
    counts: Counter[str] = Counter()
    for d in docs:
        counts.update(index.documents[d].tf)
    by_c: dict[int, list[tuple[str, int]]] = {}
    for key, n in counts.items():
        by_c.setdefault(index.records[key].complexity, []).append((key, n))
    return {c: sorted(rows, key=lambda kv: (-kv[1], kv[0]))[:top_n] for c, rows in sorted(by_c.items())}
