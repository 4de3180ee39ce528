"""Query engine and the JSON payloads shared by the CLI and the HTTP service.

Every payload carries ``schema_version``; it is bumped whenever a field is
renamed, removed or changes meaning.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

from .complete import CompletionIndex
from .distribution import complexity_histogram, fit_zipf, rank_table
from .errors import InsufficientDataError, MoiError
from .extract import deserialize, render_text
from .index import CorpusIndex
from .pipeline import load_indexes
from .ranking import DEFAULT_PARAMS, RankingParams, ScoredMoi
from .retrieval import ZBMATH_SETTINGS, RetrievalSettings, facet_counts, search
from .textsearch import TextIndex

SCHEMA_VERSION = 1
DEFAULT_LIMIT = 20


class MissingTextIndexError(MoiError):
    """Text search was requested but no text index is loaded."""


class UnknownKeyError(MoiError):
    pass


def dumps_json(obj) -> str:
    """Canonical JSON text: sorted keys, UTF-8, compact, newline-terminated."""
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"),
                      allow_nan=False) + "\n"


def _finite(x):
    return None if isinstance(x, float) and math.isinf(x) else x


def _scored_row(s: ScoredMoi) -> dict:
    row = s.as_dict()
    row["display"] = render_text(s.key)
    return row


@dataclass
class Engine:
    """Read-only bundle of the loaded indexes and the default query settings."""

    index: CorpusIndex
    text_index: TextIndex | None = None
    params: RankingParams = DEFAULT_PARAMS
    settings: RetrievalSettings = ZBMATH_SETTINGS
    _completion: CompletionIndex | None = field(default=None, init=False, repr=False)

    @classmethod
    def load(cls, path, params: RankingParams = DEFAULT_PARAMS,
             settings: RetrievalSettings = ZBMATH_SETTINGS) -> Engine:
        index, text = load_indexes(path)
        return cls(index, text, params, settings)

    @property
    def completion(self) -> CompletionIndex:
        if self._completion is None:
            self._completion = CompletionIndex(self.index)
        return self._completion

    def stats(self) -> dict:
        out = self.index.stats.as_dict()
        out["shard_label"] = self.index.shard_label
        out["schema_version"] = SCHEMA_VERSION
        return out

    def zipf(self, complexity: int | None = None, shifted: bool = True) -> dict:
        table = rank_table(self.index, complexity)
        out = {"schema_version": SCHEMA_VERSION, "complexity": complexity,
               "shifted": shifted, "n_points": len(table), "fit": None}
        try:
            out["fit"] = fit_zipf(table, shifted).as_dict()
        except InsufficientDataError:
            pass
        return out

    def histogram(self) -> dict:
        rows = [{"complexity": c, "unique": h.unique, "occurrences": h.occurrences, "ratio": h.ratio}
                for c, h in complexity_histogram(self.index).items()]
        return {"schema_version": SCHEMA_VERSION, "histogram": rows}

    def search(self, query: str, limit: int | None = DEFAULT_LIMIT,
               settings: RetrievalSettings | None = None) -> dict:
        if self.text_index is None:
            raise MissingTextIndexError("no text index is loaded")
        settings = settings or self.settings
        res = search(query, settings, self.index, self.text_index, self.params)
        return {
            "schema_version": SCHEMA_VERSION,
            "query": res.query.raw,
            "tokens": list(res.query.tokens),
            "settings": {k: _finite(v) for k, v in asdict(settings).items()},
            "params": {"k": self.params.k, "b": self.params.b},
            "documents": list(res.documents),
            "n_candidates": len(res.mbm25),
            "mbm25": [_scored_row(s) for s in res.mbm25[:limit]],
            "tfidf": [_scored_row(s) for s in res.tfidf[:limit]],
        }

    def facets(self, query: str, top_n: int = 5, settings: RetrievalSettings | None = None) -> dict:
        if self.text_index is None:
            raise MissingTextIndexError("no text index is loaded")
        groups = facet_counts(query, settings or self.settings, self.index, self.text_index, top_n)
        return {
            "schema_version": SCHEMA_VERSION,
            "facets": {str(c): [{"key": k, "count": n} for k, n in rows] for c, rows in groups.items()},
        }

    def complete(self, pattern: str, mode: str = "prefix", symbols=None,
                 limit: int | None = 10) -> dict:
        if mode == "prefix":
            found = self.completion.complete(pattern, limit)
        elif mode == "contains":
            found = self.completion.containing(pattern, symbols or (), limit)
        else:
            raise ValueError(f"unknown completion mode {mode!r}")
        return {
            "schema_version": SCHEMA_VERSION,
            "pattern": pattern,
            "mode": mode,
            "symbols": sorted(_symbol_list(symbols)) if mode == "contains" else None,
            "suggestions": [s.as_dict() for s in found],
        }

    def moi(self, key: str) -> dict:
        deserialize(key)
        rec = self.index.records.get(key)
        if rec is None:
            raise UnknownKeyError(f"unknown key {key!r}")
        return {"schema_version": SCHEMA_VERSION, "key": rec.key, "display": render_text(key),
                "complexity": rec.complexity, "total_tf": rec.total_tf, "df": rec.df}


def _symbol_list(symbols) -> list[str]:
    if symbols is None:
        return []
    if isinstance(symbols, str):
        return [s.strip() for s in symbols.split(",") if s.strip()]
    return list(symbols)
