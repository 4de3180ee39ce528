"""Extract, count and rank Mathematical Objects of Interest in MathML corpora."""

__version__ = "0.1.0"

from .complete import Suggestion, autocomplete, suggest_containing
from .distribution import (
    RankTable,
    ZipfFit,
    complexity_histogram,
    export_plot_data,
    fit_power_law,
    fit_zipf,
    rank_table,
)
from .errors import MoiError
from .extract import MoiOccurrence, complexity, deserialize, display_key, enumerate_mois, serialize
from .index import (
    CorpusIndex,
    CorpusStats,
    DocumentIndex,
    MoiRecord,
    build_index,
    corpus_stats,
    ingest_document,
    merge_shards,
)
from .pmml import FilterVerdict, MathNode, MathTree, filter_formula, normalize_invisible_operators, parse_mathml
from .ranking import (
    RankingParams,
    ScoredMoi,
    idf,
    itf,
    max_tfidf,
    mbm25,
    okapi_bm25,
    score_std,
    tfidf_normalized,
)
from .retrieval import RetrievalSettings, facet_counts, retrieve_mois
from .storage import export_tsv, load_index, save_index
from .textsearch import TextIndex, TextQuery, build_text_index, search_documents

__all__ = [
    "CorpusIndex", "CorpusStats", "DocumentIndex", "FilterVerdict", "MathNode", "MathTree",
    "MoiError", "MoiOccurrence", "MoiRecord", "RankTable", "RankingParams", "RetrievalSettings",
    "ScoredMoi", "Suggestion", "TextIndex", "TextQuery", "ZipfFit", "autocomplete",
    "build_index", "build_text_index", "complexity", "complexity_histogram", "corpus_stats",
    "deserialize", "display_key", "enumerate_mois", "export_plot_data", "export_tsv",
    "facet_counts", "filter_formula", "fit_power_law", "fit_zipf", "idf", "ingest_document",
    "itf", "load_index", "max_tfidf", "mbm25", "merge_shards", "normalize_invisible_operators",
    "okapi_bm25", "parse_mathml", "rank_table", "retrieve_mois", "save_index", "score_std",
    "search_documents", "serialize", "suggest_containing", "tfidf_normalized",
]
