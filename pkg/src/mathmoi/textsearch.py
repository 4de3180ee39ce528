"""Prose analysis and BM25 document search used to select topic-specific subsets."""

from __future__ import annotations

import math
import re
import threading
import unicodedata
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Iterable

import snowballstemmer

from .errors import EmptyQueryError

TEXT_K = 1.2
TEXT_B = 0.75

_TOKEN = re.compile(r"[a-z0-9]+")
_FOLD = str.maketrans({
    "ß": "ss", "æ": "ae", "œ": "oe", "ø": "o", "ł": "l", "đ": "d", "ð": "d",
    "þ": "th", "ı": "i", "ħ": "h", "ŀ": "l", "ĸ": "k", "ŋ": "n", "ſ": "s",
    "Æ": "AE", "Œ": "OE", "Ø": "O", "Ł": "L", "Đ": "D", "Ð": "D", "Þ": "TH", "Ħ": "H",
    "Ŀ": "L", "Ŋ": "N",
})


def _load_stopwords() -> frozenset[str]:
    text = resources.files("mathmoi").joinpath("data/stopwords.txt").read_text("utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip() and not w.startswith("#"))


STOPWORDS = _load_stopwords()

_stemmer = snowballstemmer.stemmer("porter")
_stem_lock = threading.Lock()


@lru_cache(maxsize=65536)
def stem(word: str) -> str:
    """Porter stem, reapplied until it no longer changes the word.

    Iterating makes the analyzer idempotent; a word the stemmer would erase
    entirely (``s``) is kept as is.
    """
    with _stem_lock:
        for _ in range(8):
            out = _stemmer.stemWord(word)
            if out == word or not out:
                break
            word = out
    return word


def ascii_fold(text: str) -> str:
    """Replace non-ASCII characters by ASCII counterparts, dropping the rest."""
    decomposed = unicodedata.normalize("NFKD", text.translate(_FOLD))
    return decomposed.encode("ascii", "ignore").decode("ascii")


def analyze(text: str) -> list[str]:
    """lowercase -> ASCII folding -> tokenize -> stop words -> stemming."""
    out = []
    for tok in _TOKEN.findall(ascii_fold(text.lower())):
        if tok in STOPWORDS:
            continue
        s = stem(tok)
        if s not in STOPWORDS:
            out.append(s)
    return out


@dataclass(frozen=True)
class TextQuery:
    raw: str
    tokens: tuple[str, ...]

    @classmethod
    def parse(cls, raw: str) -> TextQuery:
        tokens = tuple(analyze(raw))
        if not tokens:
            raise EmptyQueryError(f"query {raw!r} has no searchable terms")
        return cls(raw, tokens)


@dataclass
class TextIndex:
    postings: dict[str, dict[str, int]] = field(default_factory=dict)
    doc_lengths: dict[str, int] = field(default_factory=dict)

    def add(self, doc_id: str, text: str) -> None:
        self.add_tokens(doc_id, analyze(text))

    def add_tokens(self, doc_id: str, tokens: list[str]) -> None:
        """Index an already analyzed token stream."""
        if doc_id in self.doc_lengths:
            raise ValueError(f"document {doc_id!r} already indexed")
        self.doc_lengths[doc_id] = len(tokens)
        for tok in tokens:
            bucket = self.postings.setdefault(tok, {})
            bucket[doc_id] = bucket.get(doc_id, 0) + 1

    @property
    def n_documents(self) -> int:
        return len(self.doc_lengths)

    @property
    def avg_length(self) -> float:
        return sum(self.doc_lengths.values()) / len(self.doc_lengths) if self.doc_lengths else 0.0

    def scores(self, query: TextQuery, k: float = TEXT_K, b: float = TEXT_B) -> dict[str, float]:
        """Okapi BM25 of every document matching at least one query token.

        The IDF is ``ln(1 + (N - n + 1/2) / (n + 1/2))`` as in Lucene, so a
        token present in most documents still counts positively.
        """
        n = self.n_documents
        avg = self.avg_length
        out: dict[str, float] = {}
        for tok in dict.fromkeys(query.tokens):
            posting = self.postings.get(tok)
            if not posting:
                continue
            df = len(posting)
            w = math.log(1 + (n - df + 0.5) / (df + 0.5))
            for doc_id, tf in posting.items():
                norm = tf + k * (1 - b + b * self.doc_lengths[doc_id] / avg)
                out[doc_id] = out.get(doc_id, 0.0) + (k + 1) * w * tf / norm
        return out

    def search(self, query: TextQuery | str, top_k: int) -> list[str]:
        if isinstance(query, str):
            query = TextQuery.parse(query)
        ranked = sorted(self.scores(query).items(), key=lambda kv: (-kv[1], kv[0]))
        return [doc_id for doc_id, _ in ranked[:top_k]]

    def to_json(self) -> dict:
        return {"postings": self.postings, "doc_lengths": self.doc_lengths}

    @classmethod
    def from_json(cls, obj: dict) -> TextIndex:
        return cls(obj["postings"], obj["doc_lengths"])


def build_text_index(documents: Iterable[tuple[str, str]]) -> TextIndex:
    index = TextIndex()
    for doc_id, text in documents:
        index.add(doc_id, text)
    return index


def search_documents(query: TextQuery | str, top_k: int, index: TextIndex) -> list[str]:
    return index.search(query, top_k)
