"""Corpus ingestion: JSON lines -> parsed, filtered formulae -> indexes on disk."""

from __future__ import annotations

import json
import logging
import multiprocessing
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .errors import CorpusFormatError, EmptyExpressionError, MathMLParseError
from .index import CorpusIndex, DocumentIndex, IndexBuilder, ingest_document
from .pmml import filter_formula, parse_mathml
from .storage import load_index, load_json_container, save_index, save_json_container
from .textsearch import TextIndex, analyze

log = logging.getLogger(__name__)

PARSE_ERROR = "parse-error"


@dataclass
class IngestReport:
    documents: int = 0
    skipped_documents: int = 0
    formulae: int = 0
    kept_formulae: int = 0
    rejected: Counter = field(default_factory=Counter)

    @property
    def parse_failures(self) -> int:
        return self.rejected[PARSE_ERROR]

    def as_dict(self) -> dict:
        return {
            "documents": self.documents,
            "skipped_documents": self.skipped_documents,
            "formulae": self.formulae,
            "kept_formulae": self.kept_formulae,
            "rejected": dict(sorted(self.rejected.items())),
        }


@dataclass
class IngestResult:
    index: CorpusIndex
    text_index: TextIndex
    report: IngestReport


@dataclass(frozen=True)
class _Processed:
    doc: DocumentIndex
    tokens: list[str]
    rejected: dict[str, int]


def text_index_path(index_path) -> Path:
    """Location of the prose index that accompanies a formula index."""
    p = Path(index_path)
    return p.with_name(p.name + ".text")


def read_corpus(path) -> Iterator[dict]:
    """Validated document records from a JSON-lines file; blank lines are skipped."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"invalid JSON ({exc.msg})", lineno) from None
            if not isinstance(obj, dict) or not isinstance(obj.get("id"), str):
                raise CorpusFormatError('expected an object with a string "id"', lineno)
            formulae = obj.get("formulae", [])
            if not isinstance(formulae, list) or not all(isinstance(f, str) for f in formulae):
                raise CorpusFormatError('"formulae" must be a list of strings', lineno)
            if not isinstance(obj.get("text", ""), str):
                raise CorpusFormatError('"text" must be a string', lineno)
            yield obj


def process_document(record: dict, strict: bool = False) -> _Processed:
    """Parse, filter and count one corpus record."""
    doc_id = record["id"]
    rejected: Counter[str] = Counter()
    trees = []
    for i, markup in enumerate(record.get("formulae", [])):
        try:
            tree = parse_mathml(markup)
        except (MathMLParseError, EmptyExpressionError) as exc:
            if strict:
                raise MathMLParseError(f"document {doc_id!r}, formula {i}: {exc}") from exc
            log.warning("document %r, formula %d skipped: %s", doc_id, i, exc)
            rejected[PARSE_ERROR] += 1
            continue
        verdict = filter_formula(tree)
        if verdict.keep:
            trees.append(tree)
        else:
            rejected[verdict.reason.value] += 1
    doc = ingest_document(doc_id, trees)
    return _Processed(doc, analyze(record.get("text", "")), dict(rejected))


def _process_strict(record):
    return process_document(record, strict=True)


def _process_lenient(record):
    return process_document(record, strict=False)


def _records(corpus, shard_labels):
    source = read_corpus(corpus) if isinstance(corpus, (str, Path)) else corpus
    wanted = set(shard_labels) if shard_labels else None
    for rec in source:
        if wanted is None or rec.get("category") in wanted:
            yield rec


def ingest(corpus: str | Path | Iterable[dict], workers: int = 1, strict: bool = False,
           shard_labels: Iterable[str] | None = None) -> IngestResult:
    """Build the formula and text indexes of a corpus.

    ``corpus`` is a JSON-lines path or an iterable of document records.  With
    ``shard_labels`` only records whose ``category`` is listed are used; a
    single label becomes the index's shard label.  The result does not depend
    on ``workers``.
    """
    if workers < 1:
        raise ValueError("workers must be at least 1")
    labels = sorted(set(shard_labels)) if shard_labels else None
    builder = IndexBuilder(labels[0] if labels and len(labels) == 1 else None)
    text = TextIndex()
    report = IngestReport()
    func = _process_strict if strict else _process_lenient
    records = _records(corpus, labels)

    def consume(results):
        for res in results:
            builder.add(res.doc)
            text.add_tokens(res.doc.doc_id, res.tokens)
            report.documents += 1
            n_rejected = sum(res.rejected.values())
            report.formulae += res.doc.n_formulae + n_rejected
            report.kept_formulae += res.doc.n_formulae
            report.rejected.update(res.rejected)

    if workers == 1:
        consume(map(func, records))
    else:
        with multiprocessing.get_context().Pool(workers) as pool:
            consume(pool.imap(func, records, chunksize=64))
    return IngestResult(builder.build(), text, report)


def save_indexes(result: IngestResult | tuple[CorpusIndex, TextIndex], path) -> None:
    index, text = (result.index, result.text_index) if isinstance(result, IngestResult) else result
    save_index(index, path)
    save_json_container(text.to_json(), text_index_path(path))


def load_indexes(path) -> tuple[CorpusIndex, TextIndex | None]:
    """Formula index plus its text index, if one was saved next to it."""
    index = load_index(path)
    tpath = text_index_path(path)
    text = TextIndex.from_json(load_json_container(tpath)) if tpath.exists() else None
    return index, text
