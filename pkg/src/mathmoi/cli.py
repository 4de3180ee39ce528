"""``mathmoi`` command-line interface.

Exit codes:

====  ==============================================================
0     success
1     other library error
2     usage error
3     I/O error (unreadable corpus, missing or unwritable index)
4     corpus or MathML parse error
5     every formula of a non-empty corpus was filtered out
6     index file damaged or from another format version
7     query without searchable terms
8     malformed autocomplete pattern or key
9     unknown key
====  ==============================================================
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .api import DEFAULT_LIMIT, Engine, MissingTextIndexError, UnknownKeyError, dumps_json
from .distribution import complexity_histogram, export_plot_data, fit_zipf, rank_table
from .errors import (
    CorpusFormatError,
    EmptyQueryError,
    IndexFormatError,
    InsufficientDataError,
    KeyDecodeError,
    MathMLParseError,
    MoiError,
    PatternError,
)
from .pipeline import PARSE_ERROR, ingest, save_indexes
from .ranking import RankingParams
from .retrieval import PRESETS, RetrievalSettings
from .storage import export_tsv

log = logging.getLogger("mathmoi")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_PARSE = 4
EXIT_ALL_FILTERED = 5
EXIT_INDEX = 6
EXIT_EMPTY_QUERY = 7
EXIT_PATTERN = 8
EXIT_NOT_FOUND = 9

INDEX_ENV = "MOI_INDEX_PATH"
HISTOGRAM_COMPLEXITIES = range(1, 6)

STATS_LABELS = [
    ("documents", "Documents"),
    ("formulae", "Formulae"),
    ("subexpressions", "Subexpressions"),
    ("unique_subexpressions", "Unique subexpressions"),
    ("average_document_length", "Average document length"),
    ("average_complexity", "Average complexity"),
    ("maximum_complexity", "Maximum complexity"),
]


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _positive_int(text):
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return n


def _max_df(text):
    return float("inf") if text.lower() in ("inf", "none") else float(text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--index", default=os.environ.get(INDEX_ENV),
                        help=f"index file (default: ${INDEX_ENV})")
    common.add_argument("--format", choices=("json", "tsv", "table"), default="table")
    common.add_argument("--log-level", default="WARNING")

    scoring = argparse.ArgumentParser(add_help=False)
    scoring.add_argument("--k", type=float, default=1.2, help="BM25 saturation (default 1.2)")
    scoring.add_argument("--b", type=float, default=0.95, help="BM25 length weight (default 0.95)")
    scoring.add_argument("--preset", choices=sorted(PRESETS), default="zbmath",
                         help="retrieval settings preset (default zbmath)")
    scoring.add_argument("--retrieved-docs", type=_positive_int)
    scoring.add_argument("--min-hit-freq", type=_positive_int)
    scoring.add_argument("--min-df", type=int)
    scoring.add_argument("--max-df", type=_max_df)
    scoring.add_argument("--min-complexity", type=_positive_int)

    p = argparse.ArgumentParser(prog="mathmoi", description="Index and rank mathematical subexpressions.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ingest", parents=[common], help="build indexes from a JSON-lines corpus")
    s.add_argument("--corpus", required=True)
    s.add_argument("--workers", type=_positive_int, default=1)
    s.add_argument("--strict", action="store_true", help="abort on the first unparsable formula")
    s.add_argument("--shard", action="append", dest="shards", metavar="LABEL",
                   help="only ingest documents of this category (repeatable)")

    s = sub.add_parser("stats", parents=[common], help="corpus overview")
    s.add_argument("--records", metavar="PATH", help="also write the key/complexity/tf/df TSV here")

    s = sub.add_parser("zipf", parents=[common], help="fit a shifted power law to the rank-frequency data")
    s.add_argument("--complexity", type=_positive_int)
    s.add_argument("--unshifted", action="store_true", help="fix beta at 0")
    s.add_argument("--csv", metavar="PATH", help="write rank, frequency and model values")

    s = sub.add_parser("histogram", parents=[common], help="unique subexpressions per complexity")
    s.add_argument("--out-dir", metavar="DIR", help="write histogram.csv and rank tables c1..c5")

    s = sub.add_parser("search", parents=[common, scoring], help="rank subexpressions for a text query")
    s.add_argument("query")
    s.add_argument("--limit", type=_positive_int, default=DEFAULT_LIMIT)
    s.add_argument("--facets", action="store_true", help="report per-complexity counts instead")

    s = sub.add_parser("complete", parents=[common], help="suggest indexed formulae for a pattern")
    s.add_argument("pattern")
    s.add_argument("--mode", choices=("prefix", "contains"), default="prefix")
    s.add_argument("--symbols", help="comma-separated identifiers required by contains mode")
    s.add_argument("--limit", type=_positive_int, default=10)

    s = sub.add_parser("lookup", parents=[common], help="show the record of one key")
    s.add_argument("key")

    s = sub.add_parser("serve", parents=[common, scoring], help="run the JSON/HTTP query service")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8080)
    return p


def settings_from_args(args) -> RetrievalSettings:
    base = PRESETS[args.preset]
    try:
        return base.with_overrides(retrieved_docs=args.retrieved_docs, min_hit_freq=args.min_hit_freq,
                                   min_df=args.min_df, max_df=args.max_df,
                                   min_complexity=args.min_complexity)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None


def params_from_args(args) -> RankingParams:
    try:
        return RankingParams(k=args.k, b=args.b)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None


def _index_path(args) -> Path:
    if not args.index:
        raise CliError(f"no index given; use --index or set {INDEX_ENV}", EXIT_USAGE)
    return Path(args.index)


def load_engine(args) -> Engine:
    path = _index_path(args)
    if not path.exists():
        raise CliError(f"index {path} does not exist", EXIT_IO)
    params = params_from_args(args) if hasattr(args, "k") else RankingParams()
    settings = settings_from_args(args) if hasattr(args, "preset") else PRESETS["zbmath"]
    return Engine.load(path, params, settings)


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".4f")
    return "" if v is None else str(v)


def _table(header, rows) -> str:
    cells = [[str(h) for h in header]] + [[_fmt(v) for v in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _tsv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, delimiter="\t", lineterminator="\n")
    w.writerow(header)
    w.writerows([[("" if v is None else v) for v in r] for r in rows])
    return buf.getvalue()


def emit(args, payload: dict, header=None, rows=None) -> None:
    if args.format == "json" or header is None:
        sys.stdout.write(dumps_json(payload))
    elif args.format == "tsv":
        sys.stdout.write(_tsv(header, rows))
    else:
        sys.stdout.write(_table(header, rows))


def stats_report(stats: dict) -> str:
    """Two-column overview in the layout of a dataset summary table."""
    width = max(len(label) for _, label in STATS_LABELS)
    out = []
    for field, label in STATS_LABELS:
        v = stats[field]
        text = format(v, ",.2f") if isinstance(v, float) else format(v, ",")
        out.append(f"{label.ljust(width)}  {text:>14}")
    return "\n".join(out) + "\n"


def _emit_stats(args, stats: dict) -> None:
    if args.format == "table":
        sys.stdout.write(stats_report(stats))
    else:
        emit(args, stats, ["field", "value"], [[f, stats[f]] for f, _ in STATS_LABELS])


def cmd_ingest(args) -> int:
    path = _index_path(args)
    result = ingest(args.corpus, workers=args.workers, strict=args.strict, shard_labels=args.shards)
    save_indexes(result, path)
    engine = Engine(result.index, result.text_index)
    _emit_stats(args, engine.stats())
    rep = result.report
    for reason, n in sorted(rep.rejected.items()):
        log.warning("%d formulae rejected: %s", n, reason)
    if rep.formulae and not rep.kept_formulae:
        if rep.parse_failures == rep.formulae:
            print("error: no formula of the corpus could be parsed", file=sys.stderr)
            return EXIT_PARSE
        print("error: every formula of the corpus was filtered out", file=sys.stderr)
        return EXIT_ALL_FILTERED
    if rep.rejected:
        print(f"note: {sum(rep.rejected.values())} of {rep.formulae} formulae skipped "
              f"({rep.rejected.get(PARSE_ERROR, 0)} unparsable)", file=sys.stderr)
    return EXIT_OK


def cmd_stats(args) -> int:
    engine = load_engine(args)
    _emit_stats(args, engine.stats())
    if args.records:
        export_tsv(engine.index, args.records)
    return EXIT_OK


def cmd_zipf(args) -> int:
    engine = load_engine(args)
    payload = engine.zipf(args.complexity, shifted=not args.unshifted)
    fit = payload["fit"]
    if fit is None:
        print(f"warning: only {payload['n_points']} ranks, too few to fit", file=sys.stderr)
    if args.csv:
        table = rank_table(engine.index, args.complexity)
        try:
            model = fit_zipf(table, not args.unshifted)
        except InsufficientDataError:
            model = None
        export_plot_data(table, args.csv, fit=model, with_complexity=True)
    rows = [[k, fit[k]] for k in ("alpha", "beta", "constant", "fit_error", "n_points")] if fit else []
    emit(args, payload, ["field", "value"], rows)
    return EXIT_OK


def cmd_histogram(args) -> int:
    engine = load_engine(args)
    payload = engine.histogram()
    if not engine.index.records:
        print("warning: the index is empty", file=sys.stderr)
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        export_plot_data(complexity_histogram(engine.index), out / "histogram.csv")
        for c in HISTOGRAM_COMPLEXITIES:
            export_plot_data(rank_table(engine.index, c), out / f"c{c}.csv")
    rows = [[r["complexity"], r["unique"], r["occurrences"], r["ratio"]] for r in payload["histogram"]]
    emit(args, payload, ["complexity", "unique", "occurrences", "ratio"], rows)
    return EXIT_OK


def cmd_search(args) -> int:
    engine = load_engine(args)
    if args.facets:
        payload = engine.facets(args.query)
        rows = [[c, r["key"], r["count"]] for c, group in payload["facets"].items() for r in group]
        emit(args, payload, ["complexity", "key", "count"], rows)
        return EXIT_OK
    payload = engine.search(args.query, args.limit)
    base = {r["key"]: r["score"] for r in payload["tfidf"]}
    rows = [[i, r["display"], r["score"], base.get(r["key"]), r["df"], r["hit_count"], r["best_doc"]]
            for i, r in enumerate(payload["mbm25"], 1)]
    emit(args, payload, ["rank", "expression", "mbm25", "tfidf", "df", "hits", "best_doc"], rows)
    return EXIT_OK


def cmd_complete(args) -> int:
    engine = load_engine(args)
    if args.mode == "contains" and not args.symbols:
        raise CliError("contains mode needs --symbols", EXIT_USAGE)
    payload = engine.complete(args.pattern, args.mode, args.symbols, args.limit)
    rows = [[s["display"], s["tf"], s["df"], s["key"]] for s in payload["suggestions"]]
    emit(args, payload, ["expression", "tf", "df", "key"], rows)
    return EXIT_OK


def cmd_lookup(args) -> int:
    engine = load_engine(args)
    payload = engine.moi(args.key)
    rows = [[k, payload[k]] for k in ("key", "display", "complexity", "total_tf", "df")]
    emit(args, payload, ["field", "value"], rows)
    return EXIT_OK


def cmd_serve(args) -> int:
    from .service import serve
    path = _index_path(args)
    serve(path, args.host, args.port, params_from_args(args), settings_from_args(args))
    return EXIT_OK


COMMANDS = {
    "ingest": cmd_ingest,
    "stats": cmd_stats,
    "zipf": cmd_zipf,
    "histogram": cmd_histogram,
    "search": cmd_search,
    "complete": cmd_complete,
    "lookup": cmd_lookup,
    "serve": cmd_serve,
}

_ERROR_CODES = [
    (EmptyQueryError, EXIT_EMPTY_QUERY),
    (PatternError, EXIT_PATTERN),
    (KeyDecodeError, EXIT_PATTERN),
    (UnknownKeyError, EXIT_NOT_FOUND),
    (IndexFormatError, EXIT_INDEX),
    (CorpusFormatError, EXIT_PARSE),
    (MathMLParseError, EXIT_PARSE),
    (MissingTextIndexError, EXIT_IO),
    (MoiError, EXIT_ERROR),
]


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except MoiError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return next(code for cls, code in _ERROR_CODES if isinstance(exc, cls))


if __name__ == "__main__":
    sys.exit(main())
