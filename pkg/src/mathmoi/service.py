"""Read-only JSON/HTTP query service.

Responses are exactly the JSON the CLI prints with ``--format json``.  The
indexes are loaded on a background thread; until that finishes every request
gets 503.
"""

from __future__ import annotations

import logging
import threading
from http import HTTPStatus
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, unquote, urlsplit

from .api import DEFAULT_LIMIT, Engine, MissingTextIndexError, UnknownKeyError, dumps_json
from .errors import EmptyQueryError, KeyDecodeError, MoiError, PatternError
from .ranking import DEFAULT_PARAMS, RankingParams
from .retrieval import ZBMATH_SETTINGS, RetrievalSettings

log = logging.getLogger(__name__)


class BadRequest(Exception):
    pass


def _int_param(qs, name, default):
    raw = qs.get(name, [None])[0]
    if raw is None or raw == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise BadRequest(f"{name} must be an integer") from None
    if value < 1:
        raise BadRequest(f"{name} must be positive")
    return value


def _route(engine: Engine, path: str, qs: dict) -> dict:
    if path == "/stats":
        return engine.stats()
    if path == "/zipf":
        return engine.zipf(_int_param(qs, "complexity", None))
    if path == "/histogram":
        return engine.histogram()
    if path == "/search":
        q = qs.get("q", [""])[0]
        if not q.strip():
            raise BadRequest("missing query parameter q")
        return engine.search(q, _int_param(qs, "k", DEFAULT_LIMIT))
    if path == "/facets":
        q = qs.get("q", [""])[0]
        if not q.strip():
            raise BadRequest("missing query parameter q")
        return engine.facets(q, _int_param(qs, "n", 5))
    if path == "/complete":
        p = qs.get("p", [""])[0]
        if not p.strip():
            raise BadRequest("missing query parameter p")
        mode = qs.get("mode", ["prefix"])[0]
        if mode not in ("prefix", "contains"):
            raise BadRequest(f"unknown mode {mode!r}")
        symbols = qs.get("symbols", [None])[0]
        if mode == "contains" and not symbols:
            raise BadRequest("contains mode needs symbols")
        return engine.complete(p, mode, symbols, _int_param(qs, "limit", 10))
    if path.startswith("/moi/"):
        return engine.moi(unquote(path[len("/moi/"):]))
    raise LookupError(path)


class MoiServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address, index_path, params: RankingParams = DEFAULT_PARAMS,
                 settings: RetrievalSettings = ZBMATH_SETTINGS):
        super().__init__(address, MoiRequestHandler)
        self.engine: Engine | None = None
        self.load_error: Exception | None = None
        self.ready = threading.Event()
        self._loader = threading.Thread(target=self._load, args=(Path(index_path), params, settings),
                                        daemon=True)
        self._loader.start()

    def _load(self, path, params, settings):
        try:
            engine = Engine.load(path, params, settings)
            engine.completion  # build the autocomplete table before serving
            self.engine = engine
            log.info("loaded %s (%d keys)", path, len(engine.index.records))
        except Exception as exc:  # reported to clients as 503
            log.error("cannot load %s: %s", path, exc)
            self.load_error = exc
        finally:
            self.ready.set()


class MoiRequestHandler(BaseHTTPRequestHandler):
    server: MoiServer
    server_version = "mathmoi"

    def log_message(self, format, *args):
        log.debug("%s " + format, self.address_string(), *args)

    def _send(self, status: HTTPStatus, body: str) -> None:
        data = body.encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def _error(self, status: HTTPStatus, message: str) -> None:
        self._send(status, dumps_json({"error": message, "status": int(status)}))

    def do_GET(self):
        engine = self.server.engine
        if engine is None:
            msg = "index failed to load" if self.server.load_error else "index is loading"
            self._error(HTTPStatus.SERVICE_UNAVAILABLE, msg)
            return
        url = urlsplit(self.path)
        qs = parse_qs(url.query, keep_blank_values=True)
        try:
            payload = _route(engine, url.path, qs)
        except LookupError:
            self._error(HTTPStatus.NOT_FOUND, f"no such endpoint {url.path}")
        except UnknownKeyError as exc:
            self._error(HTTPStatus.NOT_FOUND, str(exc))
        except MissingTextIndexError as exc:
            self._error(HTTPStatus.SERVICE_UNAVAILABLE, str(exc))
        except (BadRequest, EmptyQueryError, PatternError, KeyDecodeError) as exc:
            self._error(HTTPStatus.BAD_REQUEST, str(exc))
        except MoiError as exc:
            self._error(HTTPStatus.INTERNAL_SERVER_ERROR, str(exc))
        else:
            self._send(HTTPStatus.OK, dumps_json(payload))


def make_server(index_path, host: str = "127.0.0.1", port: int = 0,
                params: RankingParams = DEFAULT_PARAMS,
                settings: RetrievalSettings = ZBMATH_SETTINGS) -> MoiServer:
    """Bound server whose indexes load in the background; call ``serve_forever``."""
    return MoiServer((host, port), index_path, params, settings)


def serve(index_path, host: str = "127.0.0.1", port: int = 8080,
          params: RankingParams = DEFAULT_PARAMS, settings: RetrievalSettings = ZBMATH_SETTINGS) -> None:
    server = make_server(index_path, host, port, params, settings)
    log.warning("serving on http://%s:%d", *server.server_address[:2])
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
