import json
import threading
import urllib.error
import urllib.request
from urllib.parse import quote

import pytest

from mathmoi import service
from mathmoi.api import Engine, dumps_json
from mathmoi.pipeline import ingest, save_indexes
from mathmoi.retrieval import RetrievalSettings


def get(server, path):
    host, port = server.server_address[:2]
    try:
        with urllib.request.urlopen(f"http://{host}:{port}{path}", timeout=10) as resp:
            return resp.status, resp.read()
    except urllib.error.HTTPError as exc:
        return exc.code, exc.read()


def start(server):
    threading.Thread(target=server.serve_forever, daemon=True).start()
    return server


@pytest.fixture(scope="module")
def jacobi_path(tmp_path_factory, fixtures_dir):
    path = tmp_path_factory.mktemp("svc") / "j.moi"
    save_indexes(ingest(fixtures_dir / "jacobi_corpus.jsonl"), path)
    return path


@pytest.fixture(scope="module")
def server(jacobi_path):
    srv = start(service.make_server(jacobi_path, settings=RetrievalSettings(10, 1, 1)))
    assert srv.ready.wait(10)
    yield srv
    srv.shutdown()
    srv.server_close()


def test_503_while_loading(jacobi_path, monkeypatch):
    gate = threading.Event()
    real = Engine.load

    def slow_load(*args, **kwargs):
        gate.wait(10)
        return real(*args, **kwargs)

    monkeypatch.setattr(service.Engine, "load", slow_load)
    srv = start(service.make_server(jacobi_path))
    try:
        status, body = get(srv, "/stats")
        assert status == 503
        assert json.loads(body)["status"] == 503
        gate.set()
        assert srv.ready.wait(10)
        assert get(srv, "/stats")[0] == 200
    finally:
        gate.set()
        srv.shutdown()
        srv.server_close()


def test_failed_load_stays_503(tmp_path):
    srv = start(service.make_server(tmp_path / "missing.moi"))
    try:
        assert srv.ready.wait(10)
        status, body = get(srv, "/stats")
        assert status == 503 and "failed" in json.loads(body)["error"]
    finally:
        srv.shutdown()
        srv.server_close()


def test_moi_lookup(server):
    status, body = get(server, "/moi/" + quote("mi:x", safe=""))
    assert status == 200
    assert json.loads(body) == {"complexity": 1, "df": 3, "display": "x", "key": "mi:x",
                                "schema_version": 1, "total_tf": 3}


def test_unknown_key_and_endpoint(server):
    assert get(server, "/moi/" + quote("mi:q", safe=""))[0] == 404
    assert get(server, "/nowhere")[0] == 404
    assert get(server, "/moi/" + quote("mrow(", safe=""))[0] == 400


def test_bad_requests(server):
    assert get(server, "/search?q=")[0] == 400
    assert get(server, "/search")[0] == 400
    assert get(server, "/search?q=the")[0] == 400
    assert get(server, "/search?q=jacobi&k=zero")[0] == 400
    assert get(server, "/complete?p=E%20%3D%20%7B")[0] == 400
    assert get(server, "/complete?p=x&mode=contains")[0] == 400
    assert get(server, "/complete?p=x&mode=sideways")[0] == 400


def test_stats_shape(server, jacobi_path):
    status, body = get(server, "/stats")
    assert status == 200
    payload = json.loads(body)
    assert payload["unique_subexpressions"] == 9
    assert payload["schema_version"] == 1
    assert body.decode() == dumps_json(Engine.load(jacobi_path).stats())


def test_search_and_complete(server):
    status, body = get(server, "/search?q=jacobi+polynomials&k=3")
    payload = json.loads(body)
    assert status == 200 and len(payload["mbm25"]) == 3
    status, body = get(server, "/complete?p=P&limit=2")
    assert status == 200 and len(json.loads(body)["suggestions"]) <= 2
    status, body = get(server, "/facets?q=jacobi&n=1")
    assert status == 200 and all(len(v) <= 1 for v in json.loads(body)["facets"].values())
    assert get(server, "/histogram")[0] == 200
    assert get(server, "/zipf?complexity=1")[0] == 200


def test_missing_text_index_is_503(tmp_path, fixtures_dir):
    save_indexes(ingest(fixtures_dir / "jacobi_corpus.jsonl"), tmp_path / "j.moi")
    (tmp_path / "j.moi.text").unlink()
    srv = start(service.make_server(tmp_path / "j.moi"))
    try:
        assert srv.ready.wait(10)
        assert get(srv, "/stats")[0] == 200
        assert get(srv, "/search?q=jacobi")[0] == 503
    finally:
        srv.shutdown()
        srv.server_close()
