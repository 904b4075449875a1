# TO RUN TEST: PYTHONPATH=src poetry run python -m pytest tests/api/integration.py -q
import pytest
from fastapi.testclient import TestClient

from api.server import app, get_eval_service
from config import SuiteConfig
from db.driver import cache_url, create_tables, make_engine, make_session_factory, session_scope
from db.system_store import MakeSystemStore, cached_system_loader
from services.eval_service import MakeEvalService


@pytest.fixture
def session_factory(tmp_path):
    eng = make_engine(cache_url(tmp_path / "cache"), echo=False)
    create_tables(eng)
    return make_session_factory(eng)


@pytest.fixture
def client(session_factory):
    svc = MakeEvalService(system_loader=cached_system_loader(session_factory))
    app.dependency_overrides[get_eval_service] = lambda: svc
    yield TestClient(app)
    app.dependency_overrides.clear()


def test_eval_integration(client, session_factory):
    """Integration test for /eval with the real evaluator and a sqlite system cache."""
    resp = client.post("/eval", json={"case": "I-A2", "expression": "nf(E1*F1)"})
    assert resp.status_code == 200
    assert resp.json()["rendered"] == "F1*E1 + (K1 - K1^-1)/(q - q^-1)"

    # Serre relator vanishes
    serre = "E1*E1*E2 - [2]*E1*E2*E1 + E2*E1*E1"
    resp = client.post("/eval", json={"case": "I-A2", "expression": serre})
    assert resp.status_code == 200
    assert resp.json()["is_zero"] is True

    # completed systems were written through to the cache
    with session_scope(session_factory) as s:
        assert MakeSystemStore(s).count() > 0


def test_eval_integration_errors(client):
    resp = client.post("/eval", json={"case": "I-A2", "expression": "E1*(F1"})
    assert resp.status_code == 400
    assert resp.json()["detail"]["position"] == 6

    resp = client.post("/eval", json={"case": "I-A2", "expression": "E3"})
    assert resp.status_code == 400


def test_run_suite_integration(monkeypatch):
    """Integration test for /suites/run with the local suite runner."""
    monkeypatch.setattr("api.server.settings", SuiteConfig(cache_dir=None))
    resp = TestClient(app).post("/suites/run", json={"suite": "I-B2", "checks": ["relations", "coideal"]})
    assert resp.status_code == 200
    body = resp.json()
    assert body["suite"] == "I-B2"
    assert body["failed"] == 0
    assert body["passed"] == len(body["rows"])
    assert {row["check"] for row in body["rows"]} == {"relations", "coideal"}
