import json
import os

import pytest
from fastapi.testclient import TestClient
from jsonschema import validate

from soda.service import create_app

SCHEMAS = os.path.join(os.path.dirname(__file__), "..", "src", "soda", "schemas")


def _schema(name):
    with open(os.path.join(SCHEMAS, name)) as fh:
        return json.load(fh)


@pytest.fixture(scope="module")
def client(qald_session):
    return TestClient(create_app(qald_session), raise_server_exceptions=False)


def test_health_ok(client):
    response = client.get("/api/health")
    assert response.status_code == 200
    payload = response.json()
    assert payload == {"status": "ok", "dataset": "micro-qald"}
    validate(payload, _schema("health_response.schema.json"))


def test_health_before_initialization_is_503():
    bare = TestClient(create_app(None))
    response = bare.get("/api/health")
    assert response.status_code == 503
    validate(response.json(), _schema("health_response.schema.json"))


def test_ask_figure_question(client):
    response = client.post(
        "/api/ask",
        json={"question": "What are the drugs for diseases associated with the BRCA genes?"},
    )
    assert response.status_code == 200
    payload = response.json()
    validate(payload, _schema("ask_response.schema.json"))
    first = payload["interpretations"][0]
    assert 'FILTER(regex(?genes_match, "brca", "i"))' in first["sparql"]
    assert first["rank"] == 1 and first["empty"] is False
    token_texts = [t["text"] for t in payload["tokens"]]
    assert token_texts == ["drugs", "diseases", "BRCA", "genes"]


def test_ask_empty_body_is_400(client):
    assert client.post("/api/ask", content=b"").status_code == 400
    assert client.post("/api/ask", json={}).status_code == 400
    assert client.post("/api/ask", json={"question": "   "}).status_code == 400


def test_ask_unmatched_question_is_422(client):
    response = client.post("/api/ask", json={"question": "florble wumpus zonk"})
    assert response.status_code == 422
    payload = response.json()
    assert payload["skipped"] == ["florble", "wumpus", "zonk"]


def test_ask_top_n_validation(client):
    assert (
        client.post("/api/ask", json={"question": "drugs", "top_n": 0}).status_code
        == 400
    )
    response = client.post(
        "/api/ask", json={"question": "Which drugs are used for asthma?", "top_n": 1}
    )
    assert response.status_code == 200
    assert len(response.json()["interpretations"]) == 1


def test_schema_endpoint(client, qald_session):
    response = client.get("/api/schema")
    assert response.status_code == 200
    payload = response.json()
    validate(payload, _schema("schema_response.schema.json"))
    assert sorted(payload["classes"]) == sorted(qald_session.schema.classes)
    assert len(payload["edges"]) == len(qald_session.schema.edges)


def test_config_endpoint(client):
    response = client.get("/api/config")
    assert response.status_code == 200
    payload = response.json()
    validate(payload, _schema("config_response.schema.json"))
    assert payload["config"]["match.alpha"] == 0.7


def test_cli_and_api_return_identical_interpretations(client, qald_session):
    from soda.cli import _results_json

    question = "Which drugs are used for asthma?"
    api = client.post("/api/ask", json={"question": question}).json()["interpretations"]
    cli = _results_json(qald_session.answer(question))
    assert api == cli


def test_requests_are_idempotent(client):
    question = "Which drugs are used for asthma?"
    first = client.post("/api/ask", json={"question": question}).json()
    second = client.post("/api/ask", json={"question": question}).json()
    assert first == second


def test_static_ui_served_when_configured(qald_session, tmp_path):
    (tmp_path / "index.html").write_text("<!doctype html><title>soda</title>")
    app = create_app(qald_session, static_dir=str(tmp_path))
    client = TestClient(app)
    response = client.get("/")
    assert response.status_code == 200
    assert "soda" in response.text
    assert client.get("/api/health").status_code == 200
