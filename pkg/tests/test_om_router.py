import pytest
from fastapi.testclient import TestClient

from app.main import app

PAPER4_MATRIX = "2 4\n1 1 1 1\n-1 -2 -3 -4\n"


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


@pytest.fixture(scope="module")
def paper4_text(paper4_path):
    with open(paper4_path, encoding="utf-8") as fh:
        return fh.read()


@pytest.fixture(scope="module")
def tri_text(client):
    response = client.get("/om/instances/tri")
    assert response.status_code == 200
    return response.json()["data"]["sv"]


def test_home(client):
    response = client.get("/")
    assert response.status_code == 200
    assert "OM" in response.text


def test_classify(client, paper4_text):
    response = client.post("/om/classify", json={"text": paper4_text})
    assert response.status_code == 200
    body = response.json()
    assert body["status"] == "success"
    assert body["data"]["verdict"] == "OM"
    assert body["data"]["elements"] == ["1", "2", "3", "4"]


def test_rank_from_matrix(client):
    response = client.post("/om/rank", json={"text": PAPER4_MATRIX, "format": "matrix"})
    assert response.status_code == 200
    assert response.json()["data"]["rank"] == 2


def test_parse_error_is_422(client):
    response = client.post("/om/classify", json={"text": "+-\n+x\n"})
    assert response.status_code == 422
    assert response.json()["detail"]["error"] == "ParseError"


def test_missing_field_is_422(client):
    assert client.post("/om/classify", json={}).status_code == 422


def test_enumeration_cap_is_422(client):
    response = client.post("/om/classify", json={"text": PAPER4_MATRIX, "format": "matrix", "max_universe": 3})
    assert response.status_code == 422
    assert response.json()["detail"]["error"] == "UniverseTooLarge"


def test_program_solve(client, tri_text):
    payload = {"text": tri_text, "g": "g", "f": "1", "constraints": {"1": "+", "2": "+", "3": "-"}}
    response = client.post("/om/program-solve", json=payload)
    assert response.status_code == 200
    data = response.json()["data"]
    assert data["solution"] == "0+0+"
    assert data["in_degree"] == 0


def test_unbounded_program_is_409(client, tri_text):
    response = client.post("/om/program-solve", json={"text": tri_text, "g": "g", "f": "3"})
    assert response.status_code == 409
    assert response.json()["detail"]["error"] == "Unbounded"


def test_scheme_verify(client, paper4_text, table1_path):
    with open(table1_path, encoding="utf-8") as fh:
        scheme = fh.read()
    response = client.post("/om/scheme-verify", json={"class_text": paper4_text, "scheme": scheme, "size": 2})
    assert response.status_code == 200
    data = response.json()["data"]
    assert data["passed"] is True
    assert data["samples_checked"] == 65


def test_scheme_build(client, paper4_text):
    response = client.post("/om/scheme-build", json={"text": paper4_text})
    assert response.status_code == 200
    data = response.json()["data"]
    assert data["scheme"]["size"] == 2
    assert data["trace"][0].startswith("corner=")


def test_instances(client):
    response = client.get("/om/instances/cube(2)", params={"matrix": "false"})
    assert response.status_code == 200
    data = response.json()["data"]
    assert data["covectors"] == 9
    assert data["rank"] == 2
    assert data["g"] is None
    assert "matrix" not in data


def test_unknown_instance_is_400(client):
    response = client.get("/om/instances/cycle(99)")
    assert response.status_code == 400
    assert response.json()["detail"]["error"] == "UnknownKey"


def test_gen(client):
    response = client.post("/om/gen", json={"keys": ["path(3)"], "matrix": True})
    assert response.status_code == 200
    files = response.json()["data"]["path(3)"]
    assert files["sv"].startswith("elements: 1 2 g\ng: g\n")
    assert files["matrix"].startswith("2 3\n")


def test_corner_reports_checks(client, paper4_text):
    response = client.post("/om/corner", json={"text": paper4_text})
    assert response.status_code == 200
    data = response.json()["data"]
    assert data["general_position"] is True
    assert data["remainder_isometric"] is True
    assert len(data["corner"]) + len(data["remainder"]) == 8


def test_corner_with_g_is_400(client, paper4_text):
    response = client.post("/om/corner", json={"text": paper4_text, "g": "4"})
    assert response.status_code == 400
    assert response.json()["detail"]["error"] == "UsageError"
    assert client.post("/om/peel", json={"text": paper4_text, "g": "4"}).status_code == 400
