import json

import pytest
from fastapi.testclient import TestClient

from tablelogic.service import create_app

COUNT = "eq { count { filter_eq { all_rows ; region ; africa } } ; 4 }"


@pytest.fixture
def client(tmp_path):
    # point the service at a scratch dir so annotations land there
    app = create_app(data_dir=str(tmp_path))
    with TestClient(app) as c:
        c.annotations_path = tmp_path / "annotations.jsonl"
        yield c


def test_tables_listing(client):
    assert client.get("/tables").json() == {"tables": ["opec_2012"]}
    t = client.get("/tables/opec_2012").json()
    assert t["columns"][0] == "country"
    assert len(t["rows"]) == 7
    assert client.get("/tables/nope").status_code == 404


def test_logic_types_endpoint(client):
    body = client.get("/logic-types").json()
    assert set(body) == {"count", "superlative", "comparative",
                         "aggregation", "majority", "unique", "ordinal"}
    assert body["count"][0]["id"] == "scope"


def test_parse_endpoint(client):
    r = client.post("/parse", json={"logic_str": COUNT})
    assert r.status_code == 200
    assert r.json()["logic_str"] == COUNT
    bad = client.post("/parse", json={"logic_str": "eq { nope"})
    assert bad.status_code == 400
    assert bad.json()["detail"]["code"] == "syntax_error"


def test_typecheck_endpoint(client):
    assert client.post("/typecheck", json={"logic_str": COUNT}).status_code \
        == 200
    r = client.post("/typecheck", json={"logic_str": "count { all_rows }"})
    assert r.status_code == 422


def test_execute_by_table_id(client):
    r = client.post("/execute", json={"logic_str": COUNT,
                                      "table_id": "opec_2012"})
    assert r.status_code == 200
    assert r.json()["value"] is True


def test_execute_inline_table(client):
    r = client.post("/execute", json={
        "logic_str": "eq { count { all_rows } ; 2 }",
        "table": {"table_id": "t", "caption": "", "columns": ["a"],
                  "rows": [["1"], ["2"]]}})
    assert r.json()["value"] is True


def test_execute_with_config_override(client):
    body = {"logic_str": "round_eq { avg { all_rows ; population } ; "
                         "60000000 }",
            "table_id": "opec_2012"}
    assert client.post("/execute", json=body).json()["value"] is False
    body["config"] = {"round_eq_relative_tol": 0.9}
    assert client.post("/execute", json=body).json()["value"] is True


def test_realize_endpoint(client):
    r = client.post("/realize", json={"logic_str": COUNT,
                                      "table_id": "opec_2012"})
    assert "there are 4 ones" in r.json()["text"]


def test_interpret_endpoint(client):
    r = client.post("/interpret", json={"logic_str": COUNT})
    assert r.json()["text"].startswith("verify that")


# -- annotation sessions ----------------------------------------------------

def _answer(client, ses, qid, value):
    r = client.post(f"/sessions/{ses['session_id']}/answers",
                    json={"question_id": qid, "answer": value,
                          "revision": ses["revision"]})
    assert r.status_code == 200, r.json()
    return r.json()


def test_count_session_flow(client):
    ses = client.post("/sessions", json={"table_id": "opec_2012",
                                         "logic_type": "count"}).json()
    assert len(ses["pending"]) == 5
    assert ses["preview"] is None
    for qid, val in [("scope", "all"), ("column", "region"),
                     ("criterion", "equal"), ("value", "africa"),
                     ("result", "4")]:
        ses = _answer(client, ses, qid, val)
    assert ses["pending"] == []
    assert ses["preview"]["logic_str"] == COUNT
    assert ses["preview"]["exec_result"] is True
    done = client.post(f"/sessions/{ses['session_id']}/finalize",
                       json={"revision": ses["revision"],
                             "sentence": "4 countries are from africa ."})
    assert done.status_code == 200
    assert done.json()["logic_str"] == COUNT + " = true"
    saved = [json.loads(line) for line in
             client.annotations_path.read_text().splitlines()]
    assert saved[0]["logic_type"] == "count"


def test_reanswer_repairs_false_verdict(client):
    ses = client.post("/sessions", json={"table_id": "opec_2012",
                                         "logic_type": "count"}).json()
    for qid, val in [("scope", "all"), ("column", "region"),
                     ("criterion", "equal"), ("value", "africa"),
                     ("result", "9")]:
        ses = _answer(client, ses, qid, val)
    assert ses["preview"]["exec_result"] is False
    ses = _answer(client, ses, "result", "4")
    assert ses["preview"]["exec_result"] is True


def test_scope_change_drops_stale_followups(client):
    ses = client.post("/sessions", json={"table_id": "opec_2012",
                                         "logic_type": "count"}).json()
    ses = _answer(client, ses, "scope", "subset")
    ses = _answer(client, ses, "scope_column", "region")
    ses = _answer(client, ses, "scope", "all")
    assert "scope_column" not in ses["answers"]
    assert all(q["id"] != "scope_column" for q in ses["pending"])


def test_subset_scope_exposes_followups(client):
    ses = client.post("/sessions", json={"table_id": "opec_2012",
                                         "logic_type": "superlative"}).json()
    before = {q["id"] for q in ses["pending"]}
    assert "scope_column" not in before
    ses = _answer(client, ses, "scope", "subset")
    after = {q["id"] for q in ses["pending"]}
    assert {"scope_column", "scope_criterion", "scope_value"} <= after


def test_revision_conflict(client):
    ses = client.post("/sessions", json={"table_id": "opec_2012",
                                         "logic_type": "count"}).json()
    stale = client.post(f"/sessions/{ses['session_id']}/answers",
                        json={"question_id": "scope", "answer": "all",
                              "revision": ses["revision"] + 5})
    assert stale.status_code == 409
    assert stale.json()["detail"]["code"] == "conflict"


def test_answer_validation(client):
    ses = client.post("/sessions", json={"table_id": "opec_2012",
                                         "logic_type": "count"}).json()
    sid = ses["session_id"]
    r = client.post(f"/sessions/{sid}/answers",
                    json={"question_id": "scope_column", "answer": "region"})
    assert r.status_code == 422
    assert r.json()["detail"]["code"] == "question_not_askable"
    r = client.post(f"/sessions/{sid}/answers",
                    json={"question_id": "scope", "answer": "everything"})
    assert r.status_code == 422
    assert r.json()["detail"]["code"] == "wrong_answer_type"


def test_finalize_requires_completion_and_truth(client):
    ses = client.post("/sessions", json={"table_id": "opec_2012",
                                         "logic_type": "count"}).json()
    sid = ses["session_id"]
    r = client.post(f"/sessions/{sid}/finalize", json={})
    assert r.status_code == 422
    assert r.json()["detail"]["code"] == "incomplete_session"
    for qid, val in [("scope", "all"), ("column", "region"),
                     ("criterion", "equal"), ("value", "africa"),
                     ("result", "9")]:
        ses = _answer(client, ses, qid, val)
    assert ses["preview"]["exec_result"] is False
    r = client.post(f"/sessions/{sid}/finalize",
                    json={"revision": ses["revision"]})
    assert r.status_code == 422
    assert r.json()["detail"]["code"] == "execution_false"


def test_superlative_session_matches_golden_program(client):
    ses = client.post("/sessions", json={"table_id": "opec_2012",
                                         "logic_type": "superlative"}).json()
    for qid, val in [("scope", "all"), ("column", "joined"),
                     ("kind", "maximum"), ("row", "angola"),
                     ("other_columns", ["region"]),
                     ("value_mentioned", False)]:
        ses = _answer(client, ses, qid, val)
    assert ses["preview"]["logic_str"] == (
        "and { eq { hop { argmax { all_rows ; joined } ; country } ; "
        "angola } ; eq { hop { argmax { all_rows ; joined } ; region } ; "
        "africa } }")
    assert ses["preview"]["exec_result"] is True
    assert ses["preview"]["node_stats"]["function_nodes"] == 7


def test_unknown_session_and_table(client):
    assert client.get("/sessions/deadbeef").status_code == 404
    r = client.post("/sessions", json={"table_id": "nope",
                                       "logic_type": "count"})
    assert r.status_code == 404
