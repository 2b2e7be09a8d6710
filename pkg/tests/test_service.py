import json
import logging
from concurrent.futures import ThreadPoolExecutor

import jsonschema
import pytest
from fastapi.testclient import TestClient

from agent_assist.backends import load_encoder, load_generator, load_pair_scorer
from agent_assist.backends.base import DecodingConfig
from agent_assist.pipeline.core import PipelineComponents, PipelineConfig
from agent_assist.pipeline.stores import export_feedback_for_training
from agent_assist.service.app import ServiceState, create_app
from agent_assist.service.schemas import QUERY_RESPONSE_SCHEMA
from tests.conftest import CountingRetriever, ScriptedGate, ScriptedIntentClassifier


def make_state(gate_conf=0.9, intent_conf=0.9, generator="stub:generator"):
    components = PipelineComponents(
        gate=ScriptedGate(gate_conf),
        intent_classifier=ScriptedIntentClassifier(intent_conf),
        retriever=CountingRetriever(),
        generator=load_generator(generator) if generator else None,
        reranker=load_pair_scorer("stub:reranker"),
        keyword_encoder=load_encoder("stub:encoder"),
    )
    config = PipelineConfig(decoding=DecodingConfig(max_new_tokens=6, seed=0))
    return ServiceState(components=components, config=config)


@pytest.fixture()
def client():
    return TestClient(create_app(make_state()))


class TestQueryEndpoint:
    def test_valid_request_is_schema_valid(self, client):
        response = client.post("/v1/query", json={"query_text": "how do i reset my pin"})
        assert response.status_code == 200
        body = response.json()
        jsonschema.validate(body, QUERY_RESPONSE_SCHEMA)
        assert body["route"] == "qa"
        assert body["draft_response"]
        assert len(body["contexts"]) == 3

    def test_empty_query_is_400(self, client):
        assert client.post("/v1/query", json={"query_text": "   "}).status_code == 400

    def test_missing_field_is_422(self, client):
        assert client.post("/v1/query", json={}).status_code == 422

    def test_ood_route_schema_valid(self):
        client = TestClient(create_app(make_state(intent_conf=0.3)))
        response = client.post("/v1/query", json={"query_text": "crypto wallet staking"})
        body = response.json()
        jsonschema.validate(body, QUERY_RESPONSE_SCHEMA)
        assert body["route"] == "ood"
        assert body["ood_keywords"]

    def test_pipeline_failure_maps_to_502_with_stage(self):
        state = make_state()

        class Exploding:
            def retrieve(self, query, k):
                raise RuntimeError("boom")

        state.components.retriever = Exploding()
        client = TestClient(create_app(state))
        response = client.post("/v1/query", json={"query_text": "reset pin"})
        assert response.status_code == 502
        body = response.json()
        assert body["stage"] == "retrieve"
        assert "boom" in body["detail"]

    def test_concurrent_queries_get_unique_ids(self):
        client = TestClient(create_app(make_state()))

        def one(i):
            response = client.post("/v1/query", json={"query_text": f"reset pin {i}"})
            assert response.status_code == 200
            return response.json()["query_id"]

        with ThreadPoolExecutor(max_workers=8) as pool:
            ids = list(pool.map(one, range(32)))
        assert len(set(ids)) == 32


class TestFeedbackEndpoint:
    def test_approve_then_export(self):
        state = make_state()
        client = TestClient(create_app(state))
        query_id = client.post(
            "/v1/query", json={"query_text": "how do i reset my pin"}
        ).json()["query_id"]
        response = client.post("/v1/feedback",
                               json={"query_id": query_id, "verdict": "approve"})
        assert response.status_code == 200
        feedback_id = response.json()["feedback_id"]
        assert feedback_id
        exported = export_feedback_for_training(state.feedback_store)
        assert len(exported) == 1
        assert exported[0].question == "how do i reset my pin"

    def test_edit_without_text_is_400(self, client):
        query_id = client.post("/v1/query", json={"query_text": "q"}).json()["query_id"]
        response = client.post("/v1/feedback",
                               json={"query_id": query_id, "verdict": "edit"})
        assert response.status_code == 400

    def test_bad_verdict_is_400(self, client):
        query_id = client.post("/v1/query", json={"query_text": "q"}).json()["query_id"]
        response = client.post("/v1/feedback",
                               json={"query_id": query_id, "verdict": "meh"})
        assert response.status_code == 400

    def test_unknown_query_id_is_404(self, client):
        response = client.post("/v1/feedback",
                               json={"query_id": "ghost", "verdict": "approve"})
        assert response.status_code == 404

    def test_concurrent_feedback_never_lost(self):
        state = make_state()
        client = TestClient(create_app(state))
        ids = [
            client.post("/v1/query", json={"query_text": f"q {i}"}).json()["query_id"]
            for i in range(24)
        ]

        def send(query_id):
            response = client.post("/v1/feedback",
                                   json={"query_id": query_id, "verdict": "approve"})
            assert response.status_code == 200
            return response.json()["feedback_id"]

        with ThreadPoolExecutor(max_workers=8) as pool:
            feedback_ids = list(pool.map(send, ids))
        assert len(set(feedback_ids)) == 24
        assert len(state.feedback_store.all_feedback()) == 24


class TestOODEndpoint:
    def test_empty_store(self, client):
        assert client.get("/v1/ood-intents").json() == []

    def test_identical_ood_queries_merge(self):
        client = TestClient(create_app(make_state(intent_conf=0.2)))
        for _ in range(2):
            client.post("/v1/query", json={"query_text": "crypto wallet staking"})
        records = client.get("/v1/ood-intents").json()
        assert len(records) == 1
        assert records[0]["count"] == 2

    def test_sorted_by_count_descending(self):
        client = TestClient(create_app(make_state(intent_conf=0.2)))
        client.post("/v1/query", json={"query_text": "crypto wallet staking"})
        for _ in range(3):
            client.post("/v1/query", json={"query_text": "metaverse land purchase"})
        counts = [r["count"] for r in client.get("/v1/ood-intents").json()]
        assert counts == sorted(counts, reverse=True)


class TestHealthAndConfig:
    def test_all_loaded_is_ok(self, client):
        body = client.get("/v1/health").json()
        assert body["status"] == "ok"
        assert body["components"]["generator"] is True

    def test_missing_generator_is_degraded(self):
        client = TestClient(create_app(make_state(generator=None)))
        body = client.get("/v1/health").json()
        assert body["status"] == "degraded"
        assert "generator" in body["missing"]

    def test_config_redacts_paths(self, client):
        body = client.get("/v1/config").json()
        assert "gate_threshold" in body
        assert not any(key.endswith(("_dir", "_path")) for key in body)

    def test_request_log_line_emitted(self, client, caplog):
        with caplog.at_level(logging.INFO, logger="agent_assist.service.requests"):
            client.get("/v1/health")
        lines = [r.message for r in caplog.records
                 if r.name == "agent_assist.service.requests"]
        assert lines
        entry = json.loads(lines[-1])
        assert entry["path"] == "/v1/health"
        assert entry["status"] == 200
