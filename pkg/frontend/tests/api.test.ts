import assert from "node:assert/strict";
import { test } from "node:test";

import { ApiClient, ServiceError } from "../src/api.js";
import { MockService, oodRecords, qaResponse } from "./helpers.js";

test("query posts the text to /v1/query", async () => {
  const service = new MockService({ "POST /v1/query": { body: qaResponse() } });
  const client = new ApiClient("", service.fetch);
  const response = await client.query("reset my pin");
  assert.equal(response.query_id, "q-001");
  assert.deepEqual(service.requests[0], {
    url: "/v1/query",
    method: "POST",
    body: { query_text: "reset my pin", session_id: null },
  });
});

test("base url with trailing slash is normalized", async () => {
  const seen: string[] = [];
  const client = new ApiClient("http://svc:8080/", async (url) => {
    seen.push(url);
    return new Response("[]", { status: 200 });
  });
  await client.oodIntents();
  assert.deepEqual(seen, ["http://svc:8080/v1/ood-intents"]);
});

test("sendFeedback posts the request body verbatim", async () => {
  const service = new MockService({
    "POST /v1/feedback": { body: { feedback_id: "fb-1" } },
  });
  const client = new ApiClient("", service.fetch);
  const ack = await client.sendFeedback({
    query_id: "q-1",
    verdict: "edit",
    edited_text: "better answer",
  });
  assert.equal(ack.feedback_id, "fb-1");
  assert.deepEqual(service.requests[0].body, {
    query_id: "q-1",
    verdict: "edit",
    edited_text: "better answer",
  });
});

test("non-2xx responses raise ServiceError with status and stage", async () => {
  const service = new MockService({
    "POST /v1/query": {
      status: 502,
      body: { detail: "pipeline stage 'retrieve' failed", stage: "retrieve" },
    },
  });
  const client = new ApiClient("", service.fetch);
  await assert.rejects(client.query("anything"), (err: ServiceError) => {
    assert.equal(err.status, 502);
    assert.equal(err.stage, "retrieve");
    assert.match(err.message, /retrieve/);
    return true;
  });
});

test("network failure raises ServiceError with status 0", async () => {
  const client = new ApiClient("", async () => {
    throw new Error("connection refused");
  });
  await assert.rejects(client.query("x"), (err: ServiceError) => {
    assert.equal(err.status, 0);
    return true;
  });
});

test("oodIntents issues a GET and parses the list", async () => {
  const service = new MockService({ "GET /v1/ood-intents": { body: oodRecords() } });
  const client = new ApiClient("", service.fetch);
  const records = await client.oodIntents();
  assert.equal(records.length, 2);
  assert.equal(service.requests[0].method, "GET");
});
