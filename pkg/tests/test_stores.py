import threading

import pytest

from agent_assist.pipeline.stores import (
    FeedbackRecord,
    FeedbackStore,
    OODIntentStore,
    ResultSnapshot,
    UnknownQueryError,
    export_feedback_for_training,
    new_query_id,
)


def snapshot(query_id="q1", draft="draft answer text"):
    return ResultSnapshot(
        query_id=query_id,
        query="how do i reset my pin",
        route="qa",
        draft=draft,
        context_ids=["p1"],
        context_texts=["reset your pin in the app"],
    )


class TestQueryIds:
    def test_unique_under_concurrency(self):
        ids = []
        lock = threading.Lock()

        def worker():
            for _ in range(50):
                value = new_query_id()
                with lock:
                    ids.append(value)

        threads = [threading.Thread(target=worker) for _ in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert len(set(ids)) == len(ids) == 400

    def test_time_ordered(self):
        first, second = new_query_id(), new_query_id()
        assert first < second


class TestOODStore:
    def test_first_occurrence_count_one(self):
        store = OODIntentStore()
        record_id = store.record(["crypto", "wallet"], "crypto wallet help")
        records = store.records()
        assert records[0].record_id == record_id
        assert records[0].count == 1

    def test_identical_keyword_sets_merge(self):
        store = OODIntentStore()
        a = store.record(["crypto", "wallet"], "first query")
        b = store.record(["wallet", "crypto"], "second query")  # order-insensitive
        assert a == b
        assert store.records()[0].count == 2
        assert len(store.records()) == 1

    def test_distinct_sets_create_distinct_records(self):
        store = OODIntentStore()
        store.record(["crypto"], "q1")
        store.record(["wallet"], "q2")
        assert len(store.records()) == 2

    def test_empty_keywords_rejected(self):
        with pytest.raises(ValueError):
            OODIntentStore().record([], "query")

    def test_sorted_by_count_descending(self):
        store = OODIntentStore()
        store.record(["rare"], "q")
        for _ in range(3):
            store.record(["common"], "q")
        counts = [r.count for r in store.records()]
        assert counts == [3, 1]

    def test_persistence_round_trip(self, tmp_path):
        path = tmp_path / "ood.jsonl"
        store = OODIntentStore(path)
        store.record(["crypto", "wallet"], "q1")
        store.record(["crypto", "wallet"], "q2")
        reloaded = OODIntentStore(path)
        assert reloaded.records()[0].count == 2
        assert reloaded.records()[0].keywords == ("crypto", "wallet")


class TestFeedbackRecordValidation:
    def test_bad_verdict(self):
        with pytest.raises(ValueError):
            FeedbackRecord("q1", "maybe")

    def test_edit_requires_text(self):
        with pytest.raises(ValueError):
            FeedbackRecord("q1", "edit")
        with pytest.raises(ValueError):
            FeedbackRecord("q1", "edit", edited_text="   ")

    def test_edited_text_only_with_edit(self):
        with pytest.raises(ValueError):
            FeedbackRecord("q1", "approve", edited_text="surprise")


class TestFeedbackStore:
    def test_round_trip_field_identical(self):
        store = FeedbackStore()
        store.register_result(snapshot())
        fid = store.record_feedback(FeedbackRecord("q1", "approve", agent_id="agent-7"))
        stored = store.get(fid)
        assert stored.query_id == "q1"
        assert stored.verdict == "approve"
        assert stored.agent_id == "agent-7"
        assert stored.feedback_id == fid
        assert stored.timestamp

    def test_unknown_query_id_rejected(self):
        store = FeedbackStore()
        with pytest.raises(UnknownQueryError):
            store.record_feedback(FeedbackRecord("ghost", "approve"))

    def test_append_only_interleaved_writes(self):
        store = FeedbackStore()
        for i in range(100):
            store.register_result(snapshot(f"q{i}"))
        errors = []

        def worker(offset):
            try:
                for i in range(offset, 100, 4):
                    store.record_feedback(FeedbackRecord(f"q{i}", "approve"))
            except Exception as exc:  # noqa: BLE001
                errors.append(exc)

        threads = [threading.Thread(target=worker, args=(k,)) for k in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert not errors
        records = store.all_feedback()
        assert len(records) == 100
        assert len({r.feedback_id for r in records}) == 100

    def test_eviction_beyond_capacity(self):
        store = FeedbackStore(known_ids_capacity=2)
        for i in range(3):
            store.register_result(snapshot(f"q{i}"))
        assert not store.knows("q0")
        assert store.knows("q2")
        with pytest.raises(UnknownQueryError):
            store.record_feedback(FeedbackRecord("q0", "approve"))

    def test_persistence_round_trip(self, tmp_path):
        store = FeedbackStore(tmp_path / "fb.jsonl", tmp_path / "results.jsonl")
        store.register_result(snapshot())
        fid = store.record_feedback(FeedbackRecord("q1", "edit", edited_text="better"))
        reloaded = FeedbackStore(tmp_path / "fb.jsonl", tmp_path / "results.jsonl")
        assert reloaded.get(fid).edited_text == "better"
        assert reloaded.knows("q1")


class TestExport:
    def test_empty_store(self):
        assert export_feedback_for_training(FeedbackStore()) == []

    def test_approve_yields_pair_reject_excluded(self):
        store = FeedbackStore()
        store.register_result(snapshot("q1"))
        store.register_result(snapshot("q2"))
        store.record_feedback(FeedbackRecord("q1", "approve"))
        store.record_feedback(FeedbackRecord("q2", "reject"))
        exported = export_feedback_for_training(store)
        assert len(exported) == 1
        assert exported[0].question == "how do i reset my pin"
        assert exported[0].answer == "draft answer text"
        assert exported[0].context_passages == ["reset your pin in the app"]

    def test_edit_exports_edited_text(self):
        store = FeedbackStore()
        store.register_result(snapshot("q1"))
        store.record_feedback(FeedbackRecord("q1", "edit", edited_text="the corrected answer"))
        exported = export_feedback_for_training(store)
        assert exported[0].answer == "the corrected answer"

    def test_approve_without_draft_skipped(self):
        store = FeedbackStore()
        store.register_result(snapshot("q1", draft=None))
        store.record_feedback(FeedbackRecord("q1", "approve"))
        assert export_feedback_for_training(store) == []

    def test_filter_applied(self):
        store = FeedbackStore()
        store.register_result(snapshot("q1"))
        store.register_result(snapshot("q2"))
        store.record_feedback(FeedbackRecord("q1", "approve", agent_id="keep"))
        store.record_feedback(FeedbackRecord("q2", "approve", agent_id="drop"))
        exported = export_feedback_for_training(store, lambda r: r.agent_id == "keep")
        assert len(exported) == 1
