import pytest

from agent_assist.generation.preprocess import (
    PreprocessStats,
    QARecord,
    load_qa_records,
    preprocess_msmarco,
    preprocess_msmarco_corpus,
    save_qa_records,
)


def test_record_with_no_answers_skipped():
    stats = PreprocessStats()
    assert preprocess_msmarco({"query": "q", "answers": [], "passages": []}, stats) is None
    assert stats.skipped_no_answer == 1


def test_placeholder_answer_counts_as_no_answer():
    assert preprocess_msmarco(
        {"query": "q", "answers": ["No Answer Present."], "passages": []}
    ) is None


def test_single_plain_answer_kept_not_well_formed():
    record = preprocess_msmarco(
        {"query": "what is the fee", "answers": ["two dollars"], "passages": []}
    )
    assert record is not None
    assert record.answer == "two dollars"
    assert record.well_formed is False


def test_well_formed_answer_preferred_over_multiple_plain():
    record = preprocess_msmarco({
        "query": "what is the fee",
        "answers": ["a", "b", "c"],
        "wellFormedAnswers": ["The fee is two dollars."],
        "passages": [],
    })
    assert record is not None
    assert record.answer == "The fee is two dollars."
    assert record.well_formed is True


def test_multiple_plain_answers_without_well_formed_skipped():
    stats = PreprocessStats()
    assert preprocess_msmarco(
        {"query": "q", "answers": ["a", "b"], "passages": []}, stats
    ) is None
    assert stats.skipped_multiple_answers == 1


def test_well_formed_serialized_as_string_literal():
    # Some raw dumps carry wellFormedAnswers as the string "[]".
    record = preprocess_msmarco(
        {"query": "q", "answers": ["only"], "wellFormedAnswers": "[]", "passages": []}
    )
    assert record is not None and record.well_formed is False


def test_passages_extracted_from_dicts_and_strings():
    record = preprocess_msmarco({
        "query": "q",
        "answers": ["a"],
        "passages": [{"passage_text": "first"}, "second", {"text": "third"}],
    })
    assert record.context_passages == ["first", "second", "third"]


def test_malformed_records_counted():
    kept, stats = preprocess_msmarco_corpus([
        "not a dict",
        {"answers": ["a"]},  # no question
        {"query": "ok", "answers": ["fine"], "passages": []},
    ])
    assert len(kept) == 1
    assert stats.skipped_malformed == 2
    assert stats.kept == 1


def test_qa_record_validation():
    with pytest.raises(ValueError):
        QARecord("", "answer")
    with pytest.raises(ValueError):
        QARecord("question", "  ")


def test_jsonl_round_trip(tmp_path):
    records = [
        QARecord("q1", "a1", ["c1", "c2"], True),
        QARecord("q2", "a2", [], False),
    ]
    path = tmp_path / "records.jsonl"
    save_qa_records(records, path)
    again = load_qa_records(path)
    assert [(r.question, r.answer, r.context_passages, r.well_formed) for r in again] == [
        ("q1", "a1", ["c1", "c2"], True),
        ("q2", "a2", [], False),
    ]
