import numpy as np
import pytest

from agent_assist.backends import load_encoder, load_pair_scorer, score_pairs
from agent_assist.retrieval.mnrl import MNRLConfig
from agent_assist.retrieval.training import (
    FineTuneSchedule,
    prepare_training_pairs,
    train_bi_encoder,
    train_cross_encoder,
)
from tests.conftest import ScriptedPairScorer


def association_pairs(n, seed=0):
    """Toy corpus where query and passage vocabularies are disjoint, so
    relevance is learnable only through fine-tuning."""
    rng = np.random.default_rng(seed)
    qwords = ["alpha", "bravo", "charlie", "delta", "echo",
              "foxtrot", "golf", "hotel", "india", "juliet"]
    pwords = ["kilo", "lima", "mike", "november", "oscar",
              "papa", "quebec", "romeo", "sierra", "tango"]
    pairs = []
    for _ in range(n):
        a, b = rng.integers(0, 10, 2)
        pairs.append((f"{qwords[a]} {qwords[b]} question", f"{pwords[a]} {pwords[b]} answer"))
    return pairs


class TestPreparePairs:
    def test_single_passage_selected(self):
        records = [{"question": "q1", "passages": ["only one"]}]
        prepared = prepare_training_pairs(records, ScriptedPairScorer({}, default=0.0),
                                          test_fraction=0.0)
        assert prepared.train == [("q1", "only one")]

    def test_selected_passage_is_argmax_of_scoring(self):
        passages = ["low", "best", "middle"]
        scorer = ScriptedPairScorer(
            {("q", "low"): 0.1, ("q", "best"): 0.9, ("q", "middle"): 0.5}
        )
        prepared = prepare_training_pairs(
            [{"question": "q", "passages": passages}], scorer, test_fraction=0.0
        )
        # Oracle: direct exhaustive scoring.
        direct = score_pairs([("q", p) for p in passages], scorer)
        assert prepared.train[0][1] == passages[int(np.argmax(direct))]

    def test_record_without_passages_skipped_with_counter(self):
        records = [
            {"question": "q1", "passages": []},
            {"question": "q2", "passages": ["keep"]},
        ]
        prepared = prepare_training_pairs(records, ScriptedPairScorer({}, default=0.0),
                                          test_fraction=0.0)
        assert prepared.skipped == 1
        assert len(prepared.train) == 1

    def test_split_sizes_at_fifteen_percent(self):
        records = [{"question": f"q{i}", "passages": [f"p{i}"]} for i in range(1000)]
        prepared = prepare_training_pairs(records, ScriptedPairScorer({}, default=0.0), seed=3)
        assert len(prepared.test) == 150
        assert len(prepared.train) == 850

    def test_split_is_deterministic_under_seed(self):
        records = [{"question": f"q{i}", "passages": [f"p{i}"]} for i in range(40)]
        scorer = ScriptedPairScorer({}, default=0.0)
        first = prepare_training_pairs(records, scorer, seed=5)
        second = prepare_training_pairs(records, scorer, seed=5)
        assert first.train == second.train and first.test == second.test


class TestTrainBiEncoder:
    def test_empty_pairs_rejected(self):
        with pytest.raises(ValueError):
            train_bi_encoder([], load_encoder("stub:encoder-d32"))

    def test_loss_decreases_on_toy_corpus(self):
        pairs = association_pairs(200)
        result = train_bi_encoder(
            pairs,
            load_encoder("stub:encoder-d32"),
            MNRLConfig(),
            FineTuneSchedule(epochs=3, batch_size=16, lr=1e-2, seed=0),
        )
        assert len(result.epoch_losses) == 3
        assert result.epoch_losses[0] > result.epoch_losses[-1]

    def test_input_encoder_not_mutated(self):
        encoder = load_encoder("stub:encoder-d32")
        before = encoder.encode(["alpha question"]).copy()
        train_bi_encoder(
            association_pairs(32), encoder, MNRLConfig(),
            FineTuneSchedule(epochs=1, batch_size=8, lr=1e-2, seed=0),
        )
        assert np.array_equal(encoder.encode(["alpha question"]), before)

    def test_tuned_encoder_ranks_paired_passage_higher(self):
        pairs = association_pairs(200)
        encoder = load_encoder("stub:encoder-d32")
        result = train_bi_encoder(
            pairs, encoder, MNRLConfig(),
            FineTuneSchedule(epochs=3, batch_size=16, lr=1e-2, seed=0),
        )
        q, gold = pairs[0]
        wrong = "tango sierra answer" if gold != "tango sierra answer" else "kilo lima answer"
        before = encoder.encode([q]) @ encoder.encode([gold, wrong]).T
        after = result.model.encode([q]) @ result.model.encode([gold, wrong]).T
        assert (after[0, 0] - after[0, 1]) > (before[0, 0] - before[0, 1])


class TestTrainCrossEncoder:
    def test_empty_pairs_rejected(self):
        with pytest.raises(ValueError):
            train_cross_encoder([], load_pair_scorer("stub:reranker-d32"))

    def test_single_pair_batches_give_zero_loss(self):
        result = train_cross_encoder(
            association_pairs(1),
            load_pair_scorer("stub:reranker-d32"),
            FineTuneSchedule(epochs=2, batch_size=16, lr=1e-3, seed=0),
        )
        assert all(abs(loss) <= 1e-9 for loss in result.epoch_losses)

    def test_fine_tuned_scorer_beats_untrained_on_held_out(self):
        pairs = association_pairs(200)
        train, held = pairs[:160], pairs[160:176]
        scorer = load_pair_scorer("stub:reranker-d32")
        result = train_cross_encoder(
            train, scorer, FineTuneSchedule(epochs=5, batch_size=16, lr=1e-2, seed=0)
        )

        def gold_top_count(model):
            wins = 0
            for i, (q, gold) in enumerate(held):
                distractors = [held[(i + j) % len(held)][1] for j in range(1, 4)]
                scores = score_pairs([(q, p) for p in [gold] + distractors], model)
                wins += int(np.argmax(scores) == 0)
            return wins

        assert gold_top_count(result.model) > gold_top_count(scorer)
