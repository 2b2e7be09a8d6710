"""Fine-tuning for the bi-encoder retriever and the cross-encoder re-ranker.

Both use in-batch negatives. The retriever optimizes the embedding-level
ranking loss directly; the cross-encoder uses its pairwise analogue, a
softmax over the scores of each query against every passage in the batch
(its own passage being the target). That cross-encoder adaptation of the
ranking loss is a design choice of this package, not a standard recipe.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import torch

from agent_assist.backends.ops import score_pairs
from agent_assist.retrieval.mnrl import MNRLConfig, mnrl_loss_torch
from agent_assist.training_utils import linear_warmup_schedule, shuffled_batches

Pair = tuple[str, str]


@dataclass(frozen=True)
class FineTuneSchedule:
    epochs: int = 3
    batch_size: int = 16
    lr: float = 2e-5
    warmup_ratio: float = 0.10
    seed: int = 0

    def __post_init__(self) -> None:
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be >= 1")
        if not 0 <= self.warmup_ratio < 1:
            raise ValueError("warmup_ratio must be in [0, 1)")


@dataclass
class FineTuneResult:
    model: object
    epoch_losses: list[float] = field(default_factory=list)


@dataclass
class PreparedPairs:
    train: list[Pair]
    test: list[Pair]
    skipped: int = 0


def prepare_training_pairs(
    raw_records: Sequence[dict],
    reranker,
    *,
    test_fraction: float = 0.15,
    seed: int = 0,
) -> PreparedPairs:
    """Build (question, best passage) pairs from multi-passage QA records.

    For each record the re-ranker scores every candidate passage against
    the question and the single best one becomes the training pair; a
    fixed fraction of the output is set aside as the test split. Records
    without passages are skipped and counted.
    """
    pairs: list[Pair] = []
    skipped = 0
    for record in raw_records:
        question = record.get("question") or record.get("query")
        passages = record.get("passages") or []
        if not question or not passages:
            skipped += 1
            continue
        scores = score_pairs([(question, p) for p in passages], reranker)
        best = int(np.argmax(scores))
        pairs.append((question, passages[best]))

    rng = np.random.default_rng(seed)
    order = rng.permutation(len(pairs))
    n_test = int(round(len(pairs) * test_fraction))
    test = [pairs[i] for i in order[:n_test]]
    train = [pairs[i] for i in order[n_test:]]
    return PreparedPairs(train=train, test=test, skipped=skipped)


def train_bi_encoder(
    pairs: Sequence[Pair],
    encoder,
    cfg: MNRLConfig | None = None,
    schedule: FineTuneSchedule | None = None,
) -> FineTuneResult:
    """Fine-tune a trainable encoder on (query, positive passage) pairs."""
    if not pairs:
        raise ValueError("pairs must be nonempty")
    cfg = cfg or MNRLConfig()
    schedule = schedule or FineTuneSchedule()

    tuned = encoder.clone()
    module = tuned.torch_module()
    module.train()
    params = list(module.parameters())
    optimizer = torch.optim.AdamW(params, lr=schedule.lr)
    rng = np.random.default_rng(schedule.seed)
    steps_per_epoch = int(np.ceil(len(pairs) / schedule.batch_size))
    lr_schedule = linear_warmup_schedule(
        optimizer, schedule.epochs * steps_per_epoch, schedule.warmup_ratio
    )

    epoch_losses: list[float] = []
    for _ in range(schedule.epochs):
        losses = []
        for batch in shuffled_batches(len(pairs), schedule.batch_size, rng):
            queries = [pairs[i][0] for i in batch]
            positives = [pairs[i][1] for i in batch]
            q = tuned.embed_torch(queries, mode="query")
            p = tuned.embed_torch(positives, mode="passage")
            loss = mnrl_loss_torch(q, p, cfg)
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            lr_schedule.step()
            losses.append(float(loss.detach()))
        epoch_losses.append(float(np.mean(losses)))

    module.eval()
    return FineTuneResult(model=tuned, epoch_losses=epoch_losses)


def train_cross_encoder(
    pairs: Sequence[Pair],
    cross_encoder,
    schedule: FineTuneSchedule | None = None,
) -> FineTuneResult:
    """Fine-tune a trainable pair scorer with in-batch candidate softmax.

    Each question is scored against every passage in its batch; the loss
    is cross-entropy with the question's own passage as the target. A
    batch of one pair therefore contributes zero loss.
    """
    if not pairs:
        raise ValueError("pairs must be nonempty")
    schedule = schedule or FineTuneSchedule()

    tuned = cross_encoder.clone()
    module = tuned.torch_module()
    module.train()
    params = list(module.parameters())
    optimizer = torch.optim.AdamW(params, lr=schedule.lr)
    rng = np.random.default_rng(schedule.seed)
    steps_per_epoch = int(np.ceil(len(pairs) / schedule.batch_size))
    lr_schedule = linear_warmup_schedule(
        optimizer, schedule.epochs * steps_per_epoch, schedule.warmup_ratio
    )

    epoch_losses: list[float] = []
    for _ in range(schedule.epochs):
        losses = []
        for batch in shuffled_batches(len(pairs), schedule.batch_size, rng):
            queries = [pairs[i][0] for i in batch]
            passages = [pairs[i][1] for i in batch]
            scores = tuned.score_matrix_torch(queries, passages)
            targets = torch.arange(scores.shape[0])
            loss = torch.nn.functional.cross_entropy(scores, targets)
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            lr_schedule.step()
            losses.append(float(loss.detach()))
        epoch_losses.append(float(np.mean(losses)))

    module.eval()
    return FineTuneResult(model=tuned, epoch_losses=epoch_losses)
