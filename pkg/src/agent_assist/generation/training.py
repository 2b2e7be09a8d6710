"""Multi-task generator fine-tuning.

Each step optimizes ``lm_coef * L_LM + mc_coef * L_MC`` where L_LM is
next-token cross-entropy over answer-segment targets only and L_MC is
cross-entropy of the discrimination head over gold-vs-distractor answer
candidates. Gradients accumulate over ``grad_accum`` batches and are
clipped by global norm before each optimizer step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import torch
from torch import nn

from agent_assist.generation.preprocess import QARecord
from agent_assist.generation.prompts import (
    SEGMENT_ANSWER,
    MCInstance,
    PromptLayout,
    assemble_prompt,
    build_mc_instance,
)


@dataclass(frozen=True)
class GenTrainConfig:
    lm_coef: float = 10.0
    mc_coef: float = 1.0
    grad_clip: float = 10.0
    epochs: int = 5
    lr: float = 5e-5
    batch_size: int = 1
    grad_accum: int = 8
    num_distractors: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.lm_coef < 0 or self.mc_coef < 0:
            raise ValueError("loss coefficients must be >= 0")
        if self.grad_accum < 1:
            raise ValueError("grad_accum must be >= 1")
        if self.batch_size < 1 or self.epochs < 1:
            raise ValueError("batch_size and epochs must be >= 1")


@dataclass
class GenTrainResult:
    generator: object
    epoch_losses: list[float] = field(default_factory=list)


def _trainable_parameters(generator) -> list[torch.nn.Parameter]:
    if hasattr(generator, "trainable_parameters"):
        return list(generator.trainable_parameters())
    params = list(generator.torch_module().parameters())
    head = getattr(generator, "mc_head", None)
    if head is not None and isinstance(head, nn.Module):
        seen = {id(p) for p in params}
        params += [p for p in head.parameters() if id(p) not in seen]
    return params


def lm_loss_for_record(generator, record: QARecord, layout: PromptLayout) -> torch.Tensor:
    """Next-token cross-entropy restricted to answer-segment targets."""
    prompt = assemble_prompt(
        record.question, record.context_passages, layout, generator,
        answer=record.answer, append_eos=True,
    )
    logits, _ = generator.run_tokens(prompt.ids)
    answer_marker = generator.marker_ids["answer"]
    targets, rows = [], []
    for t in range(len(prompt.ids) - 1):
        target_id = prompt.ids[t + 1]
        if prompt.segments[t + 1] == SEGMENT_ANSWER and target_id != answer_marker:
            rows.append(t)
            targets.append(target_id)
    if not rows:
        return logits.sum() * 0.0
    return nn.functional.cross_entropy(
        logits[rows], torch.tensor(targets, dtype=torch.long)
    )


def mc_loss_for_instance(generator, instance: MCInstance, layout: PromptLayout) -> torch.Tensor:
    """Cross-entropy of the discrimination head over the candidate answers."""
    candidate_logits = []
    for candidate in instance.candidates:
        prompt = assemble_prompt(
            instance.question, instance.contexts, layout, generator,
            answer=candidate, append_eos=True,
        )
        _, hidden = generator.run_tokens(prompt.ids)
        candidate_logits.append(generator.mc_logit(hidden[-1]))
    stacked = torch.stack(candidate_logits).unsqueeze(0)
    gold = torch.tensor([instance.gold_index], dtype=torch.long)
    return nn.functional.cross_entropy(stacked, gold)


def batch_losses(
    generator,
    batch: Sequence[tuple[QARecord, MCInstance | None]],
    layout: PromptLayout | None = None,
) -> tuple[torch.Tensor, torch.Tensor]:
    """Mean (L_LM, L_MC) over a batch; L_MC is zero when no instances given."""
    layout = layout or PromptLayout()
    lm_terms, mc_terms = [], []
    for record, instance in batch:
        lm_terms.append(lm_loss_for_record(generator, record, layout))
        if instance is not None:
            mc_terms.append(mc_loss_for_instance(generator, instance, layout))
    lm = torch.stack(lm_terms).mean()
    mc = torch.stack(mc_terms).mean() if mc_terms else lm.detach() * 0.0
    return lm, mc


def train_generator(
    records: Sequence[QARecord],
    generator,
    cfg: GenTrainConfig,
    layout: PromptLayout | None = None,
) -> GenTrainResult:
    if not records:
        raise ValueError("records must be nonempty")
    layout = layout or PromptLayout()

    tuned = generator.clone()
    module = tuned.torch_module()
    module.train()
    params = _trainable_parameters(tuned)
    optimizer = torch.optim.AdamW(params, lr=cfg.lr)
    rng = np.random.default_rng(cfg.seed)

    instances: list[MCInstance | None] = []
    for i, record in enumerate(records):
        if cfg.mc_coef > 0:
            instances.append(
                build_mc_instance(record, records, cfg.num_distractors, seed=cfg.seed + i)
            )
        else:
            instances.append(None)

    epoch_losses: list[float] = []
    for _ in range(cfg.epochs):
        order = rng.permutation(len(records))
        batches = [
            [(records[j], instances[j]) for j in order[k : k + cfg.batch_size]]
            for k in range(0, len(order), cfg.batch_size)
        ]
        optimizer.zero_grad()
        pending = 0
        totals = []
        for batch in batches:
            lm, mc = batch_losses(tuned, batch, layout)
            total = cfg.lm_coef * lm + cfg.mc_coef * mc
            (total / cfg.grad_accum).backward()
            totals.append(float(total.detach()))
            pending += 1
            if pending == cfg.grad_accum:
                nn.utils.clip_grad_norm_(params, cfg.grad_clip)
                optimizer.step()
                optimizer.zero_grad()
                pending = 0
        if pending:
            nn.utils.clip_grad_norm_(params, cfg.grad_clip)
            optimizer.step()
            optimizer.zero_grad()
        epoch_losses.append(float(np.mean(totals)))

    module.eval()
    return GenTrainResult(tuned, epoch_losses)
