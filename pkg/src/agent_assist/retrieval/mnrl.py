"""Multiple Negatives Ranking Loss over in-batch negatives.

For a batch of B (query, positive) embedding pairs the score matrix is
``s_ij = scale * sim(q_i, p_j)`` and the loss is::

    (1/B) * sum_i -log( exp(s_ii) / sum_j exp(s_ij) )

i.e. softmax cross-entropy per row with the diagonal as the target, so
every other in-batch positive serves as a free negative. Computed with
log-sum-exp stabilization. The numpy path also provides the analytic
gradient; the torch path is what the fine-tuning loops differentiate
through.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

_NORM_EPS = 1e-12

SIMILARITIES = ("dot", "cosine")


@dataclass(frozen=True)
class MNRLConfig:
    scale: float = 1.0
    similarity: str = "dot"
    batch_size: int = 16

    def __post_init__(self) -> None:
        if self.scale <= 0:
            raise ValueError("scale must be > 0")
        if self.similarity not in SIMILARITIES:
            raise ValueError(f"similarity must be one of {SIMILARITIES}")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


def _validate(query_embs: np.ndarray, positive_embs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    q = np.asarray(query_embs, dtype=np.float64)
    p = np.asarray(positive_embs, dtype=np.float64)
    if q.ndim != 2 or p.ndim != 2 or q.shape != p.shape:
        raise ValueError(f"embedding matrices must share shape [B x d], got {q.shape} and {p.shape}")
    if q.shape[0] < 1:
        raise ValueError("batch must contain at least one pair")
    return q, p


def _score_matrix(q: np.ndarray, p: np.ndarray, cfg: MNRLConfig):
    if cfg.similarity == "dot":
        return cfg.scale * (q @ p.T), None, None
    qn = q / np.maximum(np.linalg.norm(q, axis=1, keepdims=True), _NORM_EPS)
    pn = p / np.maximum(np.linalg.norm(p, axis=1, keepdims=True), _NORM_EPS)
    return cfg.scale * (qn @ pn.T), qn, pn


def mnrl_loss(query_embs: np.ndarray, positive_embs: np.ndarray, cfg: MNRLConfig) -> float:
    q, p = _validate(query_embs, positive_embs)
    scores, _, _ = _score_matrix(q, p, cfg)
    row_max = scores.max(axis=1, keepdims=True)
    lse = row_max[:, 0] + np.log(np.exp(scores - row_max).sum(axis=1))
    return float(np.mean(lse - np.diag(scores)))


def mnrl_loss_and_grad(
    query_embs: np.ndarray, positive_embs: np.ndarray, cfg: MNRLConfig
) -> tuple[float, np.ndarray, np.ndarray]:
    """Loss plus analytic gradients with respect to both embedding matrices."""
    q, p = _validate(query_embs, positive_embs)
    batch = q.shape[0]
    scores, qn, pn = _score_matrix(q, p, cfg)

    row_max = scores.max(axis=1, keepdims=True)
    exp = np.exp(scores - row_max)
    softmax = exp / exp.sum(axis=1, keepdims=True)
    loss = float(np.mean(
        row_max[:, 0] + np.log(exp.sum(axis=1)) - np.diag(scores)
    ))
    grad_scores = (softmax - np.eye(batch)) / batch  # dL/ds_ij

    if cfg.similarity == "dot":
        grad_q = cfg.scale * grad_scores @ p
        grad_p = cfg.scale * grad_scores.T @ q
        return loss, grad_q, grad_p

    sim = scores / cfg.scale
    q_norms = np.maximum(np.linalg.norm(q, axis=1, keepdims=True), _NORM_EPS)
    p_norms = np.maximum(np.linalg.norm(p, axis=1, keepdims=True), _NORM_EPS)
    row_weight = (grad_scores * sim).sum(axis=1, keepdims=True)
    col_weight = (grad_scores * sim).sum(axis=0)[:, None]
    grad_q = cfg.scale * (grad_scores @ pn - row_weight * qn) / q_norms
    grad_p = cfg.scale * (grad_scores.T @ qn - col_weight * pn) / p_norms
    return loss, grad_q, grad_p


def mnrl_loss_torch(
    query_embs: torch.Tensor, positive_embs: torch.Tensor, cfg: MNRLConfig
) -> torch.Tensor:
    """Differentiable loss used by the bi-encoder fine-tuning loop."""
    if query_embs.shape != positive_embs.shape:
        raise ValueError("embedding tensors must share shape [B x d]")
    if cfg.similarity == "cosine":
        q = torch.nn.functional.normalize(query_embs, dim=1, eps=_NORM_EPS)
        p = torch.nn.functional.normalize(positive_embs, dim=1, eps=_NORM_EPS)
    else:
        q, p = query_embs, positive_embs
    scores = cfg.scale * (q @ p.T)
    targets = torch.arange(scores.shape[0], device=scores.device)
    return torch.nn.functional.cross_entropy(scores, targets)
