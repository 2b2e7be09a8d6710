import math

import numpy as np
import pytest
import torch
from hypothesis import given, settings
from hypothesis import strategies as st

from agent_assist.retrieval.mnrl import (
    MNRLConfig,
    mnrl_loss,
    mnrl_loss_and_grad,
    mnrl_loss_torch,
)


def finite_difference_grads(q, p, cfg, eps=1e-6):
    """Central differences of the loss, the independent gradient oracle."""
    grad_q = np.zeros_like(q)
    grad_p = np.zeros_like(p)
    for mat, grad in ((q, grad_q), (p, grad_p)):
        for idx in np.ndindex(mat.shape):
            original = mat[idx]
            mat[idx] = original + eps
            up = mnrl_loss(q, p, cfg)
            mat[idx] = original - eps
            down = mnrl_loss(q, p, cfg)
            mat[idx] = original
            grad[idx] = (up - down) / (2 * eps)
    return grad_q, grad_p


def score_matrix_embeddings(scores: np.ndarray):
    """Embeddings whose dot-product score matrix is exactly ``scores``."""
    batch = scores.shape[0]
    return np.eye(batch), scores.T.copy()


class TestLossValues:
    def test_single_pair_loss_is_zero(self):
        rng = np.random.default_rng(0)
        q = rng.standard_normal((1, 8))
        p = rng.standard_normal((1, 8))
        assert abs(mnrl_loss(q, p, MNRLConfig())) <= 1e-12

    def test_orthonormal_two_pair_value(self):
        # s_ii = 1, s_ij = 0 for i != j: each row contributes ln(1 + e^-1).
        q = np.eye(2)
        p = np.eye(2)
        expected = math.log(1.0 + math.exp(-1.0))
        assert mnrl_loss(q, p, MNRLConfig(scale=1.0, similarity="dot")) == pytest.approx(
            expected, abs=1e-9
        )

    def test_scale_sharpbest_loss(self):
        q = np.eye(2)
        p = np.eye(2)
        low = mnrl_loss(q, p, MNRLConfig(scale=1.0))
        high = mnrl_loss(q, p, MNRLConfig(scale=20.0))
        assert high < low  # sharper softmax on a correct diagonal

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            mnrl_loss(np.zeros((2, 4)), np.zeros((2, 5)), MNRLConfig())
        with pytest.raises(ValueError):
            mnrl_loss(np.zeros((2, 4)), np.zeros((3, 4)), MNRLConfig())

    def test_config_validation(self):
        with pytest.raises(ValueError):
            MNRLConfig(scale=0.0)
        with pytest.raises(ValueError):
            MNRLConfig(similarity="euclid")
        with pytest.raises(ValueError):
            MNRLConfig(batch_size=0)

    @settings(max_examples=40, deadline=None)
    @given(
        batch=st.integers(min_value=2, max_value=8),
        seed=st.integers(min_value=0, max_value=2**16),
    )
    def test_loss_strictly_positive_for_batches(self, batch, seed):
        rng = np.random.default_rng(seed)
        q = rng.standard_normal((batch, 6))
        p = rng.standard_normal((batch, 6))
        assert mnrl_loss(q, p, MNRLConfig()) > 0.0

    def test_increasing_diagonal_score_decreases_loss(self):
        scores = np.array([[1.0, 0.3], [0.2, 0.8]])
        bumped = scores.copy()
        bumped[0, 0] += 0.5
        cfg = MNRLConfig()
        assert mnrl_loss(*score_matrix_embeddings(bumped), cfg) < mnrl_loss(
            *score_matrix_embeddings(scores), cfg
        )


class TestGradients:
    @pytest.mark.parametrize("similarity,scale", [("dot", 1.0), ("dot", 5.0), ("cosine", 20.0)])
    def test_analytic_matches_central_differences(self, similarity, scale):
        rng = np.random.default_rng(42)
        q = rng.standard_normal((4, 8))
        p = rng.standard_normal((4, 8))
        cfg = MNRLConfig(scale=scale, similarity=similarity)
        loss, grad_q, grad_p = mnrl_loss_and_grad(q, p, cfg)
        assert loss == pytest.approx(mnrl_loss(q, p, cfg), abs=1e-12)
        fd_q, fd_p = finite_difference_grads(q, p, cfg)
        for analytic, numeric in ((grad_q, fd_q), (grad_p, fd_p)):
            rel = np.linalg.norm(analytic - numeric) / max(np.linalg.norm(numeric), 1e-12)
            assert rel < 1e-4


class TestTorchParity:
    @settings(max_examples=20, deadline=None)
    @given(
        batch=st.integers(min_value=1, max_value=6),
        seed=st.integers(min_value=0, max_value=2**16),
        similarity=st.sampled_from(["dot", "cosine"]),
    )
    def test_torch_loss_matches_numpy(self, batch, seed, similarity):
        rng = np.random.default_rng(seed)
        q = rng.standard_normal((batch, 5))
        p = rng.standard_normal((batch, 5))
        cfg = MNRLConfig(similarity=similarity)
        torch_value = float(mnrl_loss_torch(torch.tensor(q), torch.tensor(p), cfg))
        assert torch_value == pytest.approx(mnrl_loss(q, p, cfg), abs=1e-8)
