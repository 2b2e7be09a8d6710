"""Out-of-domain keyword mining.

Low-confidence queries are mined for keywords by embedding candidate
n-grams and the whole query with the same encoder and ranking candidates
by cosine similarity. Candidates are contiguous n-grams of the query whose
tokens all survive stopword filtering; ties break lexicographically.
"""

from __future__ import annotations

import re

import numpy as np

from agent_assist.backends.base import TextEncoder
from agent_assist.backends.ops import encode_texts
from agent_assist.intent.stopwords import STOPWORDS

_WORD_RE = re.compile(r"[a-z0-9']+")


def _cosine_rows(matrix: np.ndarray, vector: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1) * np.linalg.norm(vector)
    norms[norms == 0] = 1.0
    return (matrix @ vector) / norms


def candidate_ngrams(
    query: str, ngram_range: tuple[int, int], stopwords: frozenset[str] = STOPWORDS
) -> list[str]:
    lo, hi = ngram_range
    if not 1 <= lo <= hi:
        raise ValueError("ngram_range must satisfy 1 <= lo <= hi")
    tokens = _WORD_RE.findall(query.lower())
    seen: set[str] = set()
    out: list[str] = []
    for n in range(lo, hi + 1):
        for i in range(len(tokens) - n + 1):
            gram = tokens[i : i + n]
            if any(t in stopwords for t in gram):
                continue
            text = " ".join(gram)
            if text not in seen:
                seen.add(text)
                out.append(text)
    return out


def extract_ood_keywords(
    query: str,
    encoder: TextEncoder,
    m: int,
    ngram_range: tuple[int, int] = (1, 2),
    *,
    use_mmr: bool = False,
    mmr_lambda: float = 0.5,
) -> list[tuple[str, float]]:
    """Top-m query keywords with their similarity to the whole query.

    Returns fewer than m entries when the query yields fewer candidates,
    and an empty list when nothing survives stopword filtering.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    candidates = candidate_ngrams(query, ngram_range)
    if not candidates:
        return []
    query_vec = encode_texts([query], encoder, mode="query")[0]
    cand_vecs = encode_texts(candidates, encoder, mode="passage")
    relevance = _cosine_rows(cand_vecs, query_vec)

    if not use_mmr:
        order = sorted(range(len(candidates)), key=lambda i: (-relevance[i], candidates[i]))
        return [(candidates[i], float(relevance[i])) for i in order[:m]]

    # Maximal-marginal-relevance diversification (off by default).
    norms = np.linalg.norm(cand_vecs, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    unit = cand_vecs / norms
    pairwise = unit @ unit.T
    remaining = sorted(range(len(candidates)), key=lambda i: (-relevance[i], candidates[i]))
    selected: list[int] = [remaining.pop(0)]
    while remaining and len(selected) < m:
        def marginal(i: int) -> float:
            return mmr_lambda * relevance[i] - (1 - mmr_lambda) * max(
                pairwise[i][j] for j in selected
            )

        best = min(remaining, key=lambda i: (-marginal(i), candidates[i]))
        remaining.remove(best)
        selected.append(best)
    return [(candidates[i], float(relevance[i])) for i in selected]
