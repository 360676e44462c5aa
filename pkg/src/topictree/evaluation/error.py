"""Error rate: minimal average L1 distance to the true topic-word rows.

err(model, truth) = min over bijections pi of
    (1 / 2n) * sum_t sum_w | phi_t(w) - p_true(w | pi(t)) |,

an assignment problem over the pairwise L1 cost matrix.  Columns are aligned
by word name over the union of the two vocabularies, with missing words
contributing zero mass, so a model trained on the observed subset of a
generator vocabulary compares correctly.
"""
from __future__ import annotations

from itertools import permutations

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..corpus import TrueModel
from .model import TopicModel

__all__ = ["error_rate"]

_BRUTE_FORCE_MAX = 8


def _aligned_rows(model: TopicModel, truth: TrueModel) -> tuple[np.ndarray, np.ndarray]:
    names = list(truth.words)
    pos = {w: k for k, w in enumerate(names)}
    extra = [w for w in model.vocab if w not in pos]
    for w in extra:
        pos[w] = len(names)
        names.append(w)
    u = len(names)
    n = model.n_topics
    a = np.zeros((n, u))
    cols = np.array([pos[w] for w in model.vocab], dtype=np.int64)
    a[:, cols] = model.phi
    b = np.zeros((truth.n_topics, u))
    b[:, :truth.topic_word.shape[1]] = truth.topic_word
    return a, b


def _assignment_bruteforce(cost: np.ndarray) -> float:
    n = cost.shape[0]
    best = np.inf
    for perm in permutations(range(n)):
        total = float(cost[np.arange(n), perm].sum())
        if total < best:
            best = total
    return best


def _assignment_hungarian(cost: np.ndarray) -> float:
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].sum())


def error_rate(model: TopicModel, truth: TrueModel) -> float:
    """Minimal average halved L1 distance over topic bijections, in [0, 1]."""
    n = model.n_topics
    if truth.n_topics != n:
        raise ValueError(
            f"topic count mismatch: model has {n}, truth has {truth.n_topics}")
    a, b = _aligned_rows(model, truth)
    cost = np.abs(a[:, None, :] - b[None, :, :]).sum(axis=2)
    if n <= _BRUTE_FORCE_MAX:
        total = _assignment_bruteforce(cost)
    else:
        total = _assignment_hungarian(cost)
    return total / (2.0 * n)
