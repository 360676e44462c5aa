"""Evaluable topic models and conversions from trained structures.

A TopicModel is n topic-word distributions (rows of ``phi`` over a shared
vocabulary), a topic-prior direction ``m``, and an optional Dirichlet
concentration ``alpha``.  Conversions: a dendrogram cut yields a model with
disjoint row supports and frequency-based m; the unigram baseline is its n=1
special case; the synthetic truth yields the perfect model via training
frequencies.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .._util import read_json, write_json
from ..corpus import Corpus, TrueModel
from ..grouping import Dendrogram, flat_view

__all__ = ["TopicModel", "tg_to_model", "unigram_model", "perfect_model"]


class TopicModel:
    """n topic-word distributions plus document-topic prior alpha * m.

    Invariants: every phi row sums to 1, m sums to 1, and every word has
    positive mass in at least one topic (so mixture likelihoods stay
    positive).  ``alpha`` may be None until fitted.
    """

    __slots__ = ("vocab", "phi", "m", "alpha")

    def __init__(self, vocab: Sequence[str], phi, m, alpha: float | None = None):
        self.vocab = tuple(vocab)
        self.phi = np.ascontiguousarray(phi, dtype=np.float64)
        self.m = np.ascontiguousarray(m, dtype=np.float64)
        if self.phi.ndim != 2 or self.phi.shape[1] != len(self.vocab):
            raise ValueError("phi must be (n_topics, |V|)")
        n = self.phi.shape[0]
        if self.m.shape != (n,):
            raise ValueError("m must have one entry per topic")
        if np.any(self.phi < 0) or np.any(self.m < 0):
            raise ValueError("phi and m must be non-negative")
        row_sums = self.phi.sum(axis=1)
        if np.any(np.abs(row_sums - 1.0) > 1e-9):
            raise ValueError("every phi row must sum to 1 (within 1e-9)")
        if abs(float(self.m.sum()) - 1.0) > 1e-9:
            raise ValueError("m must sum to 1 (within 1e-9)")
        if np.any(self.phi.max(axis=0) <= 0):
            dead = int(np.flatnonzero(self.phi.max(axis=0) <= 0)[0])
            raise ValueError(
                f"word {self.vocab[dead]!r} has zero mass in every topic")
        if alpha is not None and not (alpha > 0):
            raise ValueError("alpha must be positive when set")
        self.alpha = None if alpha is None else float(alpha)

    @property
    def n_topics(self) -> int:
        return self.phi.shape[0]

    def with_alpha(self, alpha: float) -> "TopicModel":
        return TopicModel(self.vocab, self.phi, self.m, alpha)

    # -- persistence -----------------------------------------------------

    SCHEMA_VERSION = 1

    def to_dict(self) -> dict:
        rows = []
        for t in range(self.n_topics):
            support = np.flatnonzero(self.phi[t] > 0)
            rows.append([[int(j), float(self.phi[t, j])] for j in support])
        return {
            "version": self.SCHEMA_VERSION,
            "kind": "topic-model",
            "n_topics": self.n_topics,
            "vocab": list(self.vocab),
            "m": self.m.tolist(),
            "alpha": self.alpha,
            "phi": rows,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TopicModel":
        if data.get("kind") != "topic-model" or data.get("version") != cls.SCHEMA_VERSION:
            raise ValueError("not a supported topic-model document")
        vocab = data["vocab"]
        phi = np.zeros((int(data["n_topics"]), len(vocab)))
        for t, row in enumerate(data["phi"]):
            for j, p in row:
                phi[t, int(j)] = float(p)
        return cls(vocab, phi, np.array(data["m"]), data.get("alpha"))

    def save_json(self, path: str, meta: dict | None = None) -> None:
        payload = self.to_dict()
        if meta:
            payload["meta"] = meta
        write_json(path, payload, compact=True)

    @classmethod
    def load_json(cls, path: str) -> "TopicModel":
        return cls.from_dict(read_json(path))

    def __repr__(self) -> str:
        return (f"TopicModel(n={self.n_topics}, |V|={len(self.vocab)}, "
                f"alpha={self.alpha})")


def tg_to_model(dendrogram: Dendrogram, corpus: Corpus, n: int) -> TopicModel:
    """Cut the dendrogram at n topics and estimate phi and m by frequencies.

    phi_t(w) = f(w) / f(t) for w in t (0 elsewhere); m_t = f(t) / sum f(t).
    alpha stays unset: a grouped model carries no predefined document prior,
    so the concentration is fitted separately.
    """
    if tuple(corpus.vocabulary.words) != dendrogram.vocab:
        raise ValueError("corpus vocabulary does not match the dendrogram")
    view = flat_view(dendrogram, n)
    v = corpus.n_words
    freq = corpus.global_freq.astype(np.float64)
    phi = np.zeros((n, v))
    for t in range(n):
        words = view.topic_words[t]
        phi[t, words] = freq[words] / float(view.f[t])
    m = view.f.astype(np.float64) / float(view.f.sum())
    return TopicModel(dendrogram.vocab, phi, m, alpha=None)


def unigram_model(corpus: Corpus, alpha: float = 1.0) -> TopicModel:
    """Single-topic model with the corpus word relative frequencies.

    With one topic the document likelihood does not depend on alpha; a
    positive default keeps the model directly evaluable.
    """
    freq = corpus.global_freq.astype(np.float64)
    phi = (freq / freq.sum())[None, :]
    return TopicModel(corpus.vocabulary.words, phi, np.array([1.0]), alpha=alpha)


def perfect_model(truth: TrueModel, train: Corpus) -> TopicModel:
    """Frequency estimates under the generator's true word-topic assignment.

    phi_t(w) = f_train(w) / f_train(true block of t) for training words in the
    block; m from block frequencies.  Words the truth knows but training never
    saw simply get zero estimated mass.
    """
    name_to_true = {w: k for k, w in enumerate(truth.words)}
    n = truth.n_topics
    v = train.n_words
    freq = train.global_freq.astype(np.float64)
    topic_of = np.empty(v, dtype=np.int64)
    for j, w in enumerate(train.vocabulary.words):
        if w not in name_to_true:
            raise ValueError(f"training word {w!r} is unknown to the true model")
        topic_of[j] = truth.word_topic[name_to_true[w]]
    phi = np.zeros((n, v))
    block_f = np.zeros(n)
    np.add.at(block_f, topic_of, freq)
    if np.any(block_f <= 0):
        empty = int(np.flatnonzero(block_f <= 0)[0])
        raise ValueError(f"true topic {empty} has no training occurrences")
    for j in range(v):
        t = topic_of[j]
        phi[t, j] = freq[j] / block_f[t]
    m = block_f / block_f.sum()
    return TopicModel(train.vocabulary.words, phi, m, alpha=None)
