"""Synthetic corpus generator with known topic-word truth.

Generates documents from a mixture of disjoint-support topics: each topic owns
a block of generator words with a Dirichlet-drawn word distribution, each
document draws a topic distribution from an asymmetric Dirichlet prior, and
every token draws its topic first, then its word.

The generator vocabulary (n_topics * words_per_topic words) is usually much
larger than the observed vocabulary: with a sparse word prior most block words
never occur.  The returned corpus keeps only observed words, honoring the
positive-frequency invariant; the returned truth covers the full generator
vocabulary and aligns with any trained model by word name.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._util import read_json, write_json
from .model import Corpus, CorpusError, Document, Vocabulary

__all__ = ["SyntheticSpec", "TrueModel", "generate_synthetic"]


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of the synthetic generator.

    ``beta_tilde`` is the per-component symmetric Dirichlet parameter of each
    topic's word distribution over its block; ``alpha_m_tilde`` is the
    (unnormalized) Dirichlet parameter vector of the per-document topic
    distribution.  The default first entry (5 vs 0.5) makes topic 1 a
    dominant, stop-word-like topic.
    """
    n_topics: int = 4
    words_per_topic: int = 100
    n_docs: int = 6000
    doc_length: int = 30
    beta_tilde: float = 1.0 / 100.0
    alpha_m_tilde: tuple[float, ...] = (5.0, 0.5, 0.5, 0.5)
    seed: int = 0

    def __post_init__(self):
        if self.n_topics < 1 or self.words_per_topic < 1:
            raise CorpusError("n_topics and words_per_topic must be >= 1")
        if self.n_docs < 1 or self.doc_length < 1:
            raise CorpusError("n_docs and doc_length must be >= 1")
        if self.beta_tilde <= 0:
            raise CorpusError("beta_tilde must be positive")
        if len(self.alpha_m_tilde) != self.n_topics:
            raise CorpusError("alpha_m_tilde must have one entry per topic")
        if any(a <= 0 for a in self.alpha_m_tilde):
            raise CorpusError("alpha_m_tilde entries must be positive")


class TrueModel:
    """Generator-side truth: topic-word distributions and word-topic assignment.

    ``words`` spans the full generator vocabulary; ``topic_word`` rows are
    supported on disjoint word blocks and sum to one; ``word_topic`` maps every
    generator word to its owning topic.
    """

    __slots__ = ("words", "topic_word", "word_topic")

    def __init__(self, words, topic_word, word_topic):
        self.words = tuple(words)
        self.topic_word = np.ascontiguousarray(topic_word, dtype=np.float64)
        self.word_topic = np.ascontiguousarray(word_topic, dtype=np.int64)
        n, v = self.topic_word.shape
        if v != len(self.words) or self.word_topic.shape != (v,):
            raise CorpusError("true model shapes are inconsistent")
        sums = self.topic_word.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > 1e-9):
            raise CorpusError("true model rows must sum to 1")
        for t in range(n):
            support = np.flatnonzero(self.topic_word[t] > 0)
            if support.size and np.any(self.word_topic[support] != t):
                raise CorpusError("true model supports must respect word_topic")
        if np.any(self.word_topic < 0) or np.any(self.word_topic >= n):
            raise CorpusError("word_topic entries out of range")

    @property
    def n_topics(self) -> int:
        return self.topic_word.shape[0]

    def save_json(self, path: str) -> None:
        write_json(path, {
            "version": 1,
            "kind": "true-model",
            "words": list(self.words),
            "word_topic": self.word_topic.tolist(),
            "topic_word": self.topic_word.tolist(),
        }, compact=True)

    @classmethod
    def load_json(cls, path: str) -> "TrueModel":
        data = read_json(path)
        if data.get("kind") != "true-model" or data.get("version") != 1:
            raise CorpusError(f"{path} is not a version-1 true-model file")
        return cls(data["words"], np.array(data["topic_word"]), np.array(data["word_topic"]))


def generate_synthetic(spec: SyntheticSpec) -> tuple[Corpus, TrueModel]:
    """Draw a corpus and its truth from ``spec``, deterministically per seed.

    RNG: numpy ``default_rng`` (PCG64).  Draw order is part of the format:
    topic rows (one gamma block per topic, in topic order), then all document
    topic distributions, then per-token topic uniforms, then per-token word
    uniforms.  Dirichlet draws are gamma draws normalized to sum 1.
    """
    n = spec.n_topics
    wpt = spec.words_per_topic
    v_gen = n * wpt
    rng = np.random.default_rng(spec.seed)

    topic_word = np.zeros((n, v_gen))
    for t in range(n):
        g = rng.gamma(spec.beta_tilde, size=wpt)
        total = g.sum()
        if total <= 0:
            raise CorpusError("degenerate topic draw (all-zero gamma block); change seed")
        topic_word[t, t * wpt:(t + 1) * wpt] = g / total
    word_topic = np.repeat(np.arange(n, dtype=np.int64), wpt)

    theta_g = rng.gamma(np.asarray(spec.alpha_m_tilde, dtype=np.float64),
                        size=(spec.n_docs, n))
    theta = theta_g / theta_g.sum(axis=1, keepdims=True)

    topic_cdf = np.cumsum(theta, axis=1)
    u_topic = rng.random((spec.n_docs, spec.doc_length))
    z = (u_topic[:, :, None] > topic_cdf[:, None, :]).sum(axis=2)
    np.clip(z, 0, n - 1, out=z)

    u_word = rng.random((spec.n_docs, spec.doc_length))
    w = np.zeros((spec.n_docs, spec.doc_length), dtype=np.int64)
    for t in range(n):
        mask = z == t
        block_cdf = np.cumsum(topic_word[t, t * wpt:(t + 1) * wpt])
        idx = np.searchsorted(block_cdf, u_word[mask])
        np.clip(idx, 0, wpt - 1, out=idx)
        w[mask] = t * wpt + idx

    # Aggregate token matrix into sparse per-document counts over observed words.
    doc_idx = np.repeat(np.arange(spec.n_docs, dtype=np.int64), spec.doc_length)
    keys = doc_idx * v_gen + w.ravel()
    uniq, counts = np.unique(keys, return_counts=True)
    docs_of = uniq // v_gen
    words_of = uniq % v_gen

    observed = np.flatnonzero(np.bincount(words_of, weights=counts, minlength=v_gen) > 0)
    remap = -np.ones(v_gen, dtype=np.int64)
    remap[observed] = np.arange(observed.size)

    width = max(3, len(str(v_gen - 1)))
    gen_words = [f"w{k:0{width}d}" for k in range(v_gen)]
    vocab = Vocabulary([gen_words[k] for k in observed])

    boundaries = np.searchsorted(docs_of, np.arange(spec.n_docs + 1))
    documents = []
    for d in range(spec.n_docs):
        lo, hi = boundaries[d], boundaries[d + 1]
        documents.append(Document(d, remap[words_of[lo:hi]], counts[lo:hi]))

    corpus = Corpus(vocab, documents)
    truth = TrueModel(gen_words, topic_word, word_topic)
    return corpus, truth
