"""Baseline topic model: collapsed Gibbs sampling with heuristic priors.

Trains standard latent-topic assignments by collapsed Gibbs sweeps over all
tokens, with the usual heuristic hyperparameters (symmetric document prior of
total weight 50/n, word smoothing beta = 0.1).  The point estimate comes from
the final sample's counts: phi_t(w) = (n_tw + beta) / (n_t + |V| beta).
Fold-in re-samples assignments for a held-out document against fixed phi to
estimate its topic distribution.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._util import maybe_njit
from .corpus import Corpus, Document
from .evaluation import TopicModel

__all__ = ["GibbsState", "FoldConfig", "heuristic_hypers", "gibbs_train", "fold_in"]


@dataclass(frozen=True)
class FoldConfig:
    """Fold-in sampling settings: chains, sweeps per chain, discarded prefix."""
    chains: int = 10
    sweeps: int = 50
    discard: int = 20
    seed: int = 0


@dataclass
class GibbsState:
    """Sampler counts; every invariant ties them to the assignment vector z."""
    z: np.ndarray
    n_tw: np.ndarray
    n_dt: np.ndarray
    n_t: np.ndarray
    alpha_m: np.ndarray
    beta: float
    iteration: int


def heuristic_hypers(n: int) -> tuple[np.ndarray, float]:
    """Symmetric document prior summing to 50/n, and beta = 0.1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return np.full(n, (50.0 / n) / n), 0.1


@maybe_njit(cache=True)
def _gibbs_sweep(z, doc_of, word_of, n_tw, n_dt, n_t, alpha_m, beta, v_beta, uniforms):
    n = n_tw.shape[0]
    p = np.empty(n)
    for i in range(z.size):
        d = doc_of[i]
        w = word_of[i]
        old = z[i]
        n_tw[old, w] -= 1
        n_dt[d, old] -= 1
        n_t[old] -= 1
        tot = 0.0
        for t in range(n):
            val = (n_tw[t, w] + beta) * (n_dt[d, t] + alpha_m[t]) / (n_t[t] + v_beta)
            p[t] = val
            tot += val
        u = uniforms[i] * tot
        cum = 0.0
        new = n - 1
        for t in range(n):
            cum += p[t]
            if u < cum:
                new = t
                break
        z[i] = new
        n_tw[new, w] += 1
        n_dt[d, new] += 1
        n_t[new] += 1


def _recount(z, doc_of, word_of, n, v, n_docs):
    n_tw = np.bincount(z * v + word_of, minlength=n * v).reshape(n, v)
    n_dt = np.bincount(doc_of * n + z, minlength=n_docs * n).reshape(n_docs, n)
    n_t = np.bincount(z, minlength=n)
    return n_tw.astype(np.int64), n_dt.astype(np.int64), n_t.astype(np.int64)


def gibbs_train(corpus: Corpus, n: int, alpha_m=None, beta: float | None = None,
                iterations: int = 500, burn_in: int = 200, seed: int = 0,
                return_state: bool = False):
    """Collapsed Gibbs training; deterministic per seed.

    The count invariants (topic-word, document-topic, and topic totals all
    consistent with z) are re-verified after every sweep; a violation raises.
    ``burn_in`` must be below ``iterations``; the estimate uses the final
    sample only, so burn_in has no effect on the returned model and exists
    for interface compatibility with averaging samplers.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if iterations <= burn_in:
        raise ValueError("iterations must exceed burn_in")
    if np.any(corpus.global_freq <= 0):
        raise ValueError("training requires positive frequency for every word")
    if alpha_m is None or beta is None:
        default_alpha_m, default_beta = heuristic_hypers(n)
        if alpha_m is None:
            alpha_m = default_alpha_m
        if beta is None:
            beta = default_beta
    alpha_m = np.ascontiguousarray(alpha_m, dtype=np.float64)
    if alpha_m.shape != (n,) or np.any(alpha_m <= 0):
        raise ValueError("alpha_m must be a positive vector of length n")
    if beta <= 0:
        raise ValueError("beta must be positive")

    v = corpus.n_words
    ptr, dwords, dcounts = corpus.doc_arrays()
    type_doc = np.repeat(np.arange(corpus.n_docs, dtype=np.int64),
                         np.diff(ptr))
    word_of = np.repeat(dwords, dcounts)
    doc_of = np.repeat(type_doc, dcounts)

    rng = np.random.default_rng(seed)
    z = rng.integers(0, n, size=word_of.size, dtype=np.int64)
    n_tw, n_dt, n_t = _recount(z, doc_of, word_of, n, v, corpus.n_docs)

    v_beta = float(v) * float(beta)
    iteration = 0
    for iteration in range(1, iterations + 1):
        uniforms = rng.random(word_of.size)
        _gibbs_sweep(z, doc_of, word_of, n_tw, n_dt, n_t, alpha_m,
                     float(beta), v_beta, uniforms)
        ref_tw, ref_dt, ref_t = _recount(z, doc_of, word_of, n, v, corpus.n_docs)
        if (not np.array_equal(ref_tw, n_tw) or not np.array_equal(ref_dt, n_dt)
                or not np.array_equal(ref_t, n_t)):
            raise RuntimeError(f"count invariants violated after sweep {iteration}")

    phi = (n_tw + beta) / (n_t[:, None] + v_beta)
    m = alpha_m / alpha_m.sum()
    model = TopicModel(corpus.vocabulary.words, phi, m, alpha=float(alpha_m.sum()))
    if return_state:
        state = GibbsState(z=z, n_tw=n_tw, n_dt=n_dt, n_t=n_t,
                           alpha_m=alpha_m, beta=float(beta), iteration=iteration)
        return model, state
    return model


@maybe_njit(cache=True)
def _fold_in_kernel(cols, m, alpha, sweeps, discard, z_init, uniforms):
    S = z_init.shape[0]
    L, n = cols.shape
    acc = np.zeros(n)
    cnt = np.empty(n)
    wgt = np.empty(n)
    z = np.empty(L, dtype=np.int64)
    kept = 0
    for s in range(S):
        for t in range(n):
            cnt[t] = 0.0
        for j in range(L):
            z[j] = z_init[s, j]
            cnt[z[j]] += 1.0
        for sw in range(sweeps):
            for j in range(L):
                cnt[z[j]] -= 1.0
                tot = 0.0
                for t in range(n):
                    val = cols[j, t] * (cnt[t] + alpha * m[t])
                    wgt[t] = val
                    tot += val
                u = uniforms[s, sw, j] * tot
                cum = 0.0
                new = n - 1
                for t in range(n):
                    cum += wgt[t]
                    if u < cum:
                        new = t
                        break
                z[j] = new
                cnt[new] += 1.0
            if sw >= discard:
                for t in range(n):
                    acc[t] += cnt[t]
                kept += 1
    return acc / (kept * L)


def fold_in(model: TopicModel, doc: Document, S: int = 10, sweeps: int = 50,
            discard: int = 20, seed: int = 0) -> np.ndarray:
    """Estimate p(t | doc) against fixed phi by repeated Gibbs chains.

    Runs S independent chains of ``sweeps`` sweeps, discarding the first
    ``discard`` sweeps of each, and averages the topic indicator frequencies
    over the kept sweeps of all chains.  Deterministic per seed; RNG draw
    order: all chain initializations, then all sweep uniforms.
    """
    if model.alpha is None:
        raise ValueError("model.alpha must be set for fold-in")
    if S < 1 or sweeps < 1 or not (0 <= discard < sweeps):
        raise ValueError("need S >= 1 and 0 <= discard < sweeps")
    n = model.n_topics
    if n == 1:
        return np.array([1.0])
    seq = np.repeat(doc.word_ids, doc.counts)
    cols = np.ascontiguousarray(model.phi[:, seq].T)
    if np.any(cols.sum(axis=1) <= 0):
        raise ValueError("document contains a word with zero mass in every topic")
    rng = np.random.default_rng(seed)
    z_init = rng.integers(0, n, size=(S, seq.size), dtype=np.int64)
    uniforms = rng.random((S, sweeps, seq.size))
    return _fold_in_kernel(cols, model.m, float(model.alpha),
                           int(sweeps), int(discard), z_init, uniforms)
