"""Topic likelihood scores: h, pairwise joins, and merge deltas.

For a topic t (a set of word ids) define, with natural logs and plug-in
maximum-likelihood estimates,

    h(t) = sum_d f_d(t) * (log f_d(t) - log |d|) + i(t) - f(t) * log f(t)
    i(t) = sum_{w in t} f(w) * log f(w)

where f_d(t) sums the document's counts over t's words and f(t) = sum f(w).
h is the contribution of t to the corpus log-likelihood when each document's
topic weights and each topic's word distribution are estimated by relative
frequencies.  Joining two disjoint topics changes the total by

    delta_h(s, t) = h(s u t) - h(s) - h(t) <= 0,

and with phi(x) = x*log(x) the change reduces to terms over documents that
contain both topics:

    delta_h(s, t) = sum_{d} [phi(f_d(s)+f_d(t)) - phi(f_d(s)) - phi(f_d(t))]
                    - [phi(f(s)+f(t)) - phi(f(s)) - phi(f(t))]

because the i terms and the log|d| terms cancel and phi(a+0)-phi(a)-phi(0)=0.
Two independent routes to the same number are kept deliberately: ``delta_h``
uses the cancellation form, ``h_merged`` re-evaluates h on the merged
document profile; tests cross-check them.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..corpus import Corpus

__all__ = [
    "TopicState",
    "xlogx",
    "h_singleton",
    "h_pair",
    "h_merged",
    "delta_h",
    "singleton_state",
    "merge_states",
]


def xlogx(x):
    """x * log(x) elementwise with the continuous extension 0 at x=0."""
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    mask = x > 0
    np.multiply(x, np.log(x, where=mask, out=np.zeros_like(x)), where=mask, out=out)
    return out if out.ndim else float(out)


@dataclass
class TopicState:
    """Mutable per-topic training state.

    ``words`` ascending word ids; ``f`` total topic frequency; ``i`` the
    additive word-frequency entropy term; ``h`` the topic's current score;
    ``doc_ids``/``doc_counts`` the sparse per-document frequencies f_d(t)
    (positions ascending, counts all positive).
    """
    id: int
    words: np.ndarray
    f: int
    i: float
    h: float
    doc_ids: np.ndarray
    doc_counts: np.ndarray

    @property
    def key(self) -> int:
        """Canonical topic order: the smallest contained word id."""
        return int(self.words[0])


def _doc_term(doc_ids: np.ndarray, doc_counts: np.ndarray, corpus: Corpus) -> float:
    """sum_d f_d(t) * (log f_d(t) - log |d|) over the sparse profile."""
    c = doc_counts.astype(np.float64)
    return float(np.sum(c * (np.log(c) - corpus.log_doc_lengths[doc_ids])))


def h_singleton(corpus: Corpus, w: int) -> float:
    """h({w}): the i and f log f terms cancel for a single word."""
    docs, counts = corpus.postings(w)
    return _doc_term(docs, counts, corpus)


def singleton_state(corpus: Corpus, w: int, topic_id: int | None = None) -> TopicState:
    docs, counts = corpus.postings(w)
    f = int(corpus.global_freq[w])
    if f <= 0:
        raise ValueError(f"word {w} has zero corpus frequency; cannot form a topic")
    i = float(f * np.log(f))
    h = _doc_term(docs, counts, corpus)
    return TopicState(id=topic_id if topic_id is not None else int(w),
                      words=np.array([w], dtype=np.int64), f=f, i=i, h=h,
                      doc_ids=docs.copy(), doc_counts=counts.copy())


def _merge_profiles(a_ids, a_counts, b_ids, b_counts):
    """Entry-wise sum of two sparse document profiles (sorted positions)."""
    ids = np.concatenate([a_ids, b_ids])
    counts = np.concatenate([a_counts, b_counts])
    uniq, inverse = np.unique(ids, return_inverse=True)
    summed = np.zeros(uniq.size, dtype=np.int64)
    np.add.at(summed, inverse, counts)
    return uniq, summed


def h_merged(s: TopicState, t: TopicState, corpus: Corpus) -> float:
    """h(s u t) from the cached states, without touching member words.

    Iterates only documents where f_d(s) + f_d(t) > 0; i(s u t) = i(s) + i(t)
    by additivity.
    """
    ids, counts = _merge_profiles(s.doc_ids, s.doc_counts, t.doc_ids, t.doc_counts)
    f = s.f + t.f
    return _doc_term(ids, counts, corpus) + (s.i + t.i) - float(f * np.log(f))


def h_pair(corpus: Corpus, v: int, w: int) -> float:
    """h({v, w}) for two distinct words, via their postings."""
    if v == w:
        raise ValueError("h_pair requires two distinct words")
    return h_merged(singleton_state(corpus, v), singleton_state(corpus, w), corpus)


def delta_h(s: TopicState, t: TopicState) -> float:
    """delta_h(s, t) = h(s u t) - h(s) - h(t), by the cancellation form.

    Only documents containing both topics contribute; the global term uses the
    topic frequencies.  Always <= 0 (joining cannot raise the maximized
    likelihood).
    """
    common, ia, ib = np.intersect1d(s.doc_ids, t.doc_ids,
                                    assume_unique=True, return_indices=True)
    a = s.doc_counts[ia].astype(np.float64)
    b = t.doc_counts[ib].astype(np.float64)
    k = float(np.sum(xlogx(a + b) - xlogx(a) - xlogx(b)))
    fs, ft = float(s.f), float(t.f)
    g = float(xlogx(fs + ft) - xlogx(fs) - xlogx(ft))
    return k - g


def merge_states(s: TopicState, t: TopicState, corpus: Corpus, new_id: int,
                 dh: float | None = None) -> TopicState:
    """Build the merged topic state; h is set additively as h(s)+h(t)+dh.

    When ``dh`` is omitted it is computed via ``delta_h``.  The additive h
    keeps the telescoping likelihood identity exact by construction; tests
    verify it against from-scratch evaluation.
    """
    if dh is None:
        dh = delta_h(s, t)
    ids, counts = _merge_profiles(s.doc_ids, s.doc_counts, t.doc_ids, t.doc_counts)
    words = np.sort(np.concatenate([s.words, t.words]))
    return TopicState(id=new_id, words=words, f=s.f + t.f, i=s.i + t.i,
                      h=s.h + t.h + dh, doc_ids=ids, doc_counts=counts)
