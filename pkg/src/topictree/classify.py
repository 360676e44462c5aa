"""Naive-Bayes classification over reduced document features.

Reducers map a document to a fixed-length count vector: topic counts from a
flat partition view, fold-in topic counts from a sampled topic model, or raw
counts restricted to a selected word subset (information gain or document
frequency).  The classifier is multinomial NB with Lidstone smoothing
(1 + x) / (n_features + total).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .corpus import Corpus, Document
from .grouping import FlatView
from .grouping.hscore import xlogx
from .evaluation import TopicModel
from .lda import FoldConfig, fold_in

__all__ = [
    "LabeledCorpus", "NBModel", "Reducer",
    "reduce_tg", "reduce_lda",
    "tg_reducer", "lda_reducer", "word_subset_reducer",
    "select_ig", "select_df",
    "nb_train", "nb_classify", "micro_accuracy",
]


class LabeledCorpus:
    """A corpus with exactly one class label per document."""

    __slots__ = ("corpus", "labels", "class_names")

    def __init__(self, corpus: Corpus, labels: Sequence[int],
                 class_names: Sequence[str]):
        labels = np.asarray(labels, dtype=np.int64)
        if labels.shape != (corpus.n_docs,):
            raise ValueError("need exactly one label per document")
        names = tuple(str(c) for c in class_names)
        if len(names) == 0 or len(set(names)) != len(names):
            raise ValueError("class names must be non-empty and unique")
        if labels.size and (labels.min() < 0 or labels.max() >= len(names)):
            raise ValueError("label id out of range")
        self.corpus = corpus
        self.labels = labels
        self.class_names = names

    @classmethod
    def from_doc_id_map(cls, corpus: Corpus, mapping: Mapping[int, str],
                        class_names: Sequence[str] | None = None) -> "LabeledCorpus":
        """Build from a doc-id to class-name mapping covering every document."""
        raw = []
        for i in range(corpus.n_docs):
            did = corpus.doc(i).doc_id
            if did not in mapping:
                raise ValueError(f"no label for document id {did}")
            raw.append(str(mapping[did]))
        if class_names is None:
            class_names = sorted(set(raw))
        index = {c: k for k, c in enumerate(class_names)}
        try:
            labels = [index[c] for c in raw]
        except KeyError as exc:
            raise ValueError(f"label {exc.args[0]!r} not in class list") from None
        return cls(corpus, labels, class_names)

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def class_doc_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_classes)


@dataclass(frozen=True)
class Reducer:
    """Named feature map from a document to a dense count vector."""
    name: str
    n_features: int
    fn: Callable[[Document], np.ndarray]

    def __call__(self, doc: Document) -> np.ndarray:
        return self.fn(doc)


def reduce_tg(flat: FlatView, doc: Document) -> np.ndarray:
    """Topic counts under a flat partition: f_d(t) = sum of f_d(w) over w in t."""
    return np.bincount(flat.assignment[doc.word_ids],
                       weights=doc.counts.astype(np.float64),
                       minlength=flat.n)


def reduce_lda(model: TopicModel, doc: Document,
               fold_cfg: FoldConfig | None = None) -> np.ndarray:
    """Estimated topic counts |d| * p(t|d) via fold-in against fixed phi."""
    cfg = fold_cfg or FoldConfig()
    theta = fold_in(model, doc, S=cfg.chains, sweeps=cfg.sweeps,
                    discard=cfg.discard, seed=cfg.seed)
    return float(doc.length) * theta


def tg_reducer(flat: FlatView) -> Reducer:
    return Reducer(name=f"tg(n={flat.n})", n_features=flat.n,
                   fn=lambda doc: reduce_tg(flat, doc))


def lda_reducer(model: TopicModel, fold_cfg: FoldConfig | None = None) -> Reducer:
    cfg = fold_cfg or FoldConfig()
    return Reducer(name=f"lda(n={model.n_topics})", n_features=model.n_topics,
                   fn=lambda doc: reduce_lda(model, doc, cfg))


def word_subset_reducer(word_ids, name: str = "words") -> Reducer:
    """Raw counts restricted to a word subset; features in ascending word id."""
    sel = np.unique(np.asarray(word_ids, dtype=np.int64))
    if sel.size == 0:
        raise ValueError("word subset must be non-empty")

    def fn(doc: Document) -> np.ndarray:
        vec = np.zeros(sel.size)
        pos = np.searchsorted(sel, doc.word_ids)
        pos_clipped = np.minimum(pos, sel.size - 1)
        mask = sel[pos_clipped] == doc.word_ids
        vec[pos_clipped[mask]] = doc.counts[mask]
        return vec

    return Reducer(name=f"{name}(k={sel.size})", n_features=int(sel.size), fn=fn)


def _presence_counts(labeled: LabeledCorpus) -> np.ndarray:
    corpus, labels = labeled.corpus, labeled.labels
    pres = np.zeros((labeled.n_classes, corpus.n_words))
    for w in range(corpus.n_words):
        doc_pos, _ = corpus.postings(w)
        pres[:, w] = np.bincount(labels[doc_pos], minlength=labeled.n_classes)
    return pres


def information_gain(labeled: LabeledCorpus) -> np.ndarray:
    """IG of each word's document-presence indicator about the class, in nats.

    IG(w) = H(C) - p(w) H(C | w present) - (1 - p(w)) H(C | w absent), with
    probabilities at document level.  Computed through x log x terms so empty
    branches contribute zero.
    """
    d_total = labeled.corpus.n_docs
    d_c = labeled.class_doc_counts().astype(np.float64)
    pres = _presence_counts(labeled)
    absent = d_c[:, None] - pres
    df = pres.sum(axis=0)
    dfa = d_total - df
    h_c = (xlogx(np.array([float(d_total)]))[0] - xlogx(d_c).sum()) / d_total
    present_term = (xlogx(df) - xlogx(pres).sum(axis=0)) / d_total
    absent_term = (xlogx(dfa) - xlogx(absent).sum(axis=0)) / d_total
    return h_c - present_term - absent_term


def _check_k(labeled: LabeledCorpus, k: int) -> None:
    if not 1 <= k <= labeled.corpus.n_words:
        raise ValueError(f"k must be in [1, {labeled.corpus.n_words}], got {k}")


def select_ig(labeled: LabeledCorpus, k: int) -> np.ndarray:
    """Top-k word ids by information gain; ties broken by ascending word id."""
    _check_k(labeled, k)
    ig = information_gain(labeled)
    order = np.lexsort((np.arange(ig.size), -ig))
    return np.sort(order[:k])


def select_df(labeled: LabeledCorpus, k: int) -> np.ndarray:
    """Top-k word ids by document frequency; ties broken by ascending word id."""
    _check_k(labeled, k)
    df = labeled.corpus.doc_freq
    order = np.lexsort((np.arange(df.size), -df))
    return np.sort(order[:k])


class NBModel:
    """Multinomial Naive Bayes over a reducer's feature space."""

    __slots__ = ("log_prior", "log_cond", "reducer", "class_names")

    def __init__(self, log_prior: np.ndarray, log_cond: np.ndarray,
                 reducer: Reducer, class_names: tuple[str, ...]):
        if log_prior.shape[0] != log_cond.shape[0]:
            raise ValueError("prior/conditional class count mismatch")
        if log_cond.shape[1] != reducer.n_features:
            raise ValueError("conditional width does not match reducer")
        sums = np.exp(log_cond).sum(axis=1)
        if not np.allclose(sums, 1.0, atol=1e-9):
            raise ValueError("per-class conditionals must sum to 1")
        self.log_prior = log_prior
        self.log_cond = log_cond
        self.reducer = reducer
        self.class_names = class_names

    @property
    def n_classes(self) -> int:
        return self.log_prior.shape[0]


def nb_train(labeled: LabeledCorpus, reducer: Reducer) -> NBModel:
    """Lidstone-smoothed NB: p(t|c) = (1 + sum of counts) / (n_features + total)."""
    counts = labeled.class_doc_counts()
    if np.any(counts == 0):
        empty = labeled.class_names[int(np.argmin(counts))]
        raise ValueError(f"class {empty!r} has no documents")
    n_feat = reducer.n_features
    feat = np.zeros((labeled.n_classes, n_feat))
    for i in range(labeled.corpus.n_docs):
        feat[labeled.labels[i]] += reducer(labeled.corpus.doc(i))
    log_cond = np.log1p(feat) - np.log(n_feat + feat.sum(axis=1, keepdims=True))
    log_prior = np.log(counts / labeled.corpus.n_docs)
    return NBModel(log_prior, log_cond, reducer, labeled.class_names)


def nb_classify(model: NBModel, doc: Document) -> int:
    """Most probable class id; ties resolve to the smallest id."""
    vec = model.reducer(doc)
    return int(np.argmax(model.log_prior + model.log_cond @ vec))


def micro_accuracy(model: NBModel, test: LabeledCorpus) -> float:
    """Fraction of test documents classified into their true class."""
    if test.corpus.n_docs == 0:
        raise ValueError("empty test corpus")
    correct = sum(nb_classify(model, test.corpus.doc(i)) == test.labels[i]
                  for i in range(test.corpus.n_docs))
    return correct / test.corpus.n_docs
