"""Independent brute-force references used to cross-check the package.

Everything here recomputes quantities directly from their definitions with
plain Python loops, sharing no code paths with the implementations under test.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from topictree import Corpus


# -- corpus construction -------------------------------------------------

def build_corpus(rows, n_words=None, words=None, doc_ids=None) -> Corpus:
    """Corpus from a list of {word_id: count} rows."""
    if words is None:
        if n_words is None:
            n_words = 1 + max(w for row in rows for w in row)
        words = [f"w{k}" for k in range(n_words)]
    return Corpus.from_rows(words, rows, doc_ids=doc_ids)


def random_corpus(rng, max_words=12, max_docs=8, max_count=6,
                  distinct_profiles=False) -> Corpus:
    """Small random corpus in which every word has positive frequency.

    ``distinct_profiles`` additionally rejects draws where two words have
    proportional per-document count profiles, which removes the dominant
    structural source of exactly tied merge costs (their merge would cost
    exactly zero, as would any other such pair's).
    """
    while True:
        # sizes are redrawn on rejection: a wide vocabulary over very few
        # documents makes proportional profiles a pigeonhole certainty
        v = int(rng.integers(2, max_words + 1))
        d = int(rng.integers(2, max_docs + 1))
        rows = []
        for _ in range(d):
            density = rng.uniform(0.25, 0.85)
            ids = np.flatnonzero(rng.random(v) < density)
            if ids.size == 0:
                continue
            rows.append({int(w): int(rng.integers(1, max_count + 1)) for w in ids})
        if len(rows) < 2:
            continue
        seen = set()
        for row in rows:
            seen.update(row)
        if len(seen) != v:
            continue
        if distinct_profiles:
            profiles = [tuple(row.get(w, 0) for row in rows) for w in range(v)]
            sums = [sum(p) for p in profiles]
            # exact integer test: p and q proportional iff p*sum(q) == q*sum(p)
            proportional = any(
                all(profiles[a][i] * sums[b] == profiles[b][i] * sums[a]
                    for i in range(len(rows)))
                for a in range(v) for b in range(a + 1, v))
            if proportional:
                continue
        return build_corpus(rows, n_words=v)


def heaps_corpus(seed: int, n_docs: int, doc_len: int = 100) -> Corpus:
    """Text-like corpus whose vocabulary grows as the square root of size.

    The vocabulary holds 5 * sqrt(n_docs) words and tokens are uniform, so
    the squared vocabulary tracks the document count.
    """
    rng = np.random.default_rng(seed)
    v = int(round(5.0 * math.sqrt(n_docs)))
    tokens = rng.integers(0, v, size=(n_docs, doc_len))
    rows = []
    for doc in tokens:
        ids, counts = np.unique(doc, return_counts=True)
        rows.append({int(w): int(c) for w, c in zip(ids, counts)})
    return Corpus.from_rows([f"t{k}" for k in range(v)], rows)


# -- h and merge references ----------------------------------------------

def brute_h(corpus: Corpus, word_set) -> float:
    """h of a topic straight from its definition, by plain loops."""
    words = sorted(int(w) for w in word_set)
    total = 0.0
    for doc in corpus.documents:
        f_dt = sum(doc.count_of(w) for w in words)
        if f_dt > 0:
            total += f_dt * (math.log(f_dt) - math.log(doc.length))
    f_t = 0
    for w in words:
        fw = int(corpus.global_freq[w])
        f_t += fw
        total += fw * math.log(fw)
    total -= f_t * math.log(f_t)
    return total


def brute_delta_h(corpus: Corpus, set_a, set_b) -> float:
    union = set(set_a) | set(set_b)
    return (brute_h(corpus, union) - brute_h(corpus, set_a)
            - brute_h(corpus, set_b))


def brute_pair_scan(corpus: Corpus, topics: dict[int, frozenset]):
    """All candidate pairs as (delta_h, key_a, key_b), keys ascending."""
    keys = sorted(topics)
    out = []
    for i, ka in enumerate(keys):
        for kb in keys[i + 1:]:
            out.append((brute_delta_h(corpus, topics[ka], topics[kb]), ka, kb))
    return out


def brute_greedy_merges(corpus: Corpus):
    """Full greedy agglomeration by exhaustive rescan each step.

    Returns a list of (left_words, right_words, delta_h) with left the topic
    of smaller key; ties on delta_h resolve to the smallest (key_a, key_b).
    """
    topics = {w: frozenset([w]) for w in range(corpus.n_words)}
    merges = []
    while len(topics) > 1:
        cands = brute_pair_scan(corpus, topics)
        best = max(cands, key=lambda c: (c[0], (-c[1], -c[2])))
        dh, ka, kb = best
        merges.append((topics[ka], topics[kb], dh))
        topics[ka] = topics[ka] | topics[kb]
        del topics[kb]
    return merges


# -- document probability ------------------------------------------------

def brute_doc_prob(phi, m, alpha: float, word_seq) -> float:
    """Exact p(d) by summing over every topic-assignment sequence.

    Uses the closed form of the Dirichlet expectation of a topic-count
    monomial: rising factorials of alpha*m over a rising factorial of alpha.
    """
    phi = np.asarray(phi, dtype=float)
    am = alpha * np.asarray(m, dtype=float)
    n = phi.shape[0]
    seq = list(word_seq)
    length = len(seq)
    denom = 1.0
    for j in range(length):
        denom *= alpha + j
    total = 0.0
    for assign in itertools.product(range(n), repeat=length):
        like = 1.0
        for z, w in zip(assign, seq):
            like *= phi[z, w]
        prior = 1.0
        for t in range(n):
            c = assign.count(t)
            for j in range(c):
                prior *= am[t] + j
        total += like * prior / denom
    return total


# -- error rate ----------------------------------------------------------

def brute_fold_posterior(phi, m, alpha: float, word_seq) -> np.ndarray:
    """Exact posterior mean of per-topic assignment fractions for a document.

    Enumerates every assignment sequence z, weighting by
    prod_j phi_{z_j}(w_j) times the Dirichlet-multinomial prior mass of the
    topic counts, and returns E[c_t / L | w].
    """
    phi = np.asarray(phi, dtype=float)
    am = alpha * np.asarray(m, dtype=float)
    n = phi.shape[0]
    seq = list(word_seq)
    length = len(seq)
    weights = []
    fractions = []
    for assign in itertools.product(range(n), repeat=length):
        like = 1.0
        for z, w in zip(assign, seq):
            like *= phi[z, w]
        prior = 1.0
        for t in range(n):
            c = assign.count(t)
            for j in range(c):
                prior *= am[t] + j
        weights.append(like * prior)
        fractions.append([assign.count(t) / length for t in range(n)])
    weights = np.array(weights)
    return (weights[:, None] * np.array(fractions)).sum(axis=0) / weights.sum()


def brute_error_rate(rows_a, rows_b) -> float:
    """min over bijections of the halved average L1 row distance."""
    rows_a = np.asarray(rows_a, dtype=float)
    rows_b = np.asarray(rows_b, dtype=float)
    n = rows_a.shape[0]
    best = math.inf
    for perm in itertools.permutations(range(n)):
        cost = sum(float(np.abs(rows_a[t] - rows_b[perm[t]]).sum())
                   for t in range(n))
        best = min(best, cost)
    return best / (2 * n)


# -- feature selection and NB --------------------------------------------

def brute_ig(labeled) -> np.ndarray:
    """Per-word information gain of document presence, by explicit entropies."""
    corpus = labeled.corpus
    labels = labeled.labels
    d_total = corpus.n_docs
    n_classes = labeled.n_classes

    def entropy(counts, total):
        h = 0.0
        for c in counts:
            if c > 0:
                p = c / total
                h -= p * math.log(p)
        return h

    class_counts = [int((labels == c).sum()) for c in range(n_classes)]
    h_c = entropy(class_counts, d_total)
    out = []
    for w in range(corpus.n_words):
        present = [p for p in range(d_total) if corpus.documents[p].count_of(w) > 0]
        pres = [sum(1 for p in present if labels[p] == c) for c in range(n_classes)]
        n_pres = len(present)
        n_abs = d_total - n_pres
        absent = [class_counts[c] - pres[c] for c in range(n_classes)]
        ig = h_c
        if n_pres:
            ig -= (n_pres / d_total) * entropy(pres, n_pres)
        if n_abs:
            ig -= (n_abs / d_total) * entropy(absent, n_abs)
        out.append(ig)
    return np.array(out)


def reference_word_nb(train_rows, train_labels, test_rows, n_words, n_classes):
    """Plain word-level multinomial NB with (1+x)/(V+total) smoothing."""
    sums = [[0] * n_words for _ in range(n_classes)]
    totals = [0] * n_classes
    prior = [0] * n_classes
    for row, c in zip(train_rows, train_labels):
        prior[c] += 1
        for w, x in row.items():
            sums[c][w] += x
            totals[c] += x
    preds = []
    for row in test_rows:
        best, best_score = None, None
        for c in range(n_classes):
            score = math.log(prior[c] / len(train_rows))
            for w, x in row.items():
                score += x * math.log((1 + sums[c][w]) / (n_words + totals[c]))
            if best_score is None or score > best_score:
                best, best_score = c, score
        preds.append(best)
    return preds
