"""Release gates: one test per behavioral guarantee of the toolkit.

Each test is a single pass/fail check of one end-to-end promise, run on
fixed seeds so a failure is reproducible.  The shared synthetic bundle uses
the generator defaults (400 words, 4 topics, 6000 documents of 30 tokens)
with generation seed 7 and a 75/25 split under seed 11.
"""
import math
import time
from types import SimpleNamespace

import numpy as np
import pytest

from topictree import (
    EstimatorConfig,
    LabeledCorpus,
    SyntheticSpec,
    TopicModel,
    delta_h_series,
    error_rate,
    fit_alpha,
    flat_view,
    generate_synthetic,
    gibbs_train,
    log_prob_doc_lrs,
    micro_accuracy,
    nb_train,
    perfect_model,
    perplexity,
    reduce_tg,
    split,
    tg_reducer,
    tg_to_model,
    train_ehac,
    train_mehac,
    unigram_model,
    word_subset_reducer,
)

from oracles import (
    brute_doc_prob,
    brute_pair_scan,
    build_corpus,
    heaps_corpus,
    random_corpus,
)


@pytest.fixture(scope="module")
def bundle():
    """Synthetic corpus, split, trained merge tree, and reference models."""
    t0 = time.perf_counter()
    corpus, truth = generate_synthetic(SyntheticSpec(seed=7))
    train, test = split(corpus, 0.25, seed=11)
    dendro = train_ehac(train)
    seconds = time.perf_counter() - t0
    return SimpleNamespace(train=train, test=test, truth=truth,
                           dendro=dendro, seconds=seconds)


def replicated_unigram(corpus, n):
    """The no-structure baseline: n identical vocabulary-frequency topics."""
    uni = unigram_model(corpus)
    return TopicModel(uni.vocab, np.tile(uni.phi, (n, 1)), np.full(n, 1.0 / n))


def test_01_synthetic_topic_recovery(bundle):
    """Groupwise training recovers planted topics far better than no structure
    and close to the generating model, within the runtime budget."""
    tg = tg_to_model(bundle.dendro, bundle.train, 4)
    err_tg = error_rate(tg, bundle.truth)
    err_uni = error_rate(replicated_unigram(bundle.train, 4), bundle.truth)
    err_perfect = error_rate(perfect_model(bundle.truth, bundle.train),
                             bundle.truth)
    assert err_tg < 0.5 * err_uni
    assert abs(err_tg - err_perfect) <= 0.15
    assert bundle.seconds < 300.0


def test_02_merge_cost_ratio_selects_topic_count(bundle):
    """The largest merge-cost ratio over n in [2, 20] lands on n=3, marking
    the sharp drop where dissimilar topics start being forced together."""
    series = delta_h_series(bundle.dendro)
    window = [(n, ratio) for n, _, ratio in series
              if 2 <= n <= 20 and ratio is not None]
    assert len(window) == 19
    best_n = max(window, key=lambda item: item[1])[0]
    assert best_n == 3


def test_03_every_merge_attains_the_exhaustive_optimum():
    """On 100 small random corpora, each chosen merge realizes the maximal
    delta_h over all live pairs, to 1e-9."""
    rng = np.random.default_rng(20260823)
    for _ in range(100):
        corpus = random_corpus(rng, max_words=12, max_docs=8)
        dendro = train_ehac(corpus)
        topics = {w: frozenset([w]) for w in range(corpus.n_words)}
        for rec in dendro.merges:
            scan = brute_pair_scan(corpus, {min(s): s for s in topics.values()})
            best = max(dh for dh, _, _ in scan)
            left, right = topics.pop(rec.left), topics.pop(rec.right)
            ka, kb = sorted((min(left), min(right)))
            chosen = next(dh for dh, a, b in scan if (a, b) == (ka, kb))
            assert abs(rec.delta_h - chosen) <= 1e-9
            assert chosen >= best - 1e-9
            topics[rec.new] = left | right


def test_04_both_trainers_produce_identical_sequences():
    """The all-pairs and the memory-efficient trainer pick the same merges
    on 50 random corpora free of exactly tied pair costs."""
    rng = np.random.default_rng(42)
    for _ in range(50):
        corpus = random_corpus(rng, max_words=60, max_docs=12,
                               distinct_profiles=True)
        a = train_ehac(corpus)
        b = train_mehac(corpus)
        assert [(r.left, r.right, r.new) for r in a.merges] == \
               [(r.left, r.right, r.new) for r in b.merges]


def test_05_likelihood_identities(bundle):
    """Recorded h values satisfy the closed forms at the all-singleton and
    one-topic extremes, telescope across merges, and every merge cost is
    non-positive."""
    rng = np.random.default_rng(5)
    cases = [(random_corpus(rng, max_words=14, max_docs=8), None)
             for _ in range(20)]
    cases.append((bundle.train, bundle.dendro))
    for corpus, dendro in cases:
        if dendro is None:
            dendro = train_ehac(corpus)
        v = corpus.n_words

        singleton_sum = float(flat_view(dendro, v).h.sum())
        expected = sum(
            float(np.sum(doc.counts * (np.log(doc.counts) - math.log(doc.length))))
            for doc in corpus.documents)
        assert singleton_sum == pytest.approx(expected, rel=1e-9, abs=1e-9)

        root_h = float(flat_view(dendro, 1).h[0])
        f = corpus.global_freq.astype(float)
        total = f.sum()
        assert root_h == pytest.approx(
            float(np.sum(f * np.log(f)) - total * math.log(total)),
            rel=1e-9, abs=1e-9)

        telescoped = singleton_sum + sum(r.delta_h for r in dendro.merges)
        assert telescoped == pytest.approx(root_h, rel=1e-9, abs=1e-9)

        assert all(r.delta_h <= 1e-12 for r in dendro.merges)


def test_06_sequential_estimator_matches_enumeration():
    """On 20 tiny documents the estimator's 200-seed mean agrees with exact
    enumeration of the document marginal within 3 standard errors, and the
    single-topic case is exact."""
    model = TopicModel(["w0", "w1", "w2", "w3"],
                       [[0.6, 0.3, 0.1, 0.0], [0.05, 0.05, 0.3, 0.6]],
                       [0.7, 0.3], alpha=0.8)
    rng = np.random.default_rng(12)
    for _ in range(20):
        seq = rng.integers(0, 4, size=int(rng.integers(1, 4))).tolist()
        row = {}
        for w in seq:
            row[w] = row.get(w, 0) + 1
        corpus = build_corpus([{0: 1, 1: 1, 2: 1, 3: 1}, row], n_words=4)
        doc = corpus.documents[1]
        truth = math.log(brute_doc_prob(model.phi, model.m, 0.8, seq))
        estimates = np.array([log_prob_doc_lrs(model, doc, R=10, seed=s)
                              for s in range(200)])
        se = float(estimates.std(ddof=1)) / math.sqrt(200)
        # the epsilon floor covers short documents the estimator gets
        # deterministically right, where the standard error is zero
        assert abs(float(estimates.mean()) - truth) <= 3.0 * se + 1e-12 * abs(truth)

    single = TopicModel(["w0", "w1", "w2", "w3"],
                        [[0.4, 0.3, 0.2, 0.1]], [1.0], alpha=1.0)
    corpus = build_corpus([{0: 1, 1: 1, 2: 1, 3: 1}, {0: 2, 2: 1, 3: 1}],
                          n_words=4)
    doc = corpus.documents[1]
    exact = float(np.sum(doc.counts * np.log(single.phi[0][doc.word_ids])))
    got = log_prob_doc_lrs(single, doc, R=7, seed=3)
    assert got == pytest.approx(exact, rel=1e-12)


def test_07_heldout_perplexity_ordering(bundle):
    """Grouped and generating models both beat the unigram baseline on
    held-out perplexity."""
    cfg = EstimatorConfig(particles=10, seed=5, max_docs=300)
    tg = fit_alpha(tg_to_model(bundle.dendro, bundle.train, 4),
                   bundle.test, cfg)
    perfect = fit_alpha(perfect_model(bundle.truth, bundle.train),
                        bundle.test, cfg)
    uni = unigram_model(bundle.train)
    perp_tg = perplexity(tg, bundle.test, R=10, seed=5).perplexity
    perp_perfect = perplexity(perfect, bundle.test, R=10, seed=5).perplexity
    perp_uni = perplexity(uni, bundle.test, R=10, seed=5).perplexity
    assert perp_tg < perp_uni
    assert perp_perfect < perp_uni


def test_08_gibbs_baseline_beats_no_structure(bundle):
    """A 500-sweep collapsed Gibbs run with the stated hyperparameters
    recovers enough structure to beat the replicated-unigram error rate,
    with its count caches verified against the assignments."""
    model, state = gibbs_train(bundle.train, 4,
                               alpha_m=np.array([5.0, 0.5, 0.5, 0.5]),
                               beta=0.1, iterations=500, burn_in=200,
                               seed=0, return_state=True)
    err_lda = error_rate(model, bundle.truth)
    err_uni = error_rate(replicated_unigram(bundle.train, 4), bundle.truth)
    assert err_lda < err_uni

    _, words, counts = bundle.train.doc_arrays()
    token_words = np.repeat(words, counts)
    n_tw = np.zeros((4, bundle.train.n_words), dtype=np.int64)
    np.add.at(n_tw, (state.z, token_words), 1)
    assert np.array_equal(n_tw, state.n_tw)
    assert np.array_equal(n_tw.sum(axis=1), state.n_t)


def test_09_full_resolution_features_equal_word_nb():
    """With one topic per word, topic-count features reproduce word-level
    Naive Bayes exactly, and topic counts always resum to document length."""
    rows = [{0: 4, 1: 2, 4: 1}, {0: 3, 1: 3}, {0: 2, 1: 1, 5: 1},
            {2: 4, 3: 2, 4: 1}, {2: 3, 3: 2}, {2: 2, 3: 3, 5: 2},
            {4: 3, 5: 3, 0: 1}, {4: 2, 5: 4}, {4: 4, 5: 1, 2: 1}]
    labels = [0, 0, 0, 1, 1, 1, 2, 2, 2]
    test_rows = [{0: 2, 1: 2}, {0: 1, 1: 3, 4: 1}, {2: 3, 3: 1},
                 {3: 4, 5: 1}, {4: 2, 5: 2}, {5: 3, 0: 1}]
    names = ["alpha", "beta", "gamma"]
    ltrain = LabeledCorpus(build_corpus(rows, n_words=6), labels, names)
    ltest = LabeledCorpus(build_corpus(test_rows, n_words=6),
                          [0, 0, 1, 1, 2, 2], names)

    dendro = train_ehac(ltrain.corpus)
    nb_tg = nb_train(ltrain, tg_reducer(flat_view(dendro, 6)))
    nb_words = nb_train(ltrain, word_subset_reducer(range(6)))
    assert micro_accuracy(nb_tg, ltest) == micro_accuracy(nb_words, ltest)

    for n in range(1, 7):
        view = flat_view(dendro, n)
        for doc in ltrain.corpus.documents:
            assert float(reduce_tg(view, doc).sum()) == float(doc.length)


def test_10_training_time_grows_superlinearly():
    """Doubling the document count of a text-like corpus (vocabulary growing
    with its square root) multiplies all-pairs training time by 2.5x to 8x,
    the footprint of roughly quadratic growth in corpus size."""
    train_ehac(heaps_corpus(1, 200))  # warm caches before timing
    times = []
    for seed, n_docs in ((97, 2000), (98, 4000), (99, 8000)):
        corpus = heaps_corpus(seed, n_docs)
        best = math.inf
        for _ in range(3):
            t0 = time.perf_counter()
            train_ehac(corpus)
            best = min(best, time.perf_counter() - t0)
        times.append(best)
    first = times[1] / times[0]
    second = times[2] / times[1]
    assert 2.5 <= first <= 8.0
    assert 2.5 <= second <= 8.0
