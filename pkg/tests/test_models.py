"""Evaluable topic models: construction, conversions, persistence."""
import numpy as np
import pytest

from topictree import (
    TopicModel,
    TrueModel,
    perfect_model,
    tg_to_model,
    train_ehac,
    unigram_model,
)

from oracles import build_corpus, random_corpus


class TestTopicModelValidation:
    def test_minimal_model(self):
        m = TopicModel(["a", "b"], [[0.5, 0.5]], [1.0])
        assert m.n_topics == 1
        assert m.alpha is None

    def test_shape_checks(self):
        with pytest.raises(ValueError, match="phi must be"):
            TopicModel(["a", "b"], [0.5, 0.5], [1.0])
        with pytest.raises(ValueError, match="one entry per topic"):
            TopicModel(["a", "b"], [[0.5, 0.5]], [0.5, 0.5])

    def test_negative_rejected(self):
        with pytest.raises(ValueError, match="non-negative"):
            TopicModel(["a", "b"], [[1.5, -0.5]], [1.0])

    def test_row_sum_checks(self):
        with pytest.raises(ValueError, match="phi row"):
            TopicModel(["a", "b"], [[0.6, 0.6]], [1.0])
        with pytest.raises(ValueError, match="m must sum"):
            TopicModel(["a", "b"], [[0.5, 0.5], [1.0, 0.0]], [0.9, 0.2])

    def test_uncovered_word_rejected(self):
        with pytest.raises(ValueError, match="'b' has zero mass"):
            TopicModel(["a", "b"], [[1.0, 0.0]], [1.0])

    def test_alpha_checks(self):
        with pytest.raises(ValueError, match="alpha"):
            TopicModel(["a", "b"], [[0.5, 0.5]], [1.0], alpha=0.0)
        m = TopicModel(["a", "b"], [[0.5, 0.5]], [1.0], alpha=2.5)
        assert m.alpha == 2.5

    def test_with_alpha_copies(self):
        base = TopicModel(["a", "b"], [[0.5, 0.5]], [1.0])
        fitted = base.with_alpha(3.0)
        assert fitted.alpha == 3.0
        assert base.alpha is None
        assert np.array_equal(fitted.phi, base.phi)


class TestGroupedConversion:
    def test_two_topics(self, tiny_corpus):
        d = train_ehac(tiny_corpus)
        model = tg_to_model(d, tiny_corpus, 2)
        # topic 0 is {b, c} (f=3), topic 1 is {a} (f=2)
        assert model.n_topics == 2
        assert model.phi[0].tolist() == [0.0, 2 / 3, 1 / 3]
        assert model.phi[1].tolist() == [1.0, 0.0, 0.0]
        assert model.m.tolist() == [3 / 5, 2 / 5]
        assert model.alpha is None

    def test_all_singletons(self, tiny_corpus):
        d = train_ehac(tiny_corpus)
        model = tg_to_model(d, tiny_corpus, 3)
        expected = np.eye(3)
        assert np.array_equal(model.phi, expected)
        assert model.m.tolist() == [2 / 5, 2 / 5, 1 / 5]

    def test_single_topic_equals_unigram(self, tiny_corpus):
        d = train_ehac(tiny_corpus)
        grouped = tg_to_model(d, tiny_corpus, 1)
        baseline = unigram_model(tiny_corpus)
        assert np.array_equal(grouped.phi, baseline.phi)
        assert grouped.m.tolist() == [1.0]

    def test_disjoint_supports_and_row_sums(self):
        rng = np.random.default_rng(70)
        corpus = random_corpus(rng, max_words=15, max_docs=8)
        d = train_ehac(corpus)
        for n in range(1, corpus.n_words + 1):
            model = tg_to_model(d, corpus, n)
            assert np.allclose(model.phi.sum(axis=1), 1.0, atol=1e-12)
            support_count = (model.phi > 0).sum(axis=0)
            assert np.all(support_count == 1)
            assert model.m.sum() == pytest.approx(1.0, abs=1e-12)

    def test_vocab_mismatch(self, tiny_corpus):
        d = train_ehac(tiny_corpus)
        other = build_corpus([{0: 1, 1: 1, 2: 1}], words=["x", "y", "z"])
        with pytest.raises(ValueError, match="vocabulary does not match"):
            tg_to_model(d, other, 2)


class TestUnigram:
    def test_values(self, tiny_corpus):
        model = unigram_model(tiny_corpus)
        assert model.n_topics == 1
        assert model.phi[0].tolist() == [0.4, 0.4, 0.2]
        assert model.m.tolist() == [1.0]
        assert model.alpha == 1.0

    def test_custom_alpha(self, tiny_corpus):
        assert unigram_model(tiny_corpus, alpha=7.0).alpha == 7.0


class TestPerfect:
    @pytest.fixture()
    def truth(self):
        return TrueModel(
            words=["w0", "w1", "w2", "w3"],
            topic_word=[[0.5, 0.5, 0.0, 0.0], [0.0, 0.0, 0.7, 0.3]],
            word_topic=[0, 0, 1, 1],
        )

    def test_frequency_estimates(self, truth):
        train = build_corpus([{0: 3, 2: 2}, {1: 1, 2: 1, 3: 1}],
                             words=["w0", "w1", "w2", "w3"])
        model = perfect_model(truth, train)
        # block 0 = {w0, w1} with f = (3, 1); block 1 = {w2, w3} with f = (3, 1)
        assert model.phi[0].tolist() == [0.75, 0.25, 0.0, 0.0]
        assert model.phi[1].tolist() == [0.0, 0.0, 0.75, 0.25]
        assert model.m.tolist() == [0.5, 0.5]

    def test_train_vocab_may_be_smaller(self, truth):
        train = build_corpus([{0: 2}, {1: 2, 2: 4}], words=["w0", "w1", "w2"])
        model = perfect_model(truth, train)
        assert model.phi.shape == (2, 3)
        assert model.phi[0].tolist() == [0.5, 0.5, 0.0]
        assert model.phi[1].tolist() == [0.0, 0.0, 1.0]

    def test_unknown_word_rejected(self, truth):
        train = build_corpus([{0: 1, 1: 2}], words=["w0", "mystery"])
        with pytest.raises(ValueError, match="'mystery' is unknown"):
            perfect_model(truth, train)

    def test_empty_block_rejected(self, truth):
        train = build_corpus([{0: 1, 1: 2}], words=["w0", "w1"])
        with pytest.raises(ValueError, match="true topic 1 has no training"):
            perfect_model(truth, train)


class TestPersistence:
    def test_round_trip_sparse_rows(self, tiny_corpus, tmp_path):
        d = train_ehac(tiny_corpus)
        model = tg_to_model(d, tiny_corpus, 2)
        path = tmp_path / "model.json"
        model.save_json(str(path))
        back = TopicModel.load_json(str(path))
        assert back.vocab == model.vocab
        assert np.array_equal(back.phi, model.phi)
        assert np.array_equal(back.m, model.m)
        assert back.alpha is None

    def test_round_trip_with_alpha_and_meta(self, tmp_path):
        model = TopicModel(["a", "b"], [[0.25, 0.75]], [1.0], alpha=4.5)
        path = tmp_path / "model.json"
        model.save_json(str(path), meta={"origin": "unit"})
        back = TopicModel.load_json(str(path))
        assert back.alpha == 4.5
        from topictree._util import read_json
        assert read_json(str(path))["meta"] == {"origin": "unit"}

    def test_reject_foreign_documents(self):
        with pytest.raises(ValueError, match="not a supported topic-model"):
            TopicModel.from_dict({"kind": "dendrogram", "version": 1})
        with pytest.raises(ValueError, match="not a supported topic-model"):
            TopicModel.from_dict({"kind": "topic-model", "version": 99})
