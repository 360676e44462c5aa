"""Disjoint-partition topic modeling by agglomerative vocabulary clustering.

The package trains a merge tree over the vocabulary (every cut is a topic
model whose topics partition the words), evaluates models by held-out
perplexity and by error rate against synthetic truth, and applies them as
feature reducers for Naive-Bayes classification.  The ``topictree`` command
exposes the pipeline; ``topictree serve`` backs the bundled explorer UI.
"""
from ._util import derive_seed
from .corpus import (Corpus, CorpusError, Document, SyntheticSpec,
                     TokenizerOptions, TrueModel, Vocabulary,
                     generate_synthetic, ingest_bow, ingest_text,
                     ingest_transactions, porter_stem, split)
from .grouping import (Dendrogram, FlatView, MemoryBudgetError, MergeRecord,
                       TopicState, delta_h, delta_h_series, flat_view,
                       h_merged, h_pair, h_singleton, train_ehac, train_mehac)
from .evaluation import (EstimatorConfig, PerplexityReport, TopicModel,
                         error_rate, fit_alpha, log_prob_doc_lrs, perfect_model,
                         perplexity, tg_to_model, unigram_model)
from .lda import FoldConfig, GibbsState, fold_in, gibbs_train, heuristic_hypers
from .classify import (LabeledCorpus, NBModel, Reducer, information_gain,
                       lda_reducer, micro_accuracy, nb_classify, nb_train,
                       reduce_lda, reduce_tg, select_df, select_ig, tg_reducer,
                       word_subset_reducer)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "derive_seed",
    # corpus
    "Corpus", "CorpusError", "Document", "Vocabulary", "split",
    "ingest_bow", "ingest_transactions", "ingest_text", "TokenizerOptions",
    "porter_stem", "SyntheticSpec", "TrueModel", "generate_synthetic",
    # grouping
    "TopicState", "h_singleton", "h_pair", "h_merged", "delta_h",
    "MergeRecord", "Dendrogram", "FlatView", "MemoryBudgetError",
    "train_ehac", "train_mehac", "flat_view", "delta_h_series",
    # evaluation
    "TopicModel", "tg_to_model", "unigram_model", "perfect_model",
    "EstimatorConfig", "PerplexityReport", "log_prob_doc_lrs", "perplexity",
    "fit_alpha", "error_rate",
    # lda baseline
    "GibbsState", "FoldConfig", "heuristic_hypers", "gibbs_train", "fold_in",
    # classification
    "LabeledCorpus", "NBModel", "Reducer", "reduce_tg", "reduce_lda",
    "tg_reducer", "lda_reducer", "word_subset_reducer", "information_gain",
    "select_ig", "select_df", "nb_train", "nb_classify", "micro_accuracy",
]
