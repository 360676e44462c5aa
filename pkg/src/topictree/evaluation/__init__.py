"""Model conversion, held-out perplexity, and error rate against truth."""
from .error import error_rate
from .model import TopicModel, perfect_model, tg_to_model, unigram_model
from .perplexity import (
    EstimatorConfig,
    PerplexityReport,
    fit_alpha,
    log_prob_doc_lrs,
    perplexity,
)

__all__ = [
    "TopicModel",
    "tg_to_model",
    "unigram_model",
    "perfect_model",
    "error_rate",
    "EstimatorConfig",
    "PerplexityReport",
    "log_prob_doc_lrs",
    "perplexity",
    "fit_alpha",
]
