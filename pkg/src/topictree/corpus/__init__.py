"""Corpus ingestion, preprocessing, splitting, and synthesis."""
from .ingest import TokenizerOptions, ingest_bow, ingest_text, ingest_transactions
from .model import Corpus, CorpusError, Document, Vocabulary, split
from .porter import porter_stem
from .synthetic import SyntheticSpec, TrueModel, generate_synthetic

__all__ = [
    "Corpus",
    "CorpusError",
    "Document",
    "Vocabulary",
    "split",
    "ingest_bow",
    "ingest_transactions",
    "ingest_text",
    "TokenizerOptions",
    "porter_stem",
    "SyntheticSpec",
    "TrueModel",
    "generate_synthetic",
]
