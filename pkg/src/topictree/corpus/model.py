"""Immutable sparse corpus structures shared by every other component.

A corpus is a list of documents over a dense integer vocabulary, stored
sparsely (per-document word ids and counts) together with global word
frequencies and an inverted index.  All downstream math works on word ids;
surface strings matter only at the ingestion and reporting boundaries.
"""
from __future__ import annotations

from typing import Iterable, Mapping, Sequence

import numpy as np


class CorpusError(ValueError):
    """Raised when input data violates a corpus invariant."""


class Vocabulary:
    """Bijective mapping between surface strings and dense word ids 0..|V|-1."""

    __slots__ = ("words", "index")

    def __init__(self, words: Iterable[str]):
        words = tuple(words)
        if not words:
            raise CorpusError("vocabulary must contain at least one word")
        index: dict[str, int] = {}
        for i, w in enumerate(words):
            if not isinstance(w, str) or not w:
                raise CorpusError("vocabulary words must be non-empty strings")
            if w in index:
                raise CorpusError(f"duplicate vocabulary word {w!r}")
            index[w] = i
        self.words = words
        self.index = index

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def __iter__(self):
        return iter(self.words)

    def id_of(self, word: str) -> int:
        return self.index[word]

    def word_of(self, word_id: int) -> str:
        return self.words[word_id]

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocabulary) and self.words == other.words

    def __repr__(self) -> str:
        return f"Vocabulary({len(self.words)} words)"


class Document:
    """Sparse word counts of one document.

    ``doc_id`` is a stable identifier assigned at ingestion; it survives
    splitting and reordering, which keeps per-document evaluation seeds
    independent of document order.  ``word_ids`` is strictly ascending and
    ``counts`` entries are all >= 1, so the document length is positive.
    """

    __slots__ = ("doc_id", "word_ids", "counts", "length")

    def __init__(self, doc_id: int, word_ids, counts):
        word_ids = np.ascontiguousarray(word_ids, dtype=np.int64)
        counts = np.ascontiguousarray(counts, dtype=np.int64)
        if word_ids.ndim != 1 or counts.shape != word_ids.shape:
            raise CorpusError("word_ids and counts must be 1-d arrays of equal length")
        if word_ids.size == 0:
            raise CorpusError("document must contain at least one word occurrence")
        if np.any(np.diff(word_ids) <= 0):
            raise CorpusError("word_ids must be strictly ascending")
        if np.any(counts < 1):
            raise CorpusError("all counts must be >= 1")
        self.doc_id = int(doc_id)
        self.word_ids = word_ids
        self.counts = counts
        self.length = int(counts.sum())

    def count_of(self, word_id: int) -> int:
        pos = np.searchsorted(self.word_ids, word_id)
        if pos < self.word_ids.size and self.word_ids[pos] == word_id:
            return int(self.counts[pos])
        return 0

    def items(self):
        return zip(self.word_ids.tolist(), self.counts.tolist())

    def __repr__(self) -> str:
        return f"Document(id={self.doc_id}, types={self.word_ids.size}, length={self.length})"


class Corpus:
    """Immutable document collection with global frequencies and inverted index.

    Positions (0..|D|-1) index every per-document array; ``documents[k].doc_id``
    is metadata that need not equal k.  Invariants enforced at construction:
    every word id is < |V|, every global frequency is positive, and every
    document is non-empty.

    ``allow_zero_freq`` relaxes the positive-frequency invariant for the one
    legitimate case: the test side of a split, which is expressed over the
    training vocabulary and may miss some of its words.  Training rejects such
    corpora.
    """

    __slots__ = (
        "vocabulary",
        "documents",
        "doc_names",
        "global_freq",
        "doc_lengths",
        "_log_doc_lengths",
        "_doc_ptr",
        "_doc_words",
        "_doc_counts",
        "_inv_ptr",
        "_inv_docs",
        "_inv_counts",
    )

    def __init__(self, vocabulary: Vocabulary, documents: Sequence[Document],
                 doc_names: Sequence[str] | None = None,
                 allow_zero_freq: bool = False):
        documents = tuple(documents)
        if not documents:
            raise CorpusError("corpus must contain at least one document")
        if doc_names is not None:
            doc_names = tuple(doc_names)
            if len(doc_names) != len(documents):
                raise CorpusError("doc_names length must match document count")
        n_words = len(vocabulary)
        seen_ids = set()
        for doc in documents:
            if doc.word_ids[-1] >= n_words:
                raise CorpusError(
                    f"document {doc.doc_id} references word id {int(doc.word_ids[-1])} "
                    f">= |V|={n_words}")
            if doc.doc_id in seen_ids:
                raise CorpusError(f"duplicate document id {doc.doc_id}")
            seen_ids.add(doc.doc_id)

        self.vocabulary = vocabulary
        self.documents = documents
        self.doc_names = doc_names

        lengths = np.fromiter((d.word_ids.size for d in documents), dtype=np.int64,
                              count=len(documents))
        ptr = np.zeros(len(documents) + 1, dtype=np.int64)
        np.cumsum(lengths, out=ptr[1:])
        self._doc_ptr = ptr
        self._doc_words = np.concatenate([d.word_ids for d in documents])
        self._doc_counts = np.concatenate([d.counts for d in documents])
        self.doc_lengths = np.fromiter((d.length for d in documents), dtype=np.int64,
                                       count=len(documents))
        self._log_doc_lengths = np.log(self.doc_lengths.astype(np.float64))

        freq = np.bincount(self._doc_words, weights=self._doc_counts, minlength=n_words)
        freq = freq.astype(np.int64)
        if not allow_zero_freq and np.any(freq <= 0):
            missing = int(np.flatnonzero(freq <= 0)[0])
            raise CorpusError(
                f"word {vocabulary.word_of(missing)!r} (id {missing}) has zero corpus frequency")
        self.global_freq = freq

        # Inverted index as CSR over word ids: for word w the documents (by
        # position) containing w and the counts f_d(w).
        positions = np.repeat(np.arange(len(documents), dtype=np.int64), lengths)
        order = np.argsort(self._doc_words, kind="stable")
        sorted_words = self._doc_words[order]
        self._inv_docs = positions[order]
        self._inv_counts = self._doc_counts[order]
        inv_ptr = np.zeros(n_words + 1, dtype=np.int64)
        np.cumsum(np.bincount(sorted_words, minlength=n_words), out=inv_ptr[1:])
        self._inv_ptr = inv_ptr

    # -- basic shape -----------------------------------------------------

    @property
    def n_docs(self) -> int:
        return len(self.documents)

    @property
    def n_words(self) -> int:
        return len(self.vocabulary)

    @property
    def n_tokens(self) -> int:
        return int(self.doc_lengths.sum())

    # -- access ----------------------------------------------------------

    def doc(self, position: int) -> Document:
        return self.documents[position]

    def postings(self, word_id: int) -> tuple[np.ndarray, np.ndarray]:
        """Documents containing ``word_id`` as (positions, counts), positions ascending."""
        lo, hi = self._inv_ptr[word_id], self._inv_ptr[word_id + 1]
        return self._inv_docs[lo:hi], self._inv_counts[lo:hi]

    @property
    def doc_freq(self) -> np.ndarray:
        """Number of documents containing each word."""
        return np.diff(self._inv_ptr)

    def doc_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Document-major CSR view: (ptr, word_ids, counts) over positions."""
        return self._doc_ptr, self._doc_words, self._doc_counts

    @property
    def log_doc_lengths(self) -> np.ndarray:
        return self._log_doc_lengths

    def name_of(self, position: int) -> str:
        if self.doc_names is not None:
            return self.doc_names[position]
        return str(self.documents[position].doc_id)

    # -- construction helpers -------------------------------------------

    @classmethod
    def from_rows(cls, words: Sequence[str],
                  rows: Sequence[Mapping[int, int] | Sequence[tuple[int, int]]],
                  doc_names: Sequence[str] | None = None,
                  doc_ids: Sequence[int] | None = None,
                  compact: bool = True) -> "Corpus":
        """Build a corpus from per-document {word_id: count} rows.

        With ``compact`` (the default) words whose total count is zero are
        dropped and ids are renumbered, preserving relative order; empty rows
        are dropped together with their names.  ``doc_ids`` defaults to row
        positions.
        """
        n = len(words)
        totals = np.zeros(n, dtype=np.int64)
        items_per_row = []
        for row in rows:
            pairs = sorted(row.items()) if isinstance(row, Mapping) else sorted(row)
            ids = np.array([p[0] for p in pairs], dtype=np.int64)
            cnts = np.array([p[1] for p in pairs], dtype=np.int64)
            if ids.size:
                if ids[0] < 0 or ids[-1] >= n:
                    raise CorpusError("word id out of range in row")
                if np.any(cnts < 1):
                    raise CorpusError("all counts must be >= 1")
                np.add.at(totals, ids, cnts)
            items_per_row.append((ids, cnts))

        if compact:
            keep = totals > 0
            remap = -np.ones(n, dtype=np.int64)
            remap[keep] = np.arange(int(keep.sum()))
            kept_words = [w for w, k in zip(words, keep) if k]
        else:
            if np.any(totals <= 0):
                raise CorpusError("zero-frequency word with compact=False")
            remap = np.arange(n)
            kept_words = list(words)
        if not kept_words:
            raise CorpusError("corpus is empty after dropping zero-frequency words")

        docs = []
        names = []
        for pos, (ids, cnts) in enumerate(items_per_row):
            if ids.size == 0:
                continue
            doc_id = doc_ids[pos] if doc_ids is not None else pos
            docs.append(Document(doc_id, remap[ids], cnts))
            if doc_names is not None:
                names.append(doc_names[pos])
        if not docs:
            raise CorpusError("corpus must contain at least one non-empty document")
        return cls(Vocabulary(kept_words), docs, names if doc_names is not None else None)

    # -- persistence -----------------------------------------------------

    CACHE_VERSION = 1

    def save_npz(self, path: str) -> None:
        """Write the internal binary cache (versioned npz)."""
        payload = {
            "version": np.array([self.CACHE_VERSION], dtype=np.int64),
            "words": np.array(self.vocabulary.words, dtype=np.str_),
            "doc_ptr": self._doc_ptr,
            "doc_words": self._doc_words,
            "doc_counts": self._doc_counts,
            "doc_ids": np.array([d.doc_id for d in self.documents], dtype=np.int64),
        }
        if self.doc_names is not None:
            payload["doc_names"] = np.array(self.doc_names, dtype=np.str_)
        with open(path, "wb") as fh:
            np.savez_compressed(fh, **payload)

    @classmethod
    def load_npz(cls, path: str) -> "Corpus":
        with np.load(path, allow_pickle=False) as data:
            version = int(data["version"][0])
            if version != cls.CACHE_VERSION:
                raise CorpusError(f"unsupported corpus cache version {version}")
            words = [str(w) for w in data["words"]]
            ptr = data["doc_ptr"]
            doc_words = data["doc_words"]
            doc_counts = data["doc_counts"]
            doc_ids = data["doc_ids"]
            names = [str(x) for x in data["doc_names"]] if "doc_names" in data else None
        docs = [Document(int(doc_ids[k]), doc_words[ptr[k]:ptr[k + 1]],
                         doc_counts[ptr[k]:ptr[k + 1]])
                for k in range(len(ptr) - 1)]
        # The test side of a split may carry zero-frequency vocabulary words;
        # a cache round-trip must not reject what save_npz accepted.
        return cls(Vocabulary(words), docs, names, allow_zero_freq=True)


def split(corpus: Corpus, test_ratio: float, seed: int,
          min_train_freq: int = 1) -> tuple[Corpus, Corpus]:
    """Split a corpus into (train, test) by a seeded random document draw.

    A seeded permutation assigns round(test_ratio * |D|) documents to the test
    side.  The training vocabulary keeps words whose training frequency is at
    least ``min_train_freq``; the test documents are then re-expressed over the
    training vocabulary with out-of-vocabulary occurrences dropped.  Documents
    emptied by either filter are dropped.  Document ids are preserved, so the
    same document keeps its evaluation seed on either side.
    """
    if not (0.0 < test_ratio < 1.0):
        raise CorpusError("test_ratio must lie strictly between 0 and 1")
    if min_train_freq < 1:
        raise CorpusError("min_train_freq must be >= 1")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(corpus.n_docs)
    n_test = int(round(test_ratio * corpus.n_docs))
    if n_test == 0 or n_test == corpus.n_docs:
        raise CorpusError("split leaves one side empty; adjust test_ratio")
    test_pos = np.sort(perm[:n_test])
    train_pos = np.sort(perm[n_test:])

    train_freq = np.zeros(corpus.n_words, dtype=np.int64)
    for p in train_pos:
        d = corpus.documents[p]
        np.add.at(train_freq, d.word_ids, d.counts)
    keep = train_freq >= min_train_freq
    if not np.any(keep):
        raise CorpusError("no word meets min_train_freq on the training side")
    remap = -np.ones(corpus.n_words, dtype=np.int64)
    remap[keep] = np.arange(int(keep.sum()))
    kept_words = [w for w, k in zip(corpus.vocabulary.words, keep) if k]

    def rebuild(positions: np.ndarray, is_test: bool) -> Corpus:
        docs = []
        names = [] if corpus.doc_names is not None else None
        for p in positions:
            d = corpus.documents[p]
            mask = keep[d.word_ids]
            if not np.any(mask):
                continue
            docs.append(Document(d.doc_id, remap[d.word_ids[mask]], d.counts[mask]))
            if names is not None:
                names.append(corpus.doc_names[p])
        if not docs:
            raise CorpusError("split produced an empty corpus side")
        return Corpus(Vocabulary(kept_words), docs, names, allow_zero_freq=is_test)

    return rebuild(train_pos, False), rebuild(test_pos, True)
