"""Corpus ingestion: UCI bag-of-words, transaction CSV, and raw text."""
from __future__ import annotations

import csv
import os
from dataclasses import dataclass

from .model import Corpus, CorpusError
from .porter import porter_stem

__all__ = ["ingest_bow", "ingest_transactions", "ingest_text", "TokenizerOptions"]


def ingest_bow(path: str, vocab_path: str | None = None) -> Corpus:
    """Read a UCI bag-of-words file.

    Format: three header lines D, W, NNZ, then exactly NNZ lines
    "docId wordId count" with 1-indexed ids.  An optional sidecar vocabulary
    file supplies one word per line (line k names word-id k); without it words
    are named "w1".."wW".  Words with zero total count are dropped and ids
    compacted; empty documents are dropped.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if len(lines) < 3:
        raise CorpusError("bag-of-words file is missing its three header lines")
    try:
        n_docs, n_words, nnz = (int(lines[k]) for k in range(3))
    except ValueError as exc:
        raise CorpusError(f"malformed bag-of-words header: {exc}") from None
    if n_docs < 1 or n_words < 1 or nnz < 0:
        raise CorpusError("bag-of-words header values must be positive")
    triplets = lines[3:]
    if len(triplets) != nnz:
        raise CorpusError(
            f"bag-of-words NNZ mismatch: header says {nnz}, found {len(triplets)} entries")

    rows: list[dict[int, int]] = [dict() for _ in range(n_docs)]
    for ln in triplets:
        parts = ln.split()
        if len(parts) != 3:
            raise CorpusError(f"malformed bag-of-words entry: {ln!r}")
        try:
            d, w, c = int(parts[0]), int(parts[1]), int(parts[2])
        except ValueError:
            raise CorpusError(f"malformed bag-of-words entry: {ln!r}") from None
        if not (1 <= d <= n_docs):
            raise CorpusError(f"document id {d} outside declared range 1..{n_docs}")
        if not (1 <= w <= n_words):
            raise CorpusError(f"word id {w} outside declared range 1..{n_words}")
        if c <= 0:
            raise CorpusError(f"non-positive count {c} for document {d}, word {w}")
        rows[d - 1][w - 1] = rows[d - 1].get(w - 1, 0) + c

    if vocab_path is not None:
        with open(vocab_path, "r", encoding="utf-8") as fh:
            words = [ln.strip() for ln in fh]
        while words and not words[-1]:
            words.pop()
        if len(words) < n_words:
            raise CorpusError(
                f"vocabulary sidecar has {len(words)} lines, header declares {n_words} words")
        words = words[:n_words]
    else:
        words = [f"w{k}" for k in range(1, n_words + 1)]

    names = [f"doc{k}" for k in range(1, n_docs + 1)]
    nonempty = [k for k, row in enumerate(rows) if row]
    if not nonempty:
        raise CorpusError("bag-of-words file contains no occurrences")
    return Corpus.from_rows(words, [rows[k] for k in nonempty],
                            doc_names=[names[k] for k in nonempty],
                            doc_ids=nonempty)


def ingest_transactions(path: str, quantity_cap: int = 25) -> Corpus:
    """Read an order/item/quantity CSV as a market-basket corpus.

    One document per order_id (in order of first appearance); item quantities
    above ``quantity_cap`` are treated as data errors and dropped; orders left
    without items are dropped.
    """
    if quantity_cap < 1:
        raise CorpusError("quantity_cap must be >= 1")
    orders: dict[str, dict[str, int]] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"order_id", "item_id", "quantity"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise CorpusError("transactions CSV must have columns order_id,item_id,quantity")
        for lineno, rec in enumerate(reader, start=2):
            try:
                qty = int(rec["quantity"])
            except (TypeError, ValueError):
                raise CorpusError(f"line {lineno}: malformed quantity {rec['quantity']!r}") from None
            if qty <= 0:
                raise CorpusError(f"line {lineno}: non-positive quantity {qty}")
            order = rec["order_id"]
            item = rec["item_id"]
            if order is None or item is None or order == "" or item == "":
                raise CorpusError(f"line {lineno}: missing order_id or item_id")
            basket = orders.setdefault(order, {})
            if qty > quantity_cap:
                continue
            basket[item] = basket.get(item, 0) + qty

    items: dict[str, int] = {}
    rows = []
    names = []
    for order, basket in orders.items():
        if not basket:
            continue
        row = {}
        for item, qty in basket.items():
            wid = items.setdefault(item, len(items))
            row[wid] = qty
        rows.append(row)
        names.append(order)
    if not rows:
        raise CorpusError("no orders with usable items in transactions file")
    return Corpus.from_rows(list(items.keys()), rows, doc_names=names)


@dataclass(frozen=True)
class TokenizerOptions:
    """Text preprocessing switches for ``ingest_text``."""
    min_token_length: int = 3
    alphabetic_only: bool = True
    porter_stemming: bool = False
    stopword_file: str | None = None
    min_corpus_freq: int = 5


_PUNCT = "".join(chr(c) for c in range(33, 127) if not chr(c).isalnum())


def _tokenize(text: str, opts: TokenizerOptions, stopwords: frozenset[str]) -> list[str]:
    out = []
    for raw in text.split():
        token = raw.strip(_PUNCT).lower()
        if not token:
            continue
        if opts.alphabetic_only and not token.isalpha():
            continue
        if len(token) < opts.min_token_length:
            continue
        if token in stopwords:
            continue
        if opts.porter_stemming:
            token = porter_stem(token)
        out.append(token)
    return out


def ingest_text(path: str, opts: TokenizerOptions | None = None) -> Corpus:
    """Read a directory of .txt files (one document each) or a single file
    (one document per line) into a corpus.

    Tokens are whitespace-split, stripped of surrounding punctuation and
    lowercased; tokens containing non-alphabetic characters are removed when
    ``alphabetic_only`` is set (so "ran42" disappears entirely), as are tokens
    shorter than ``min_token_length`` and stopwords.  Porter stemming is an
    optional final per-token step.  Words occurring fewer than
    ``min_corpus_freq`` times across the whole corpus are dropped afterwards.
    """
    opts = opts or TokenizerOptions()
    stopwords: frozenset[str] = frozenset()
    if opts.stopword_file is not None:
        with open(opts.stopword_file, "r", encoding="utf-8") as fh:
            stopwords = frozenset(ln.strip().lower() for ln in fh if ln.strip())

    texts: list[tuple[str, str]] = []
    if os.path.isdir(path):
        for fname in sorted(os.listdir(path)):
            if not fname.endswith(".txt"):
                continue
            full = os.path.join(path, fname)
            with open(full, "r", encoding="utf-8") as fh:
                texts.append((os.path.splitext(fname)[0], fh.read()))
    else:
        with open(path, "r", encoding="utf-8") as fh:
            for k, line in enumerate(fh, start=1):
                if line.strip():
                    texts.append((f"line{k}", line))
    if not texts:
        raise CorpusError(f"no documents found at {path}")

    vocab: dict[str, int] = {}
    raw_rows: list[dict[int, int]] = []
    names: list[str] = []
    for name, text in texts:
        tokens = _tokenize(text, opts, stopwords)
        if not tokens:
            continue
        row: dict[int, int] = {}
        for tok in tokens:
            wid = vocab.setdefault(tok, len(vocab))
            row[wid] = row.get(wid, 0) + 1
        raw_rows.append(row)
        names.append(name)
    if not raw_rows:
        raise CorpusError("text ingestion produced an empty corpus")

    if opts.min_corpus_freq > 1:
        totals = [0] * len(vocab)
        for row in raw_rows:
            for wid, c in row.items():
                totals[wid] += c
        keep = {wid for wid, tot in enumerate(totals) if tot >= opts.min_corpus_freq}
        filtered_rows = []
        filtered_names = []
        for row, name in zip(raw_rows, names):
            row = {wid: c for wid, c in row.items() if wid in keep}
            if row:
                filtered_rows.append(row)
                filtered_names.append(name)
        raw_rows, names = filtered_rows, filtered_names
        if not raw_rows:
            raise CorpusError("text ingestion produced an empty corpus after frequency filtering")

    return Corpus.from_rows(list(vocab.keys()), raw_rows, doc_names=names)
