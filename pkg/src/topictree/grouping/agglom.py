"""Agglomerative training of the topic merge tree, flat views, and series.

Two trainers with identical merge-selection semantics:

- ``train_ehac``: keeps every live pair's delta_h in a priority structure.
  Fast per step, but quadratic memory in |V|; a budget guard refuses corpora
  whose estimated allocation exceeds it.
- ``train_mehac``: keeps one best-partner entry per live topic (linear live
  entries).  After a merge kills a topic's partner, the entry is marked stale
  but keeps its old priority, which remains a valid upper bound because the
  new topic is checked eagerly against every entry first; stale entries are
  recomputed only if they surface at the queue head.

Both break delta_h ties by the canonical topic order (smallest contained word
id), preferring the lexicographically smallest pair, so merge sequences are
bit-reproducible.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .._util import ragged_indices, read_json, write_json
from ..corpus import Corpus
from .hscore import TopicState, delta_h, h_singleton, merge_states, singleton_state, xlogx

__all__ = [
    "MergeRecord",
    "Dendrogram",
    "FlatView",
    "MemoryBudgetError",
    "train_ehac",
    "train_mehac",
    "flat_view",
    "delta_h_series",
]


class MemoryBudgetError(RuntimeError):
    """Raised when the all-pairs trainer would exceed its memory budget."""


@dataclass(frozen=True)
class MergeRecord:
    """One join: topics ``left`` and ``right`` become topic ``new``."""
    left: int
    right: int
    new: int
    delta_h: float
    h_new: float
    f_new: int


class Dendrogram:
    """The full merge tree: |V| leaves (word ids) plus |V|-1 merge records.

    Node ids: leaves are word ids 0..|V|-1; merge k creates id |V|+k.  The
    serialized form additionally carries per-leaf frequencies and h values and
    the training document count, so flat views and reports can be derived from
    the file alone.
    """

    SCHEMA_VERSION = 1

    def __init__(self, n_leaves: int, vocab: Sequence[str],
                 merges: Iterable[MergeRecord],
                 leaf_f: np.ndarray | None = None,
                 leaf_h: np.ndarray | None = None,
                 doc_count: int | None = None,
                 meta: dict | None = None):
        self.n_leaves = int(n_leaves)
        self.vocab = tuple(vocab)
        self.merges = tuple(merges)
        if len(self.vocab) != self.n_leaves:
            raise ValueError("vocab length must equal n_leaves")
        if len(self.merges) != self.n_leaves - 1:
            raise ValueError("a complete dendrogram has n_leaves - 1 merges")
        self.leaf_f = None if leaf_f is None else np.asarray(leaf_f, dtype=np.int64)
        self.leaf_h = None if leaf_h is None else np.asarray(leaf_h, dtype=np.float64)
        self.doc_count = None if doc_count is None else int(doc_count)
        self.meta = dict(meta) if meta else {}
        self._index = {rec.new: k for k, rec in enumerate(self.merges)}
        self._parent: dict[int, tuple[int, int]] = {}
        for k, rec in enumerate(self.merges):
            for child in (rec.left, rec.right):
                if child in self._parent:
                    raise ValueError(f"node {child} is consumed twice")
                self._parent[child] = (k, rec.new)

    # -- tree navigation -------------------------------------------------

    @property
    def root_id(self) -> int:
        return self.merges[-1].new if self.merges else 0

    @property
    def n_nodes(self) -> int:
        return self.n_leaves + len(self.merges)

    def is_leaf(self, node_id: int) -> bool:
        return node_id < self.n_leaves

    def children(self, node_id: int) -> tuple[int, int] | None:
        if self.is_leaf(node_id):
            return None
        rec = self.merges[self._index[node_id]]
        return rec.left, rec.right

    def parent(self, node_id: int) -> int | None:
        entry = self._parent.get(node_id)
        return None if entry is None else entry[1]

    def record_of(self, node_id: int) -> MergeRecord | None:
        k = self._index.get(node_id)
        return None if k is None else self.merges[k]

    def node_f(self, node_id: int) -> int:
        if self.is_leaf(node_id):
            if self.leaf_f is None:
                raise ValueError("dendrogram lacks per-leaf frequencies")
            return int(self.leaf_f[node_id])
        return self.merges[self._index[node_id]].f_new

    def node_h(self, node_id: int) -> float:
        if self.is_leaf(node_id):
            if self.leaf_h is None:
                raise ValueError("dendrogram lacks per-leaf h values")
            return float(self.leaf_h[node_id])
        return self.merges[self._index[node_id]].h_new

    def subtree_words(self, node_id: int) -> np.ndarray:
        """Sorted word ids under a node."""
        out = []
        stack = [node_id]
        while stack:
            x = stack.pop()
            if self.is_leaf(x):
                out.append(x)
            else:
                rec = self.merges[self._index[x]]
                stack.append(rec.left)
                stack.append(rec.right)
        return np.array(sorted(out), dtype=np.int64)

    def top_words(self, node_id: int, top: int = 5) -> list[str]:
        """Most frequent surface words under a node, ties by word id."""
        if self.leaf_f is None:
            raise ValueError("dendrogram lacks per-leaf frequencies")
        words = self.subtree_words(node_id)
        order = np.lexsort((words, -self.leaf_f[words]))
        return [self.vocab[w] for w in words[order][:top]]

    def path_to(self, node_id: int) -> list[int]:
        """Node ids from the root down to ``node_id`` inclusive."""
        if not (0 <= node_id < self.n_nodes):
            raise KeyError(f"unknown node id {node_id}")
        chain = [node_id]
        x = node_id
        while True:
            p = self.parent(x)
            if p is None:
                break
            chain.append(p)
            x = p
        return chain[::-1]

    # -- persistence -----------------------------------------------------

    def to_dict(self) -> dict:
        out = {
            "version": self.SCHEMA_VERSION,
            "kind": "dendrogram",
            "n_leaves": self.n_leaves,
            "vocab": list(self.vocab),
            "merges": [
                {"left": r.left, "right": r.right, "new": r.new,
                 "delta_h": r.delta_h, "h_new": r.h_new, "f_new": r.f_new}
                for r in self.merges
            ],
        }
        if self.leaf_f is not None:
            out["leaf_f"] = self.leaf_f.tolist()
        if self.leaf_h is not None:
            out["leaf_h"] = self.leaf_h.tolist()
        if self.doc_count is not None:
            out["doc_count"] = self.doc_count
        if self.meta:
            out["meta"] = self.meta
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Dendrogram":
        if data.get("version") != cls.SCHEMA_VERSION:
            raise ValueError(f"unsupported dendrogram version {data.get('version')!r}")
        merges = [MergeRecord(int(m["left"]), int(m["right"]), int(m["new"]),
                              float(m["delta_h"]), float(m["h_new"]), int(m["f_new"]))
                  for m in data["merges"]]
        return cls(int(data["n_leaves"]), data["vocab"], merges,
                   leaf_f=data.get("leaf_f"), leaf_h=data.get("leaf_h"),
                   doc_count=data.get("doc_count"), meta=data.get("meta"))

    def save_json(self, path: str) -> None:
        write_json(path, self.to_dict(), compact=True)

    @classmethod
    def load_json(cls, path: str) -> "Dendrogram":
        return cls.from_dict(read_json(path))


@dataclass(frozen=True)
class FlatView:
    """The partition T(n): n disjoint topics covering the vocabulary.

    Topics are ordered by descending frequency, ties by smallest word id.
    ``assignment[w]`` is the topic index of word w under this order.
    """
    n: int
    topic_ids: tuple[int, ...]
    topic_words: tuple[np.ndarray, ...]
    f: np.ndarray
    h: np.ndarray
    assignment: np.ndarray

    def words_of(self, topic_index: int) -> np.ndarray:
        return self.topic_words[topic_index]


def flat_view(dendrogram: Dendrogram, n: int) -> FlatView:
    """Cut the tree after |V| - n merges."""
    v = dendrogram.n_leaves
    if not (1 <= n <= v):
        raise ValueError(f"n must be in [1, {v}], got {n}")
    if dendrogram.leaf_f is None or dendrogram.leaf_h is None:
        raise ValueError("dendrogram lacks leaf statistics; re-train to regenerate")
    k = v - n
    consumed_at = {}
    for j, rec in enumerate(dendrogram.merges[:k]):
        consumed_at[rec.left] = rec.new
        consumed_at[rec.right] = rec.new

    resolved: dict[int, int] = {}

    def resolve(x: int) -> int:
        chain = []
        while x in consumed_at and x not in resolved:
            chain.append(x)
            x = consumed_at[x]
        r = resolved.get(x, x)
        for c in chain:
            resolved[c] = r
        return r

    groups: dict[int, list[int]] = {}
    for w in range(v):
        groups.setdefault(resolve(w), []).append(w)
    if len(groups) != n:
        raise AssertionError("flat view does not partition into n topics")

    def sort_key(item):
        node_id, words = item
        return (-dendrogram.node_f(node_id), words[0])

    ordered = sorted(groups.items(), key=sort_key)
    topic_ids = tuple(node_id for node_id, _ in ordered)
    topic_words = tuple(np.array(ws, dtype=np.int64) for _, ws in ordered)
    f = np.array([dendrogram.node_f(i) for i in topic_ids], dtype=np.int64)
    h = np.array([dendrogram.node_h(i) for i in topic_ids], dtype=np.float64)
    assignment = np.empty(v, dtype=np.int64)
    for idx, ws in enumerate(topic_words):
        assignment[ws] = idx
    return FlatView(n=n, topic_ids=topic_ids, topic_words=topic_words,
                    f=f, h=h, assignment=assignment)


def delta_h_series(dendrogram: Dendrogram) -> list[tuple[int, float, float | None]]:
    """Per-merge series (n, delta_h_n, delta_h_n / delta_h_{n+1}).

    Merge k produces T(|V|-k-1), so the series runs n = |V|-1 .. 1.  The ratio
    is undefined at n = |V|-1 (no merge produced T(|V|)) and whenever the
    previous delta is exactly zero; those entries carry None.
    """
    v = dendrogram.n_leaves
    out: list[tuple[int, float, float | None]] = []
    for j, rec in enumerate(dendrogram.merges):
        n = v - j - 1
        if j == 0:
            ratio = None
        else:
            prev = dendrogram.merges[j - 1].delta_h
            ratio = None if prev == 0.0 else rec.delta_h / prev
        out.append((n, rec.delta_h, ratio))
    return out


# -- shared kernels ------------------------------------------------------


def _require_trainable(corpus: Corpus) -> None:
    if corpus.n_words < 2:
        raise ValueError("training requires a vocabulary of at least 2 words")
    if np.any(corpus.global_freq <= 0):
        raise ValueError("training requires positive frequency for every word "
                         "(got a test-side corpus?)")


def _pairwise_delta_matrix(corpus: Corpus) -> np.ndarray:
    """Dense delta_h over all word pairs (diagonal meaningless).

    Accumulates, per document, the joint-count term for every word pair in the
    document, then subtracts the global-frequency term.
    """
    v = corpus.n_words
    ptr, dwords, dcounts = corpus.doc_arrays()
    joint = np.zeros((v, v), dtype=np.float64)
    for d in range(corpus.n_docs):
        ids = dwords[ptr[d]:ptr[d + 1]]
        if ids.size < 2:
            continue
        c = dcounts[ptr[d]:ptr[d + 1]].astype(np.float64)
        pc = xlogx(c)
        block = xlogx(c[:, None] + c[None, :])
        block -= pc[:, None]
        block -= pc[None, :]
        joint[np.ix_(ids, ids)] += block
    f = corpus.global_freq.astype(np.float64)
    xf = xlogx(f)
    global_term = xlogx(f[:, None] + f[None, :])
    global_term -= xf[:, None]
    global_term -= xf[None, :]
    joint -= global_term
    return joint


def _scan_deltas(pivot: TopicState, others: Sequence[TopicState], n_docs: int) -> np.ndarray:
    """delta_h(pivot, t) for every topic in ``others`` in one vectorized pass."""
    dense = np.zeros(n_docs, dtype=np.float64)
    dense[pivot.doc_ids] = pivot.doc_counts
    cat_ids = np.concatenate([o.doc_ids for o in others])
    cat_counts = np.concatenate([o.doc_counts for o in others]).astype(np.float64)
    seg_starts = np.zeros(len(others), dtype=np.int64)
    lengths = np.fromiter((o.doc_ids.size for o in others), dtype=np.int64,
                          count=len(others))
    np.cumsum(lengths[:-1], out=seg_starts[1:])
    b = dense[cat_ids]
    contrib = np.zeros(cat_ids.size, dtype=np.float64)
    mask = b > 0
    if np.any(mask):
        a = cat_counts[mask]
        bb = b[mask]
        ab = a + bb
        contrib[mask] = ab * np.log(ab) - a * np.log(a) - bb * np.log(bb)
    joint = np.add.reduceat(contrib, seg_starts)
    f_others = np.fromiter((o.f for o in others), dtype=np.float64, count=len(others))
    fp = float(pivot.f)
    global_term = xlogx(fp + f_others) - xlogx(fp) - xlogx(f_others)
    return joint - global_term


def _leaf_stats(corpus: Corpus) -> tuple[np.ndarray, np.ndarray]:
    leaf_h = np.array([h_singleton(corpus, w) for w in range(corpus.n_words)],
                      dtype=np.float64)
    return corpus.global_freq.copy(), leaf_h


# -- EHAC ----------------------------------------------------------------


def estimate_ehac_bytes(n_words: int) -> int:
    """Rough upper bound for the all-pairs trainer's allocations."""
    pair_entries = n_words * (n_words - 1) // 2
    return n_words * n_words * 24 + pair_entries * 150


def train_ehac(corpus: Corpus, memory_budget_mb: float = 2048.0,
               meta: dict | None = None) -> Dendrogram:
    """All-pairs agglomeration: every step joins the live pair maximizing delta_h.

    Space is quadratic in |V|; ``memory_budget_mb`` guards against runaway
    allocation and suggests the memory-efficient trainer instead.
    """
    _require_trainable(corpus)
    v = corpus.n_words
    est = estimate_ehac_bytes(v)
    if est > memory_budget_mb * 1024 * 1024:
        raise MemoryBudgetError(
            f"all-pairs training of |V|={v} needs roughly {est / 1e6:.0f} MB "
            f"(> budget {memory_budget_mb:.0f} MB); use train_mehac or raise the budget")

    rows = (-_pairwise_delta_matrix(corpus)).tolist()
    states: dict[int, TopicState] = {w: singleton_state(corpus, w) for w in range(v)}
    heap = [(rows[i][j], i, j, i, j) for i in range(v) for j in range(i + 1, v)]
    heapq.heapify(heap)
    del rows

    leaf_f, leaf_h = _leaf_stats(corpus)
    merges: list[MergeRecord] = []
    next_id = v
    while len(states) > 1:
        while True:
            negdh, ka, kb, ia, ib = heapq.heappop(heap)
            if ia in states and ib in states:
                break
        s = states.pop(ia)
        t = states.pop(ib)
        dh = -negdh
        u = merge_states(s, t, corpus, next_id, dh)
        merges.append(MergeRecord(left=ia, right=ib, new=next_id,
                                  delta_h=float(dh), h_new=float(u.h), f_new=int(u.f)))
        if states:
            others = sorted(states.values(), key=lambda st: st.key)
            deltas = (-_scan_deltas(u, others, corpus.n_docs)).tolist()
            ku = u.key
            for st, nd in zip(others, deltas):
                if ku < st.key:
                    heapq.heappush(heap, (nd, ku, st.key, u.id, st.id))
                else:
                    heapq.heappush(heap, (nd, st.key, ku, st.id, u.id))
        states[next_id] = u
        next_id += 1
    return Dendrogram(v, corpus.vocabulary.words, merges,
                      leaf_f=leaf_f, leaf_h=leaf_h, doc_count=corpus.n_docs,
                      meta=meta)


# -- MEHAC ---------------------------------------------------------------


class _Entry:
    """Current best-partner entry of one live topic."""
    __slots__ = ("negdh", "partner", "version", "stale")

    def __init__(self):
        self.negdh = 0.0
        self.partner: int | None = None
        self.version = 0
        self.stale = False


def train_mehac(corpus: Corpus, meta: dict | None = None,
                stats: dict | None = None) -> Dendrogram:
    """Memory-efficient agglomeration: one best-partner entry per live topic.

    Merge selection matches ``train_ehac`` exactly, including the tie rule.
    ``stats``, when given, receives {"peak_entries", "recomputes"}.
    """
    _require_trainable(corpus)
    v = corpus.n_words
    n_docs = corpus.n_docs
    states: dict[int, TopicState] = {w: singleton_state(corpus, w) for w in range(v)}
    entries: dict[int, _Entry] = {}
    heap: list[tuple[float, int, int, int, int]] = []
    peak_entries = 0
    recomputes = 0

    def push(owner: TopicState, partner: TopicState, dh: float) -> None:
        e = entries[owner.id]
        e.version += 1
        e.negdh = -dh
        e.partner = partner.id
        e.stale = False
        ka, kb = ((owner.key, partner.key) if owner.key < partner.key
                  else (partner.key, owner.key))
        heapq.heappush(heap, (-dh, ka, kb, owner.id, e.version))

    # Initialization: per-word scan over co-occurring words via the inverted
    # index and the document-major arrays; O(|V|) working memory.
    ptr, dwords, dcounts = corpus.doc_arrays()
    f = corpus.global_freq.astype(np.float64)
    xf = xlogx(f)
    for w in range(v):
        docs, wc = corpus.postings(w)
        starts = ptr[docs]
        lens = ptr[docs + 1] - ptr[docs]
        idx = ragged_indices(starts, lens)
        a = dcounts[idx].astype(np.float64)
        b = np.repeat(wc, lens).astype(np.float64)
        ab = a + b
        contrib = ab * np.log(ab) - a * np.log(a) - b * np.log(b)
        joint = np.bincount(dwords[idx], weights=contrib, minlength=v)
        deltas = joint - (xlogx(f[w] + f) - xf[w] - xf)
        deltas[w] = -np.inf
        best = int(np.argmax(deltas))
        entries[w] = _Entry()
        push(states[w], states[best], float(deltas[best]))
    peak_entries = len(entries)

    merges: list[MergeRecord] = []
    leaf_f, leaf_h = _leaf_stats(corpus)
    next_id = v
    while len(states) > 1:
        while True:
            negdh, ka, kb, owner, version = heapq.heappop(heap)
            if owner not in states:
                continue
            e = entries[owner]
            if e.version != version:
                continue
            if e.stale:
                pivot = states[owner]
                others = sorted((st for oid, st in states.items() if oid != owner),
                                key=lambda st: st.key)
                deltas = _scan_deltas(pivot, others, n_docs)
                best = int(np.argmax(deltas))
                push(pivot, others[best], float(deltas[best]))
                recomputes += 1
                continue
            break
        partner = entries[owner].partner
        if partner not in states:
            raise AssertionError("fresh queue head points at a dead topic")
        s_id, t_id = ((owner, partner)
                      if states[owner].key < states[partner].key
                      else (partner, owner))
        s = states.pop(s_id)
        t = states.pop(t_id)
        del entries[s_id]
        del entries[t_id]
        dh = -negdh
        u = merge_states(s, t, corpus, next_id, dh)
        merges.append(MergeRecord(left=s_id, right=t_id, new=next_id,
                                  delta_h=float(dh), h_new=float(u.h), f_new=int(u.f)))
        if states:
            others = sorted(states.values(), key=lambda st: st.key)
            deltas = _scan_deltas(u, others, n_docs)
            entries[next_id] = _Entry()
            states[next_id] = u
            best = int(np.argmax(deltas))
            push(u, others[best], float(deltas[best]))
            ku = u.key
            for st, d in zip(others, deltas):
                d = float(d)
                e = entries[st.id]
                stored = -e.negdh
                if e.stale:
                    if d > stored:
                        push(st, u, d)
                elif e.partner == s_id or e.partner == t_id:
                    if d > stored:
                        push(st, u, d)
                    else:
                        # Old priority stays a valid upper bound: every other
                        # candidate was already <= it, and u was just checked.
                        e.stale = True
                        e.partner = None
                else:
                    if d > stored:
                        push(st, u, d)
                    elif d == stored and ku < states[e.partner].key:
                        push(st, u, d)
        else:
            states[next_id] = u
        peak_entries = max(peak_entries, len(entries))
        next_id += 1
        if len(heap) > 4 * max(len(entries), 1) + 64:
            current = [row for row in heap
                       if row[3] in entries and entries[row[3]].version == row[4]]
            heapq.heapify(current)
            heap = current
    if stats is not None:
        stats["peak_entries"] = peak_entries
        stats["recomputes"] = recomputes
    return Dendrogram(v, corpus.vocabulary.words, merges,
                      leaf_f=leaf_f, leaf_h=leaf_h, doc_count=corpus.n_docs,
                      meta=meta)
