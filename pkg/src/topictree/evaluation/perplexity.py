"""Held-out likelihood: sequential per-document estimator and perplexity.

The marginal probability of a document under (phi, alpha*m) integrates over
the document's topic distribution.  The estimator expands the document into a
token sequence (ascending word id with multiplicity, a fixed order since bags
have none) and runs R independent particles left to right: at position j each
particle r holds per-topic assignment counts c over previous tokens,
multiplies the predictive probability

    p_r = sum_t phi_t(w_j) * (c_t + alpha * m_t) / (j + alpha)

into its running weight, and samples an assignment z proportional to
phi_t(w_j) * (c_t + alpha * m_t).  The estimate is the log of the mean final
particle weight.  Each particle's weight telescopes to an exact importance
ratio, so the mean is unbiased on the linear scale; pooling the predictive
probabilities per position instead (averaging before multiplying) would bias
documents of three or more tokens upward.

Perplexity aggregates over test documents with per-document seeds derived
from (seed, doc_id), so results do not depend on document order or on any
parallel scheduling.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .._util import derive_seed, maybe_njit, read_json, write_json
from ..corpus import Corpus, Document
from .model import TopicModel

__all__ = [
    "EstimatorConfig",
    "PerplexityReport",
    "log_prob_doc_lrs",
    "perplexity",
    "fit_alpha",
]


@dataclass(frozen=True)
class EstimatorConfig:
    """Particle count and seed for the sequential estimator.

    ``max_docs`` optionally subsamples the corpus during alpha fitting (a
    seeded, fixed subset) to bound the search cost.
    """
    particles: int = 20
    seed: int = 0
    max_docs: int | None = None


@maybe_njit(cache=True)
def _lrs_kernel(phi_cols: np.ndarray, m: np.ndarray, alpha: float,
                R: int, uniforms: np.ndarray) -> float:
    L, n = phi_cols.shape
    c = np.zeros((R, n))
    buf = np.empty(n)
    logw = np.zeros(R)
    for j in range(L):
        for r in range(R):
            tot = 0.0
            for t in range(n):
                wt = phi_cols[j, t] * (c[r, t] + alpha * m[t])
                buf[t] = wt
                tot += wt
            if tot <= 0.0:
                return np.nan
            logw[r] += np.log(tot / (j + alpha))
            u = uniforms[j, r] * tot
            cum = 0.0
            z = n - 1
            for t in range(n):
                cum += buf[t]
                if u < cum:
                    z = t
                    break
            c[r, z] += 1.0
    # log-mean-exp; equal weights come back exactly (log of R/R is zero)
    peak = logw[0]
    for r in range(1, R):
        if logw[r] > peak:
            peak = logw[r]
    acc = 0.0
    for r in range(R):
        acc += np.exp(logw[r] - peak)
    return peak + np.log(acc / R)


def log_prob_doc_lrs(model: TopicModel, doc: Document, R: int = 20,
                     seed: int = 0) -> float:
    """Sequential importance estimate of log p(doc | phi, alpha*m)."""
    if model.alpha is None:
        raise ValueError("model.alpha must be set before evaluation")
    if R < 1:
        raise ValueError("particle count R must be >= 1")
    seq = np.repeat(doc.word_ids, doc.counts)
    cols = model.phi[:, seq].T
    if np.any(cols.sum(axis=1) <= 0):
        dead = int(seq[int(np.flatnonzero(cols.sum(axis=1) <= 0)[0])])
        raise ValueError(
            f"word id {dead} has zero mass in every topic; the model does not "
            f"cover this document")
    uniforms = np.random.default_rng(seed).random((seq.size, R))
    value = _lrs_kernel(np.ascontiguousarray(cols), model.m, float(model.alpha),
                        int(R), uniforms)
    if np.isnan(value):
        raise ValueError("zero predictive probability encountered")
    return float(value)


@dataclass(frozen=True)
class PerplexityReport:
    """Aggregated held-out likelihood over a test corpus."""
    total_log_prob: float
    token_count: int
    perplexity: float
    per_doc: tuple[tuple[int, float, int], ...]
    estimator_config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "kind": "perplexity-report",
            "version": 1,
            "total_log_prob": self.total_log_prob,
            "token_count": self.token_count,
            "perplexity": self.perplexity,
            "per_doc": [[d, lp, ln] for d, lp, ln in self.per_doc],
            "estimator_config": dict(self.estimator_config),
        }

    def save_json(self, path: str, meta: dict | None = None) -> None:
        payload = self.to_dict()
        if meta:
            payload["meta"] = meta
        write_json(path, payload)

    @classmethod
    def load_json(cls, path: str) -> "PerplexityReport":
        data = read_json(path)
        if data.get("kind", "perplexity-report") != "perplexity-report":
            raise ValueError(f"{path} is not a perplexity report")
        return cls(data["total_log_prob"], data["token_count"], data["perplexity"],
                   tuple((int(d), float(lp), int(ln)) for d, lp, ln in data["per_doc"]),
                   data.get("estimator_config", {}))


def perplexity(model: TopicModel, test: Corpus, R: int = 20,
               seed: int = 0) -> PerplexityReport:
    """exp of the negative per-token held-out log-likelihood.

    Each document's seed derives from (seed, doc_id); the total sums per-doc
    values in doc_id order, so the report is identical however the test
    documents are stored or scheduled.
    """
    if test.n_docs == 0:
        raise ValueError("empty test corpus")
    per_doc = []
    for doc in test.documents:
        lp = log_prob_doc_lrs(model, doc, R=R, seed=derive_seed(seed, doc.doc_id))
        per_doc.append((doc.doc_id, lp, doc.length))
    total = float(sum(lp for _, lp, _ in sorted(per_doc)))
    tokens = int(sum(ln for _, _, ln in per_doc))
    return PerplexityReport(
        total_log_prob=total,
        token_count=tokens,
        perplexity=float(np.exp(-total / tokens)),
        per_doc=tuple(per_doc),
        estimator_config={"particles": int(R), "seed": int(seed)},
    )


def _subsample(corpus: Corpus, max_docs: int | None, seed: int) -> Corpus:
    if max_docs is None or max_docs >= corpus.n_docs:
        return corpus
    rng = np.random.default_rng(derive_seed(seed, 0x5EED5))
    positions = np.sort(rng.choice(corpus.n_docs, size=max_docs, replace=False))
    docs = [corpus.documents[p] for p in positions]
    names = ([corpus.doc_names[p] for p in positions]
             if corpus.doc_names is not None else None)
    return Corpus(corpus.vocabulary, docs, names, allow_zero_freq=True)


def fit_alpha(model: TopicModel, train: Corpus,
              cfg: EstimatorConfig | None = None,
              trace: list | None = None) -> TopicModel:
    """Set alpha by golden-section search minimizing training perplexity.

    Searches log10(alpha) on [-2, 2] for 20 interval reductions with a fixed
    estimator seed, so the objective is deterministic and the result
    reproducible.  ``trace``, when a list is passed, receives every evaluated
    (alpha, perplexity) pair in evaluation order.
    """
    cfg = cfg or EstimatorConfig()
    sub = _subsample(train, cfg.max_docs, cfg.seed)

    def objective(x: float) -> float:
        alpha = 10.0 ** x
        report = perplexity(model.with_alpha(alpha), sub, R=cfg.particles,
                            seed=cfg.seed)
        if not np.isfinite(report.perplexity):
            raise ValueError("non-finite perplexity during alpha search; "
                             "the model is degenerate")
        if trace is not None:
            trace.append((alpha, report.perplexity))
        return report.perplexity

    lo, hi = -2.0, 2.0
    ratio = (np.sqrt(5.0) - 1.0) / 2.0
    c = hi - ratio * (hi - lo)
    d = lo + ratio * (hi - lo)
    fc = objective(c)
    fd = objective(d)
    for _ in range(20):
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - ratio * (hi - lo)
            fc = objective(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + ratio * (hi - lo)
            fd = objective(d)
    alpha = 10.0 ** ((lo + hi) / 2.0)
    return model.with_alpha(alpha)
