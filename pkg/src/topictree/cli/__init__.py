"""Command-line interface: ingest, synthesize, train, inspect, evaluate, serve.

Every command writes its parameters into the output artifacts (JSON ``meta``
keys, CSV ``#`` comment lines), fails with a single ``error: ...`` line on
stderr and a nonzero exit code, and removes its partially written outputs on
failure.
"""
from __future__ import annotations

import contextlib
import csv as _csv
import logging
import os
import shlex
import sys

import click
import numpy as np

from .. import __version__
from .._util import atomic_write_text, read_json, write_json
from ..classify import (LabeledCorpus, lda_reducer, micro_accuracy, nb_train,
                        select_df, select_ig, tg_reducer, word_subset_reducer)
from ..corpus import (Corpus, SyntheticSpec, TokenizerOptions, TrueModel,
                      generate_synthetic, ingest_bow, ingest_text,
                      ingest_transactions, split)
from ..evaluation import (EstimatorConfig, TopicModel, error_rate, fit_alpha,
                          perplexity, tg_to_model)
from ..grouping import (Dendrogram, delta_h_series, flat_view, train_ehac,
                        train_mehac)
from ..lda import FoldConfig, gibbs_train
from . import reports
from .export import dot_export, freemind_export
from .server import make_server


# -- shared plumbing -----------------------------------------------------

@contextlib.contextmanager
def _guarded():
    """One-line failure contract: report, remove declared outputs, exit 1."""
    written: list[str] = []
    try:
        yield written
    except Exception as exc:  # CLI boundary: every failure becomes one line
        for path in written:
            with contextlib.suppress(OSError):
                os.unlink(path)
        message = " ".join((str(exc).strip() or exc.__class__.__name__).split())
        click.echo(f"error: {message}", err=True)
        raise SystemExit(1) from None


def _artifact_meta(**extra) -> dict:
    meta = {
        "tool": "topictree",
        "tool_version": __version__,
        "command": shlex.join(sys.argv[1:]),
    }
    for key, value in extra.items():
        if value is not None:
            meta[key] = value
    return meta


def _load_model_file(path: str):
    """Dispatch a model JSON by its ``kind`` field."""
    data = read_json(path)
    kind = data.get("kind")
    if kind == "dendrogram":
        return kind, Dendrogram.from_dict(data)
    if kind == "topic-model":
        return kind, TopicModel.from_dict(data)
    raise ValueError(f"unrecognized model kind {kind!r} in {path}")


def _as_topic_model(kind, obj, train_path: str | None, n: int | None) -> TopicModel:
    if kind == "topic-model":
        return obj
    if train_path is None or n is None:
        raise ValueError("a dendrogram model needs --train and --n "
                         "to form a probabilistic topic model")
    return tg_to_model(obj, Corpus.load_npz(train_path), n)


def _parse_int_list(raw: str) -> list[int]:
    try:
        values = [int(x) for x in raw.replace(";", ",").split(",") if x.strip()]
    except ValueError:
        raise ValueError(f"expected a comma-separated integer list, got {raw!r}") from None
    if not values:
        raise ValueError("empty value list")
    return values


def _load_labels(path: str) -> dict[int, str]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = _csv.DictReader(fh)
        fields = set(reader.fieldnames or ())
        if not {"doc_id", "label"} <= fields:
            raise ValueError("label file must be a CSV with doc_id,label columns")
        mapping: dict[int, str] = {}
        for row in reader:
            doc_id = int(row["doc_id"])
            if doc_id in mapping:
                raise ValueError(f"duplicate label row for doc_id {doc_id}")
            mapping[doc_id] = row["label"]
    if not mapping:
        raise ValueError("label file contains no rows")
    return mapping


def _echo_csv(columns, rows) -> None:
    writer = _csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(["" if x is None else x for x in row])


def _write_corpus_outputs(corpus: Corpus, out_path: str, test_ratio, split_seed,
                          test_out, min_train_freq, written) -> None:
    if test_ratio is not None:
        if test_out is None:
            raise ValueError("--test-out is required when --test-ratio is given")
        train, test = split(corpus, test_ratio, split_seed, min_train_freq)
        written.append(out_path)
        train.save_npz(out_path)
        written.append(test_out)
        test.save_npz(test_out)
        click.echo(f"train: {train.n_docs} docs, {train.n_words} words; "
                   f"test: {test.n_docs} docs")
    else:
        written.append(out_path)
        corpus.save_npz(out_path)
        click.echo(f"corpus: {corpus.n_docs} docs, {corpus.n_words} words, "
                   f"{corpus.n_tokens} tokens")


# -- command group -------------------------------------------------------

@click.group()
@click.version_option(__version__, prog_name="topictree")
@click.option("--log-level", type=click.Choice(["debug", "info", "warning", "error"]),
              default="warning", show_default=True)
@click.option("--threads", type=int, default=None,
              help="Thread budget for numeric kernels.")
def main(log_level: str, threads: int | None) -> None:
    """Disjoint-partition topic modeling: train, inspect, evaluate, serve."""
    logging.basicConfig(level=getattr(logging, log_level.upper()),
                        format="%(name)s: %(message)s")
    if threads is not None:
        try:
            import numba

            numba.set_num_threads(threads)
        except Exception as exc:
            logging.getLogger("topictree").debug("thread budget ignored: %s", exc)


# -- corpus commands -----------------------------------------------------

@main.command()
@click.option("--format", "fmt", type=click.Choice(["bow", "transactions", "text"]),
              required=True, help="Input format.")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--vocab", "vocab_path", type=click.Path(exists=True), default=None,
              help="Sidecar vocabulary for bow input.")
@click.option("--quantity-cap", default=25, show_default=True,
              help="Drop transaction rows above this quantity.")
@click.option("--min-token-length", default=3, show_default=True)
@click.option("--alphabetic-only/--any-token", default=True, show_default=True)
@click.option("--stem/--no-stem", default=False, show_default=True,
              help="Apply Porter stemming.")
@click.option("--stopwords", type=click.Path(exists=True), default=None)
@click.option("--min-corpus-freq", default=5, show_default=True)
@click.option("--out", "out_path", required=True)
@click.option("--test-ratio", type=float, default=None,
              help="Also split; writes train to --out and test to --test-out.")
@click.option("--split-seed", default=0, show_default=True)
@click.option("--test-out", default=None)
@click.option("--min-train-freq", default=1, show_default=True)
def ingest(fmt, in_path, vocab_path, quantity_cap, min_token_length,
           alphabetic_only, stem, stopwords, min_corpus_freq, out_path,
           test_ratio, split_seed, test_out, min_train_freq):
    """Build a corpus cache from bag-of-words, transaction, or text input."""
    with _guarded() as written:
        if fmt == "bow":
            corpus = ingest_bow(in_path, vocab_path)
        elif fmt == "transactions":
            corpus = ingest_transactions(in_path, quantity_cap=quantity_cap)
        else:
            opts = TokenizerOptions(min_token_length=min_token_length,
                                    alphabetic_only=alphabetic_only,
                                    porter_stemming=stem,
                                    stopword_file=stopwords,
                                    min_corpus_freq=min_corpus_freq)
            corpus = ingest_text(in_path, opts)
        _write_corpus_outputs(corpus, out_path, test_ratio, split_seed,
                              test_out, min_train_freq, written)


@main.command()
@click.option("--n-topics", default=4, show_default=True)
@click.option("--words-per-topic", default=100, show_default=True)
@click.option("--n-docs", default=6000, show_default=True)
@click.option("--doc-length", default=30, show_default=True)
@click.option("--beta-tilde", default=0.01, show_default=True)
@click.option("--alpha-m", default="5,0.5,0.5,0.5", show_default=True,
              help="Comma-separated document-prior weights, one per topic.")
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_path", required=True)
@click.option("--truth-out", default=None, help="Also write the true model JSON.")
@click.option("--test-ratio", type=float, default=None)
@click.option("--split-seed", default=0, show_default=True)
@click.option("--test-out", default=None)
@click.option("--min-train-freq", default=1, show_default=True)
def synth(n_topics, words_per_topic, n_docs, doc_length, beta_tilde, alpha_m,
          seed, out_path, truth_out, test_ratio, split_seed, test_out,
          min_train_freq):
    """Generate a synthetic corpus with known topic structure."""
    with _guarded() as written:
        weights = tuple(float(x) for x in alpha_m.split(","))
        spec = SyntheticSpec(n_topics=n_topics, words_per_topic=words_per_topic,
                             n_docs=n_docs, doc_length=doc_length,
                             beta_tilde=beta_tilde, alpha_m_tilde=weights,
                             seed=seed)
        corpus, truth = generate_synthetic(spec)
        if truth_out is not None:
            written.append(truth_out)
            truth.save_json(truth_out)
        _write_corpus_outputs(corpus, out_path, test_ratio, split_seed,
                              test_out, min_train_freq, written)


# -- training and inspection --------------------------------------------

@main.command()
@click.option("--algo", type=click.Choice(["ehac", "mehac", "lda"]), required=True)
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True)
@click.option("--memory-budget-mb", default=2048.0, show_default=True,
              help="Refuse all-pairs training beyond this estimate (ehac).")
@click.option("--n", type=int, default=None, help="Topic count (lda only).")
@click.option("--iterations", default=500, show_default=True, help="Gibbs sweeps (lda).")
@click.option("--burn-in", default=200, show_default=True)
@click.option("--seed", default=0, show_default=True)
def train(algo, in_path, out_path, memory_budget_mb, n, iterations, burn_in, seed):
    """Train a model: agglomerative merge tree (ehac, mehac) or Gibbs lda."""
    with _guarded() as written:
        corpus = Corpus.load_npz(in_path)
        if algo == "lda":
            if n is None:
                raise ValueError("--n is required with --algo lda")
            meta = _artifact_meta(algo=algo, n=n, iterations=iterations,
                                  burn_in=burn_in, seed=seed)
            model = gibbs_train(corpus, n, iterations=iterations,
                                burn_in=burn_in, seed=seed)
            written.append(out_path)
            model.save_json(out_path, meta=meta)
            click.echo(f"trained lda: {n} topics, {iterations} sweeps")
        else:
            meta = _artifact_meta(algo=algo)
            if algo == "ehac":
                dendro = train_ehac(corpus, memory_budget_mb=memory_budget_mb,
                                    meta=meta)
            else:
                dendro = train_mehac(corpus, meta=meta)
            written.append(out_path)
            dendro.save_json(out_path)
            click.echo(f"trained {algo}: {corpus.n_words} leaves, "
                       f"{corpus.n_words - 1} merges")


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--n", default=40, show_default=True)
@click.option("--top", default=7, show_default=True)
@click.option("--out", "out_path", default=None, help="Write CSV instead of stdout.")
def topics(model_path, n, top, out_path):
    """Print the flat n-topic view, sorted by topic frequency."""
    with _guarded() as written:
        kind, obj = _load_model_file(model_path)
        if kind == "dendrogram":
            view = flat_view(obj, n)
            columns = ["rank", "node_id", "f", "top_words"]
            rows = [[i + 1, view.topic_ids[i], int(view.f[i]),
                     " ".join(obj.top_words(view.topic_ids[i], top))]
                    for i in range(view.n)]
        else:
            order = np.argsort(-obj.m, kind="stable")[:min(n, obj.n_topics)]
            columns = ["rank", "topic", "weight", "top_words"]
            rows = []
            for rank, t in enumerate(order, start=1):
                word_order = np.lexsort((np.arange(len(obj.vocab)), -obj.phi[t]))
                words = " ".join(obj.vocab[w] for w in word_order[:top])
                rows.append([rank, int(t), float(obj.m[t]), words])
        if out_path is None:
            _echo_csv(columns, rows)
        else:
            written.append(out_path)
            reports.write_csv(out_path, columns, rows,
                              meta=_artifact_meta(model=model_path, n=n, top=top))


def _suggest_n(series) -> int | None:
    best = None
    for n, _, ratio in series:
        if ratio is not None and (best is None or ratio > best[1]):
            best = (n, ratio)
    return None if best is None else best[0]


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True)
@click.option("--plot/--no-plot", default=True, show_default=True)
@click.option("--figure", "figure_path", default=None,
              help="Figure path (default: CSV path with .png).")
def series(model_path, out_path, plot, figure_path):
    """Write the merge-cost series (n, delta_h, ratio) as CSV plus a figure."""
    with _guarded() as written:
        kind, obj = _load_model_file(model_path)
        if kind != "dendrogram":
            raise ValueError("series requires a dendrogram model")
        rows = delta_h_series(obj)
        suggested = _suggest_n(rows)
        written.append(out_path)
        reports.write_csv(out_path, ["n", "delta_h", "ratio"], rows,
                          meta=_artifact_meta(model=model_path,
                                              suggested_n=suggested))
        if plot:
            figure_path = figure_path or os.path.splitext(out_path)[0] + ".png"
            written.append(figure_path)
            reports.save_figure(reports.series_figure(rows, suggested), figure_path)
        if suggested is not None:
            click.echo(f"suggested n: {suggested}")


@main.command("export")
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["dot", "freemind"]), required=True)
@click.option("--out", "out_path", required=True)
@click.option("--max-depth", default=6, show_default=True)
@click.option("--top", default=5, show_default=True, help="Words per node label.")
def export_cmd(model_path, fmt, out_path, max_depth, top):
    """Export the merge tree as a Graphviz digraph or FreeMind mind map."""
    with _guarded() as written:
        kind, obj = _load_model_file(model_path)
        if kind != "dendrogram":
            raise ValueError("export requires a dendrogram model")
        if fmt == "dot":
            text = dot_export(obj, max_depth=max_depth, top=top)
        else:
            text = freemind_export(obj, max_depth=max_depth, top=top)
        written.append(out_path)
        atomic_write_text(out_path, text)
        click.echo(f"wrote {fmt} export: {out_path}")


# -- evaluation ----------------------------------------------------------

@main.command("eval-perplexity")
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--test", "test_path", required=True, type=click.Path(exists=True))
@click.option("--train", "train_path", type=click.Path(exists=True), default=None,
              help="Training corpus (required for dendrogram models).")
@click.option("--n", type=int, default=None,
              help="Topic count for the flat view (dendrogram models).")
@click.option("--particles", default=20, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--alpha", type=float, default=None,
              help="Fixed concentration; skips fitting.")
@click.option("--fit-alpha/--no-fit-alpha", "fit", default=None,
              help="Force or forbid fitting (default: fit when alpha is unset).")
@click.option("--fit-docs", type=int, default=None,
              help="Subsample size for the alpha search.")
@click.option("--tune", "tune_path", type=click.Path(exists=True), default=None,
              help="Corpus for the alpha search (default: the test corpus).")
@click.option("--out", "out_path", required=True)
@click.option("--csv", "csv_path", default=None, help="Also append a CSV row file.")
@click.option("--plot/--no-plot", default=True, show_default=True)
@click.option("--figure", "figure_path", default=None)
def eval_perplexity(model_path, test_path, train_path, n, particles, seed,
                    alpha, fit, fit_docs, tune_path, out_path, csv_path,
                    plot, figure_path):
    """Held-out perplexity of a model on a test corpus."""
    with _guarded() as written:
        kind, obj = _load_model_file(model_path)
        model = _as_topic_model(kind, obj, train_path, n)
        test = Corpus.load_npz(test_path)
        if alpha is not None:
            model = model.with_alpha(alpha)
        elif fit is True or (fit is None and model.alpha is None):
            tune = Corpus.load_npz(tune_path) if tune_path else test
            cfg = EstimatorConfig(particles=particles, seed=seed,
                                  max_docs=fit_docs)
            model = fit_alpha(model, tune, cfg)
        elif model.alpha is None:
            raise ValueError("model has no alpha; pass --alpha or allow fitting")
        report = perplexity(model, test, R=particles, seed=seed)
        meta = _artifact_meta(model=model_path, test=test_path,
                              n_topics=model.n_topics, alpha=model.alpha,
                              particles=particles, seed=seed)
        written.append(out_path)
        report.save_json(out_path, meta=meta)
        if csv_path is not None:
            written.append(csv_path)
            reports.write_csv(
                csv_path,
                ["model", "n_topics", "alpha", "particles", "seed",
                 "token_count", "total_log_prob", "perplexity"],
                [[model_path, model.n_topics, model.alpha, particles, seed,
                  report.token_count, report.total_log_prob, report.perplexity]],
                meta=meta)
        if plot:
            figure_path = figure_path or os.path.splitext(out_path)[0] + ".png"
            written.append(figure_path)
            reports.save_figure(reports.perplexity_figure(report), figure_path)
        click.echo(f"perplexity: {report.perplexity:.4f}")


@main.command("eval-error")
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--truth", "truth_path", required=True, type=click.Path(exists=True))
@click.option("--train", "train_path", type=click.Path(exists=True), default=None)
@click.option("--n", type=int, default=None)
@click.option("--out", "out_path", required=True)
def eval_error(model_path, truth_path, train_path, n, out_path):
    """Topic-distribution error rate of a model against a known true model."""
    with _guarded() as written:
        kind, obj = _load_model_file(model_path)
        model = _as_topic_model(kind, obj, train_path, n)
        truth = TrueModel.load_json(truth_path)
        err = error_rate(model, truth)
        written.append(out_path)
        write_json(out_path, {
            "error_rate": err,
            "n_topics": model.n_topics,
            "meta": _artifact_meta(model=model_path, truth=truth_path),
        })
        click.echo(f"error rate: {err:.6f}")


@main.command()
@click.option("--reducer", "reducer_kind",
              type=click.Choice(["tg", "lda", "ig", "df"]), required=True)
@click.option("--train", "train_path", required=True, type=click.Path(exists=True))
@click.option("--test", "test_path", required=True, type=click.Path(exists=True))
@click.option("--labels", "labels_path", required=True, type=click.Path(exists=True))
@click.option("--n-or-k", "n_or_k", required=True,
              help="Comma-separated topic counts (tg, lda) or word counts (ig, df).")
@click.option("--model", "model_path", type=click.Path(exists=True), default=None,
              help="Dendrogram JSON (required for the tg reducer).")
@click.option("--iterations", default=500, show_default=True, help="Gibbs sweeps (lda).")
@click.option("--burn-in", default=200, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--fold-seed", default=0, show_default=True)
@click.option("--out", "out_path", required=True)
@click.option("--plot/--no-plot", default=True, show_default=True)
@click.option("--figure", "figure_path", default=None)
def classify(reducer_kind, train_path, test_path, labels_path, n_or_k,
             model_path, iterations, burn_in, seed, fold_seed, out_path,
             plot, figure_path):
    """Naive-Bayes accuracy over reduced features, one CSV row per size."""
    with _guarded() as written:
        values = _parse_int_list(n_or_k)
        train = Corpus.load_npz(train_path)
        test = Corpus.load_npz(test_path)
        if train.vocabulary != test.vocabulary:
            raise ValueError("train and test corpora must share a vocabulary")
        mapping = _load_labels(labels_path)
        class_names = sorted(set(mapping.values()))
        ltrain = LabeledCorpus.from_doc_id_map(train, mapping, class_names)
        ltest = LabeledCorpus.from_doc_id_map(test, mapping, class_names)

        dendro = None
        if reducer_kind == "tg":
            if model_path is None:
                raise ValueError("--model is required with --reducer tg")
            kind, dendro = _load_model_file(model_path)
            if kind != "dendrogram":
                raise ValueError("the tg reducer requires a dendrogram model")
            if dendro.vocab != train.vocabulary.words:
                raise ValueError("dendrogram vocabulary does not match the corpus")

        rows = []
        for value in values:
            if reducer_kind == "tg":
                reducer = tg_reducer(flat_view(dendro, value))
            elif reducer_kind == "lda":
                lmodel = gibbs_train(train, value, iterations=iterations,
                                     burn_in=burn_in, seed=seed)
                reducer = lda_reducer(lmodel, FoldConfig(seed=fold_seed))
            elif reducer_kind == "ig":
                reducer = word_subset_reducer(select_ig(ltrain, value), name="ig")
            else:
                reducer = word_subset_reducer(select_df(ltrain, value), name="df")
            acc = micro_accuracy(nb_train(ltrain, reducer), ltest)
            rows.append([value, acc])
            click.echo(f"{reducer.name}: accuracy {acc:.4f}")

        meta = _artifact_meta(reducer=reducer_kind, train=train_path,
                              test=test_path, seed=seed)
        written.append(out_path)
        reports.write_csv(out_path, ["feature_count", "micro_avg"], rows, meta=meta)
        if plot:
            figure_path = figure_path or os.path.splitext(out_path)[0] + ".png"
            written.append(figure_path)
            reports.save_figure(reports.accuracy_figure(rows), figure_path)


# -- serving -------------------------------------------------------------

@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8080, show_default=True)
def serve(model_path, host, port):
    """Serve the read-only HTTP API over a trained dendrogram."""
    with _guarded():
        kind, obj = _load_model_file(model_path)
        if kind != "dendrogram":
            raise ValueError("serve requires a dendrogram model")
        server = make_server(obj, host, port)
        bound_host, bound_port = server.server_address[:2]
        click.echo(f"serving {model_path} on http://{bound_host}:{bound_port}")
        try:
            server.serve_forever()
        except KeyboardInterrupt:
            pass
        finally:
            server.server_close()
