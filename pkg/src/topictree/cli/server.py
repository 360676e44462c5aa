"""Read-only HTTP API over a trained dendrogram.

Endpoints (GET, JSON, UTF-8, CORS-enabled):
  /meta            model shape: leaves, vocabulary size, document count
  /flat?n=K&top=M  the n-topic partition, ordered by descending frequency
  /node/{id}       one node: top words, f, h, delta_h, children, parent
  /path/{id}       node payloads from the root down to {id}

The model is immutable; concurrent requests share it without locking.
"""
from __future__ import annotations

import functools
import json
import logging
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlsplit

from ..grouping import Dendrogram, FlatView, flat_view

__all__ = ["ModelServer", "make_server"]

log = logging.getLogger("topictree.serve")

_MAX_TOP = 1000


class _BadRequest(ValueError):
    pass


class _NotFound(KeyError):
    pass


class ModelServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address: tuple[str, int], dendrogram: Dendrogram):
        super().__init__(address, _Handler)
        self.dendrogram = dendrogram
        self._flat = functools.lru_cache(maxsize=64)(
            lambda n: flat_view(dendrogram, n))

    def flat(self, n: int) -> FlatView:
        return self._flat(n)


def make_server(dendrogram: Dendrogram, host: str = "127.0.0.1",
                port: int = 0) -> ModelServer:
    """Bind a server; port 0 picks a free port (see ``server_address``)."""
    return ModelServer((host, port), dendrogram)


class _Handler(BaseHTTPRequestHandler):
    server: ModelServer
    protocol_version = "HTTP/1.1"

    # -- plumbing --------------------------------------------------------

    def log_message(self, fmt, *args):
        log.info("%s %s", self.address_string(), fmt % args)

    def _send_json(self, payload: dict, status: int = 200) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _reject(self) -> None:
        self._send_json({"error": "read-only API: use GET"}, status=405)

    do_POST = do_PUT = do_DELETE = do_PATCH = _reject

    def do_OPTIONS(self) -> None:
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Content-Length", "0")
        self.end_headers()

    # -- routing ---------------------------------------------------------

    def do_GET(self) -> None:
        url = urlsplit(self.path)
        params = parse_qs(url.query)
        parts = [p for p in url.path.split("/") if p]
        try:
            if parts == ["meta"]:
                payload = self._meta()
            elif parts == ["flat"]:
                payload = self._flat_payload(params)
            elif len(parts) == 2 and parts[0] == "node":
                payload = self._node_payload(self._node_id(parts[1]),
                                             self._top(params))
            elif len(parts) == 2 and parts[0] == "path":
                payload = self._path_payload(self._node_id(parts[1]),
                                             self._top(params))
            else:
                raise _NotFound(f"no such endpoint: {url.path}")
        except _BadRequest as exc:
            self._send_json({"error": str(exc)}, status=400)
        except _NotFound as exc:
            self._send_json({"error": str(exc.args[0])}, status=404)
        else:
            self._send_json(payload)

    # -- parameter parsing ----------------------------------------------

    def _int_param(self, params, key: str, default: int | None,
                   lo: int, hi: int) -> int:
        raw = params.get(key)
        if raw is None:
            if default is None:
                raise _BadRequest(f"missing required parameter {key!r}")
            return default
        try:
            value = int(raw[0])
        except ValueError:
            raise _BadRequest(f"parameter {key!r} must be an integer") from None
        if not lo <= value <= hi:
            raise _BadRequest(f"parameter {key!r} must lie in [{lo}, {hi}]")
        return value

    def _top(self, params) -> int:
        return self._int_param(params, "top", 5, 0, _MAX_TOP)

    def _node_id(self, raw: str) -> int:
        try:
            node_id = int(raw)
        except ValueError:
            raise _BadRequest("node id must be an integer") from None
        if not 0 <= node_id < self.server.dendrogram.n_nodes:
            raise _NotFound(f"unknown node id {node_id}")
        return node_id

    # -- payloads --------------------------------------------------------

    def _meta(self) -> dict:
        d = self.server.dendrogram
        return {
            "n_leaves": d.n_leaves,
            "vocab_size": d.n_leaves,
            "doc_count": d.doc_count,
        }

    def _flat_payload(self, params) -> dict:
        d = self.server.dendrogram
        n = self._int_param(params, "n", None, 1, d.n_leaves)
        top = self._top(params)
        view = self.server.flat(n)
        topics = [
            {
                "id": int(view.topic_ids[i]),
                "f": int(view.f[i]),
                "h": float(view.h[i]),
                "size": int(view.topic_words[i].size),
                "words": d.top_words(view.topic_ids[i], top),
            }
            for i in range(view.n)
        ]
        return {"n": n, "topics": topics}

    def _node_payload(self, node_id: int, top: int) -> dict:
        d = self.server.dendrogram
        rec = d.record_of(node_id)
        kids = d.children(node_id)
        parent = d.parent(node_id)
        return {
            "id": node_id,
            "is_leaf": d.is_leaf(node_id),
            "words": d.top_words(node_id, top),
            "size": int(d.subtree_words(node_id).size),
            "f": d.node_f(node_id),
            "h": d.node_h(node_id),
            "delta_h": None if rec is None else rec.delta_h,
            "children": [] if kids is None else list(kids),
            "parent": parent,
        }

    def _path_payload(self, node_id: int, top: int) -> dict:
        chain = self.server.dendrogram.path_to(node_id)
        return {"path": [self._node_payload(x, top) for x in chain]}


def serve_forever_in_thread(server: ModelServer) -> threading.Thread:
    """Run the server loop in a daemon thread (used by tests)."""
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return thread
