"""Shared plumbing: atomic file writes, JSON helpers, seed derivation."""
from __future__ import annotations

import json
import os
import tempfile

import numpy as np

__all__ = [
    "atomic_write_text",
    "write_json",
    "read_json",
    "derive_seed",
    "ragged_indices",
    "maybe_njit",
]

try:
    from numba import njit as _numba_njit

    def maybe_njit(**kwargs):
        """Numba's njit when available, identity decorator otherwise."""
        return _numba_njit(**kwargs)
except ImportError:  # pragma: no cover - exercised only without numba
    def maybe_njit(**kwargs):
        def wrap(fn):
            return fn
        return wrap


def atomic_write_text(path: str, text: str, encoding: str = "utf-8") -> None:
    """Write ``text`` to ``path`` via a sibling temp file and an atomic rename.

    A failure mid-write leaves no partial output file behind.
    """
    path = os.path.abspath(path)
    directory = os.path.dirname(path)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp.", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding=encoding) as fh:
            fh.write(text)
        # mkstemp creates 0600 files; restore the umask-default mode.
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_json(path: str, obj, compact: bool = False) -> None:
    """Serialize ``obj`` as JSON to ``path`` atomically.

    ``compact`` drops whitespace; large model files use it, small reports do not.
    """
    if compact:
        text = json.dumps(obj, ensure_ascii=False, separators=(",", ":"))
    else:
        text = json.dumps(obj, ensure_ascii=False, indent=2)
    atomic_write_text(path, text + "\n")


def read_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def derive_seed(*parts: int) -> int:
    """Deterministic non-negative 63-bit seed from integer parts.

    Used to give every document its own RNG stream: the result depends only on
    the part values, never on evaluation order or scheduling.
    """
    entropy = tuple(int(p) & 0xFFFFFFFFFFFFFFFF for p in parts)
    ss = np.random.SeedSequence(entropy)
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> 1)


def ragged_indices(starts: np.ndarray, lengths: np.ndarray) -> np.ndarray:
    """Flat gather indices for variable-length segments.

    Returns the concatenation of ``arange(s, s + l)`` for each (s, l) pair
    without a Python-level loop.
    """
    starts = np.asarray(starts, dtype=np.int64)
    lengths = np.asarray(lengths, dtype=np.int64)
    total = int(lengths.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    offsets = np.concatenate(([0], np.cumsum(lengths)[:-1]))
    return np.repeat(starts - offsets, lengths) + np.arange(total, dtype=np.int64)
