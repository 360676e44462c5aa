"""Shared fixtures: the tiny reference corpus and helpers."""
import numpy as np
import pytest

from oracles import build_corpus


@pytest.fixture()
def tiny_corpus():
    """Two documents over words a, b, c: d1 = a:2 b:1, d2 = b:1 c:1.

    Word ids: a=0, b=1, c=2.  Frequencies f = (2, 2, 1).
    """
    return build_corpus([{0: 2, 1: 1}, {1: 1, 2: 1}], words=["a", "b", "c"])


@pytest.fixture()
def rng():
    return np.random.default_rng(20260823)
