from __future__ import annotations

from datetime import datetime, timedelta, timezone

import pytest

from labassess.core import Difficulty
from labassess.evaluator import GbtConfig, extract_features, train_gbt
from labassess.textsim import TfidfVectorizer


class FakeClock:
    """Manually advanced clock for deterministic service tests."""

    def __init__(self, start: datetime | None = None):
        self.now = start or datetime(2026, 3, 2, 9, 0, 0, tzinfo=timezone.utc)

    def __call__(self) -> datetime:
        return self.now

    def advance(self, **kwargs) -> None:
        self.now += timedelta(**kwargs)


@pytest.fixture
def clock():
    return FakeClock()


@pytest.fixture
def vectorizer():
    return TfidfVectorizer()


@pytest.fixture(scope="session")
def tiny_model():
    """Small trained model for grading paths that just need a predictor."""
    vec = TfidfVectorizer()
    rows = []
    samples = [
        ("def f(x):\n    return x + 1\n", "add one to x", 85.0),
        ("x = 1\n", "add one to x", 40.0),
        ("def g(a, b):\n    # sum\n    return a + b\n", "sum two numbers", 90.0),
        ("print('hello')\n", "sum two numbers", 35.0),
        ("def h(xs):\n    total = 0\n    for x in xs:\n        total += x\n    return total\n",
         "sum a list", 88.0),
        ("pass\n", "sum a list", 20.0),
    ]
    for code, question, mark in samples:
        fv = extract_features(code, question, code, Difficulty.EASY, vec)
        rows.append((fv, mark))
    return train_gbt(rows, GbtConfig(n_trees=20, max_depth=3, subsample=1.0, colsample=1.0), seed=7)
