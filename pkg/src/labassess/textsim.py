"""Deterministic text vectorization and cosine similarity.

The built-in vectorizer is log-scaled TF-IDF over lowercase alphanumeric
tokens. It stands in for an external sentence embedder behind the same
Vectorizer contract: text in, fixed vector out, deterministic for a
fixed configuration. Everything downstream (QA similarity reports,
near-duplicate filtering, viva scoring) only assumes that contract.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Protocol, Sequence

from .core import DatasetRecord

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

HISTOGRAM_BINS = 20


class EmptyCorpusError(ValueError):
    pass


class BadThresholdError(ValueError):
    def __init__(self, threshold: float):
        super().__init__(f"threshold must lie in (0,1], got {threshold!r}")
        self.threshold = threshold


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphanumeric boundaries (underscore splits too)."""
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class TextVector:
    """Sparse term->weight map with a cached Euclidean norm."""

    weights: dict[str, float]
    norm: float

    @classmethod
    def from_weights(cls, weights: dict[str, float]) -> "TextVector":
        return cls(weights=dict(weights), norm=math.sqrt(sum(w * w for w in weights.values())))

    def dot(self, other: "TextVector") -> float:
        a, b = self.weights, other.weights
        if len(b) < len(a):
            a, b = b, a
        return sum(w * b[t] for t, w in a.items() if t in b)


def cosine(a: TextVector, b: TextVector) -> float:
    """Cosine similarity clamped to [0,1]; 0 whenever either vector is zero."""
    if a.norm == 0.0 or b.norm == 0.0:
        return 0.0
    value = a.dot(b) / (a.norm * b.norm)
    return min(1.0, max(0.0, value))


@dataclass(frozen=True)
class CorpusStats:
    """Document-frequency table backing IDF weights."""

    doc_count: int = 0
    doc_frequency: dict[str, int] = field(default_factory=dict)

    @classmethod
    def from_texts(cls, texts: Iterable[str]) -> "CorpusStats":
        df: dict[str, int] = {}
        n = 0
        for text in texts:
            n += 1
            for term in set(tokenize(text)):
                df[term] = df.get(term, 0) + 1
        return cls(doc_count=n, doc_frequency=df)

    def idf(self, term: str) -> float:
        # smoothed so unseen terms stay finite and an empty corpus degrades
        # to plain log-tf weighting (idf == 1 everywhere)
        return 1.0 + math.log((1 + self.doc_count) / (1 + self.doc_frequency.get(term, 0)))


class Vectorizer(Protocol):
    def vectorize(self, text: str) -> TextVector: ...


class TfidfVectorizer:
    """weight(term) = (1 + ln tf) * idf(term); empty text -> zero vector."""

    def __init__(self, stats: CorpusStats | None = None):
        self.stats = stats if stats is not None else CorpusStats()

    def vectorize(self, text: str) -> TextVector:
        counts: dict[str, int] = {}
        for term in tokenize(text):
            counts[term] = counts.get(term, 0) + 1
        weights = {
            term: (1.0 + math.log(count)) * self.stats.idf(term)
            for term, count in sorted(counts.items())
        }
        return TextVector.from_weights(weights)


@dataclass(frozen=True)
class SimilarityReport:
    pair_count: int
    histogram: tuple[int, ...]  # HISTOGRAM_BINS equal-width bins over [0,1]
    mean: float
    std_dev: float


def _histogram_bin(score: float) -> int:
    return min(HISTOGRAM_BINS - 1, int(score * HISTOGRAM_BINS))


def qa_similarity_report(corpus: Sequence[DatasetRecord]) -> SimilarityReport:
    """Cosine of each record's question against its answer, summarized.

    Scores are sorted before aggregation, so the report is bit-identical
    under corpus permutation.
    """
    if not corpus:
        raise EmptyCorpusError("corpus must be nonempty")
    stats = CorpusStats.from_texts(
        [r.question for r in corpus] + [r.answer for r in corpus]
    )
    vectorizer = TfidfVectorizer(stats)
    scores = sorted(
        cosine(vectorizer.vectorize(r.question), vectorizer.vectorize(r.answer))
        for r in corpus
    )
    histogram = [0] * HISTOGRAM_BINS
    for score in scores:
        histogram[_histogram_bin(score)] += 1
    mean = sum(scores) / len(scores)
    variance = sum((s - mean) ** 2 for s in scores) / len(scores)
    return SimilarityReport(
        pair_count=len(scores),
        histogram=tuple(histogram),
        mean=mean,
        std_dev=math.sqrt(variance),
    )


@dataclass(frozen=True)
class DedupResult:
    kept: tuple[str, ...]
    dropped: tuple[tuple[str, str], ...]  # (dropped id, kept id that triggered it)


def dedup_filter(
    questions: Sequence[tuple[str, str]],
    threshold: float = 0.85,
    vectorizer: Vectorizer | None = None,
) -> DedupResult:
    """Greedy first-wins near-duplicate filter over (id, text) pairs.

    Scans in input order; a question is dropped iff its cosine similarity
    to some already-kept question is >= threshold. The kept set is
    therefore pairwise below threshold, and re-filtering it drops nothing.
    """
    if not (0.0 < threshold <= 1.0):
        raise BadThresholdError(threshold)
    ids = [qid for qid, _ in questions]
    if len(set(ids)) != len(ids):
        raise ValueError("question ids must be unique")
    if vectorizer is None:
        vectorizer = TfidfVectorizer(CorpusStats.from_texts(text for _, text in questions))

    kept: list[str] = []
    kept_vectors: list[TextVector] = []
    dropped: list[tuple[str, str]] = []
    for qid, text in questions:
        vector = vectorizer.vectorize(text)
        duplicate_of = None
        for kept_id, kept_vector in zip(kept, kept_vectors):
            if cosine(vector, kept_vector) >= threshold:
                duplicate_of = kept_id
                break
        if duplicate_of is None:
            kept.append(qid)
            kept_vectors.append(vector)
        else:
            dropped.append((qid, duplicate_of))
    return DedupResult(kept=tuple(kept), dropped=tuple(dropped))
