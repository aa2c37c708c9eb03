"""Fixed-order numeric features extracted from a submission.

The regressor never sees raw code; it sees this named vector of code
metrics (size, nesting, branching, comment density) plus similarity
signals against the question and the rubric answer.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from ..core import Difficulty
from ..textsim import Vectorizer, cosine, tokenize

FEATURE_SCHEMA_VERSION = 1

FEATURE_NAMES = (
    "line_count",
    "token_count",
    "unique_identifier_count",
    "max_nesting_depth",
    "branch_keyword_count",
    "comment_ratio",
    "mean_line_length",
    "qa_similarity",
    "rubric_similarity",
    "difficulty_ordinal",
)

BRANCH_KEYWORDS = frozenset(
    {"if", "elif", "else", "for", "while", "case", "match", "except", "catch", "and", "or"}
)

_IDENTIFIER_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_OPENERS = "([{"
_CLOSERS = ")]}"
_INDENT_WIDTH = 4


@dataclass(frozen=True)
class FeatureVector:
    line_count: float
    token_count: float
    unique_identifier_count: float
    max_nesting_depth: float
    branch_keyword_count: float
    comment_ratio: float
    mean_line_length: float
    qa_similarity: float
    rubric_similarity: float
    difficulty_ordinal: float
    schema_version: int = FEATURE_SCHEMA_VERSION

    def __post_init__(self):
        for name in FEATURE_NAMES:
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"feature {name} is not finite: {value!r}")
        for name in ("comment_ratio", "qa_similarity", "rubric_similarity"):
            value = getattr(self, name)
            if not (0.0 <= value <= 1.0):
                raise ValueError(f"feature {name} must lie in [0,1]: {value!r}")
        for name in FEATURE_NAMES[:5]:
            if getattr(self, name) < 0:
                raise ValueError(f"feature {name} must be nonnegative")

    def to_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in FEATURE_NAMES], dtype=np.float64)


def _indent_level(line: str) -> int:
    width = 0
    for ch in line:
        if ch == " ":
            width += 1
        elif ch == "\t":
            width += _INDENT_WIDTH
        else:
            break
    return width // _INDENT_WIDTH


def max_nesting_depth(code: str) -> int:
    """Max of (indentation level + unclosed bracket depth) over nonblank lines.

    Bracket depth is carried across lines and floored at zero, so the
    measure works for both indentation-scoped and brace-scoped languages.
    """
    depth = 0
    deepest = 0
    for line in code.splitlines():
        if line.strip():
            deepest = max(deepest, _indent_level(line) + depth)
        for ch in line:
            if ch in _OPENERS:
                depth += 1
            elif ch in _CLOSERS:
                depth = max(0, depth - 1)
    return deepest


def _is_comment_line(line: str) -> bool:
    stripped = line.lstrip()
    return stripped.startswith("#") or stripped.startswith("//")


def extract_features(
    submission_code: str,
    question_text: str,
    rubric_answer: str,
    difficulty: Difficulty,
    vectorizer: Vectorizer,
) -> FeatureVector:
    """Deterministic feature extraction; degenerate inputs yield zeros."""
    lines = submission_code.splitlines()
    identifiers = _IDENTIFIER_RE.findall(submission_code)
    comment_lines = sum(1 for line in lines if _is_comment_line(line))

    code_vector = vectorizer.vectorize(submission_code)
    return FeatureVector(
        line_count=float(len(lines)),
        token_count=float(len(tokenize(submission_code))),
        unique_identifier_count=float(len(set(identifiers))),
        max_nesting_depth=float(max_nesting_depth(submission_code)),
        branch_keyword_count=float(sum(1 for t in identifiers if t in BRANCH_KEYWORDS)),
        comment_ratio=comment_lines / max(1, len(lines)),
        mean_line_length=(sum(len(line) for line in lines) / len(lines)) if lines else 0.0,
        qa_similarity=cosine(code_vector, vectorizer.vectorize(question_text)),
        rubric_similarity=cosine(code_vector, vectorizer.vectorize(rubric_answer)),
        difficulty_ordinal=float(difficulty.ordinal),
    )
