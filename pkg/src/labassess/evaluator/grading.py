"""Score aggregation: dimension scores, weighted final grade, viva scoring.

Correctness comes from the trained regressor; readability and complexity
are deterministic piecewise-linear rescalings of the corresponding
feature slots onto [0,100]. The default tables below are configuration,
not learned values; see the README for the operator guide.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import Difficulty
from ..textsim import Vectorizer, cosine, tokenize
from .features import extract_features
from .gbt import GbtModel, predict

DEFAULT_WEIGHTS = (0.6, 0.2, 0.2)

VIVA_SHORT_ANSWER_TOKENS = 10
VIVA_SHORT_ANSWER_CAP = 40.0

_WEIGHT_TOLERANCE = 1e-9


class EmptyRubricError(ValueError):
    pass


@dataclass(frozen=True)
class PiecewiseMap:
    """Piecewise-linear map onto [0,100]; clamps to the end values outside."""

    points: tuple[tuple[float, float], ...]

    def __call__(self, x: float) -> float:
        xs = [p[0] for p in self.points]
        ys = [p[1] for p in self.points]
        return float(np.interp(x, xs, ys))


@dataclass(frozen=True)
class ScoreMaps:
    comment_ratio: PiecewiseMap
    mean_line_length: PiecewiseMap
    nesting_depth: PiecewiseMap
    branch_count: PiecewiseMap


DEFAULT_SCORE_MAPS = ScoreMaps(
    comment_ratio=PiecewiseMap(((0.0, 40.0), (0.05, 65.0), (0.10, 85.0), (0.20, 100.0), (0.40, 80.0), (1.0, 40.0))),
    mean_line_length=PiecewiseMap(((0.0, 30.0), (10.0, 70.0), (25.0, 100.0), (45.0, 90.0), (70.0, 60.0), (120.0, 25.0))),
    nesting_depth=PiecewiseMap(((0.0, 80.0), (1.0, 95.0), (2.0, 100.0), (3.0, 90.0), (5.0, 65.0), (8.0, 35.0), (12.0, 20.0))),
    branch_count=PiecewiseMap(((0.0, 70.0), (2.0, 90.0), (6.0, 100.0), (12.0, 80.0), (20.0, 55.0), (40.0, 25.0))),
)


@dataclass(frozen=True)
class GradeBreakdown:
    correctness_score: float
    readability_score: float
    complexity_score: float
    weights: tuple[float, float, float]
    final: float
    feedback: tuple[str, ...]


def _score_band(score: float) -> str:
    if score >= 85:
        return "excellent"
    if score >= 70:
        return "good"
    if score >= 50:
        return "fair"
    return "needs work"


def _validate_weights(weights: tuple[float, float, float]) -> None:
    if any(w < 0 for w in weights):
        raise ValueError("weights must be nonnegative")
    if abs(sum(weights) - 1.0) > _WEIGHT_TOLERANCE:
        raise ValueError(f"weights must sum to 1, got {sum(weights)!r}")


def grade_submission(
    code_text: str,
    question_text: str,
    rubric_answer: str,
    difficulty: Difficulty,
    model: GbtModel,
    vectorizer: Vectorizer,
    weights: tuple[float, float, float] = DEFAULT_WEIGHTS,
    maps: ScoreMaps = DEFAULT_SCORE_MAPS,
) -> GradeBreakdown:
    """Weighted aggregate of correctness/readability/complexity scores."""
    _validate_weights(weights)
    fv = extract_features(code_text, question_text, rubric_answer, difficulty, vectorizer)

    subscores = {
        "comment coverage": maps.comment_ratio(fv.comment_ratio),
        "line length": maps.mean_line_length(fv.mean_line_length),
        "nesting depth": maps.nesting_depth(fv.max_nesting_depth),
        "branching structure": maps.branch_count(fv.branch_keyword_count),
        "question relevance": 100.0 * fv.qa_similarity,
        "rubric alignment": 100.0 * fv.rubric_similarity,
    }
    correctness = predict(model, fv)
    readability = (subscores["comment coverage"] + subscores["line length"]) / 2.0
    complexity = (subscores["nesting depth"] + subscores["branching structure"]) / 2.0

    final = sum(w * s for w, s in zip(weights, (correctness, readability, complexity)))
    final = min(100.0, max(0.0, final))

    weakest = sorted(subscores.items(), key=lambda item: (item[1], item[0]))[:2]
    feedback = (
        f"correctness: {correctness:.1f}/100 ({_score_band(correctness)})",
        f"readability: {readability:.1f}/100 ({_score_band(readability)})",
        f"complexity: {complexity:.1f}/100 ({_score_band(complexity)})",
        "weakest areas: " + ", ".join(f"{name} ({value:.0f})" for name, value in weakest),
    )
    return GradeBreakdown(
        correctness_score=correctness,
        readability_score=readability,
        complexity_score=complexity,
        weights=weights,
        final=final,
        feedback=feedback,
    )


def score_viva_answer(
    student_answer: str, rubric_answer: str, vectorizer: Vectorizer
) -> tuple[float, str]:
    """100 * cosine against the rubric, with very short answers capped.

    Answers under VIVA_SHORT_ANSWER_TOKENS tokens score at most
    VIVA_SHORT_ANSWER_CAP, so one-word keyword parroting cannot pass.
    """
    if not rubric_answer.strip():
        raise EmptyRubricError("rubric answer must be nonempty")
    score = 100.0 * cosine(
        vectorizer.vectorize(student_answer), vectorizer.vectorize(rubric_answer)
    )
    capped = len(tokenize(student_answer)) < VIVA_SHORT_ANSWER_TOKENS and score > VIVA_SHORT_ANSWER_CAP
    if capped:
        score = VIVA_SHORT_ANSWER_CAP
        note = f"answer too brief; score capped at {VIVA_SHORT_ANSWER_CAP:.0f}"
    elif score >= 70:
        note = "answer covers the rubric well"
    elif score >= 40:
        note = "answer partially matches the rubric"
    else:
        note = "answer shows little overlap with the rubric"
    return score, note
