"""Automated grading: code features, boosted-tree regression, score aggregation."""

from .features import (
    FEATURE_NAMES,
    FEATURE_SCHEMA_VERSION,
    FeatureVector,
    extract_features,
)
from .gbt import (
    CvReport,
    GbtConfig,
    GbtModel,
    NonFiniteFeatureError,
    SchemaMismatchError,
    TooFewRowsError,
    cross_validate,
    load_model,
    model_from_json,
    model_to_json,
    predict,
    save_model,
    train_gbt,
)
from .grading import (
    DEFAULT_SCORE_MAPS,
    DEFAULT_WEIGHTS,
    EmptyRubricError,
    GradeBreakdown,
    ScoreMaps,
    VIVA_SHORT_ANSWER_CAP,
    VIVA_SHORT_ANSWER_TOKENS,
    grade_submission,
    score_viva_answer,
)

__all__ = [
    "FEATURE_NAMES",
    "FEATURE_SCHEMA_VERSION",
    "FeatureVector",
    "extract_features",
    "CvReport",
    "GbtConfig",
    "GbtModel",
    "NonFiniteFeatureError",
    "SchemaMismatchError",
    "TooFewRowsError",
    "cross_validate",
    "load_model",
    "model_from_json",
    "model_to_json",
    "predict",
    "save_model",
    "train_gbt",
    "DEFAULT_SCORE_MAPS",
    "DEFAULT_WEIGHTS",
    "EmptyRubricError",
    "GradeBreakdown",
    "ScoreMaps",
    "VIVA_SHORT_ANSWER_CAP",
    "VIVA_SHORT_ANSWER_TOKENS",
    "grade_submission",
    "score_viva_answer",
]
