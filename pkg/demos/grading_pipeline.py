"""Train the boosted-tree grader and score a submission end to end.

Run:  python demos/grading_pipeline.py
"""

import numpy as np

from labassess.core import Difficulty
from labassess.evaluator import (
    GbtConfig,
    cross_validate,
    extract_features,
    grade_submission,
    predict,
    score_viva_answer,
    train_gbt,
)
from labassess.evaluator.features import FEATURE_NAMES, FeatureVector
from labassess.textsim import TfidfVectorizer

# --- synthetic labeled rows: target linear in two feature slots -------------

rng = np.random.default_rng(42)
rows = []
for _ in range(200):
    values = [
        float(rng.integers(1, 120)), float(rng.integers(5, 400)),
        float(rng.integers(1, 60)), float(rng.integers(0, 7)),
        float(rng.integers(0, 25)), float(rng.uniform(0, 0.5)),
        float(rng.uniform(5, 80)), float(rng.uniform(0, 1)),
        float(rng.uniform(0, 1)), float(rng.integers(1, 4)),
    ]
    target = float(np.clip(15 + 60 * values[8] + 15 * values[7] + rng.normal(0, 3), 0, 100))
    rows.append((FeatureVector(**dict(zip(FEATURE_NAMES, values))), target))

# --- cross-validate, then fit on everything ---------------------------------

config = GbtConfig(n_trees=120, max_depth=5, learning_rate=0.1)
report = cross_validate(rows, config, k=5, seed=42)
print("fold RMSE:", [round(v, 2) for v in report.fold_rmse])
print(f"mean RMSE {report.mean_rmse:.2f} | pooled RMSE {report.pooled_rmse:.2f} | R^2 {report.r_squared:.3f}")

model = train_gbt(rows, config, seed=42)
print("base prediction:", round(model.base_prediction, 2), "| trees:", len(model.trees))

# --- grade an actual submission ----------------------------------------------

vectorizer = TfidfVectorizer()
code = "\n".join([
    "# nearest neighbour classifier",
    "import numpy as np",
    "def predict_one(train_X, train_y, x, k):",
    "    d = np.sqrt(((train_X - x) ** 2).sum(axis=1))",
    "    return train_y[np.argsort(d)[:k]].tolist()",
])
question = "implement k nearest neighbours and classify unseen points"
rubric = "compute distances to all rows, argsort, majority vote over the k nearest labels"

features = extract_features(code, question, rubric, Difficulty.EASY, vectorizer)
print("\nfeatures:", {name: round(getattr(features, name), 3) for name in FEATURE_NAMES})
print("raw model prediction:", round(predict(model, features), 2))

breakdown = grade_submission(code, question, rubric, Difficulty.EASY, model, vectorizer)
print(f"\ncorrectness {breakdown.correctness_score:.1f} | readability {breakdown.readability_score:.1f} "
      f"| complexity {breakdown.complexity_score:.1f} -> final {breakdown.final:.1f}")
for line in breakdown.feedback:
    print("  *", line)

# --- viva answers scored against the rubric -----------------------------------

good = "distances to every stored row, argsort them, then majority vote across the k closest labels"
short = "argsort vote"
for answer in (good, short):
    score, note = score_viva_answer(answer, rubric, vectorizer)
    print(f"\nviva answer {answer!r}\n  -> {score:.1f} ({note})")
