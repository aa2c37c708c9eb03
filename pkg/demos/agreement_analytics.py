"""Agreement statistics, error distributions, and progress profiles.

Run:  python demos/agreement_analytics.py
"""

import random
from datetime import datetime, timezone

from labassess.analytics import (
    SubjectEvent,
    agreement_report,
    build_progress_profile,
    error_report,
    report_to_json,
)
from labassess.core import Role

# --- AI marks vs faculty marks: the three headline statistics ---------------

rng = random.Random(42)
pairs = []
for _ in range(60):
    faculty = rng.uniform(25, 98)
    ai = min(100.0, max(0.0, faculty + rng.gauss(0, 4)))
    pairs.append((ai, faculty))

report = agreement_report(pairs)
print(f"n={report.n_pairs}  pearson={report.pearson_r:.3f}  "
      f"spearman={report.spearman_rho:.3f}  kappa={report.cohen_kappa:.3f}")
print("band confusion (rows = AI band, cols = faculty band):")
for row in report.band_confusion:
    print("  ", row)

# reports serialize to schema-versioned JSON for the dashboards
print("\nJSON head:", report_to_json(report, "agreement")[:80], "...")

# --- prediction error distribution -------------------------------------------

rows = [(f"r{i}", b, a, "demo") for i, (a, b) in enumerate(pairs)]
errors = error_report(rows, k=5)
print(f"\nmean error {errors.mean_error:+.2f}  share within ±5 marks {errors.share_within_5:.0%}")
print("worst cases:")
for worst in errors.worst:
    print(f"  {worst.id}: actual {worst.actual:.1f} predicted {worst.predicted:.1f} "
          f"deviation {worst.deviation:+.1f}")

# --- a student progress profile -----------------------------------------------


def ts(day, hour=10):
    return datetime(2026, 3, day, hour, tzinfo=timezone.utc)


events = [
    SubjectEvent("assigned", "s1", "lab-1", ts(2)),
    SubjectEvent("assigned", "s1", "lab-2", ts(2)),
    SubjectEvent("assigned", "s1", "lab-3", ts(9)),
    SubjectEvent("completed", "s1", "lab-1", ts(3), score=72.0),
    SubjectEvent("completed", "s1", "lab-2", ts(10), score=81.0),
]
profile = build_progress_profile("s1", Role.STUDENT, events)
print(f"\ncompletion ratio: {profile.completion_ratio:.0%}")
print("score series:", [(lab, score) for lab, score, _ in profile.series])
print("activity heatmap (weekday, week) -> count:", profile.heatmap)
