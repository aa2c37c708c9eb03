"""Lab assessment toolkit.

Allocates a unique, difficulty-matched programming question to every
student, grades submissions with a boosted-tree regressor over code
features, scores text vivas against rubric answers, and produces the
agreement and error analytics used to validate the automated grades.
"""

__version__ = "0.1.0"

from . import analytics, core, evaluator, genpipe, textsim  # noqa: F401
