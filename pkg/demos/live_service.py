"""The full lab lifecycle against an in-process service instance.

Faculty creates and allocates a lab, a student submits code and sits the
viva, faculty overrides the score and reads the class report. The same
flows are available over HTTP via `labassess serve`.

Run:  python demos/live_service.py
"""

import numpy as np

from labassess.core import Role
from labassess.evaluator import GbtConfig, train_gbt
from labassess.evaluator.features import FEATURE_NAMES, FeatureVector
from labassess.labsvc import LabService

# a small model so grading works; production would load a trained model file
rng = np.random.default_rng(42)
rows = []
for _ in range(60):
    values = [float(v) for v in rng.uniform(0, 1, 10)]
    rows.append((FeatureVector(**dict(zip(FEATURE_NAMES, values))), float(40 + 50 * values[8])))
model = train_gbt(rows, GbtConfig(n_trees=30, max_depth=3), seed=42)

service = LabService(model=model, seed=42)
service.add_user("prof", "prof-pass", Role.FACULTY, "Professor")
service.add_user("ada", "ada-pass", Role.STUDENT, "Ada")
service.add_user("lin", "lin-pass", Role.STUDENT, "Lin")

# --- faculty: create -> allocate -> activate ---------------------------------

faculty = service.login("prof", "prof-pass").token
lab = service.create_lab(
    faculty,
    title="Support vector machines",
    topic_keywords=["svm"],
    difficulty="Medium",
    viva_duration_minutes=20,
    mode="Proctored",
    section="A",
)
print("created:", lab.lab_id, lab.state.value)
summary = service.allocate(faculty, lab.lab_id, ["ada", "lin"])
print("allocated:", summary["allocated"], "students")
service.activate_lab(faculty, lab.lab_id)

# --- student: read the unique question, submit, sit the viva -------------------

ada = service.login("ada", "ada-pass").token
my_lab = service.list_labs(ada)[0]
print("\nada's question:", my_lab["allocation"]["question_text"][:90], "...")

submission = service.submit_code(
    ada,
    my_lab["allocation"]["allocation_id"],
    "import numpy as np\ndef hinge(w, x, y):\n    return max(0, 1 - y * (w @ x))\n",
    "python",
)
print(f"ai score {submission['ai_score']:.1f}; viva opens with "
      f"{len(submission['viva']['questions'])} questions")

session = submission["viva"]["session_id"]
for index, question in enumerate(submission["viva"]["questions"]):
    print(f"  viva q{index}: {question[:70]}...")
    result = service.answer_viva(
        ada, session, index,
        "the margin is the distance between the separating hyperplane and the closest "
        "support vectors; maximizing it with the kernel controls generalization",
    )
    print(f"    scored {result['score']:.1f}")

final = service.submission_view(submission["submission_id"])
print(f"\nafter viva: grade {final['ai_score']:.1f}, viva {final['viva_score']:.1f}, "
      f"final {final['final_score']:.1f}")

# --- faculty: override and report ------------------------------------------------

service.override_score(faculty, submission["submission_id"], 91.0, "strong viva, minor code gap")
report = service.class_report(faculty, lab.lab_id)
print("\nranking:")
for student, sub_id, score, _ in report.ranking:
    print(f"  {student}: {score:.1f}")
print("plagiarism alerts:", list(report.plagiarism_alerts))

trail = service.audit_trail(submission["submission_id"])
print("\naudit trail kinds:", [event["kind"] for event in trail])
