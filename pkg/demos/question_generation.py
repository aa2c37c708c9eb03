"""Generate unique, difficulty-matched questions for a whole class.

Run:  python demos/question_generation.py
"""

from datetime import datetime, timezone

from labassess.core import Difficulty, Lab, LabMode
from labassess.genpipe import GenerationRequest, allocate_lab, generate_batch, template_generate
from labassess.textsim import TfidfVectorizer, cosine

# --- a single seeded draw from the template bank ---------------------------

question = template_generate(["k-nearest neighbors"], Difficulty.EASY, seed=7, attempt_index=0)
print("question:", question.question_text)
print("\nrubric answer starts:", question.rubric_answer.splitlines()[0])

# same inputs, same output: generation is a pure function of the seed
assert question == template_generate(["k-nearest neighbors"], Difficulty.EASY, 7, 0)

# --- a batch for 12 students, screened for near-duplicates ------------------

request = GenerationRequest(
    topic_keywords=("decision tree",),
    difficulty=Difficulty.MEDIUM,
    student_count=12,
    seed=42,
)
batch = generate_batch(request)
vec = TfidfVectorizer()
vectors = [vec.vectorize(q.question_text) for q in batch]
worst = max(
    cosine(vectors[i], vectors[j])
    for i in range(len(vectors))
    for j in range(i + 1, len(vectors))
)
print(f"\nbatch of {len(batch)}: max pairwise similarity {worst:.3f} (threshold {request.dedup_threshold})")
for q in batch[:3]:
    print(" -", q.question_text[:90], "...")

# --- allocating a lab zips questions to the roster ---------------------------

lab = Lab(
    lab_id="lab-demo",
    title="Tree methods",
    topic_keywords=("decision tree", "random forest"),
    difficulty=Difficulty.MEDIUM,
    viva_duration_minutes=15,
    mode=LabMode.NON_PROCTORED,
)
roster = [f"student-{i}" for i in range(1, 6)]
allocated_lab, allocations = allocate_lab(
    lab, roster, seed=42, now=datetime(2026, 3, 2, tzinfo=timezone.utc)
)
print(f"\nlab state after allocation: {allocated_lab.state.value}")
for allocation in allocations:
    print(f" {allocation.student_id}: {allocation.question_text[:70]}...")
