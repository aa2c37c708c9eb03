"""Walk through the dataset layer: parsing, validation, similarity, dedup.

Run:  python demos/dataset_tools.py
"""

from labassess.core import parse_dataset_line, serialize_record
from labassess.textsim import dedup_filter, qa_similarity_report

# --- one record per JSONL line, six fields, marks optional -----------------

line = (
    '{"Id":"q1","question":"Implement k-NN on the iris dataset",'
    '"answer":"import numpy as np\\n# distances, argsort, vote",'
    '"category":"Easy","marksAI":88,"marksFaculty":85}'
)
record = parse_dataset_line(line)
print("parsed:", record.id, record.category.value, record.marks_ai, record.marks_faculty)

# canonical serialization is byte-stable with fixed key order
print("canonical:", serialize_record(record))

# bad rows fail loudly, with the offending field named
try:
    parse_dataset_line('{"Id":"q2","question":"q","answer":"a","category":"Easy","marksAI":140}')
except Exception as exc:
    print("rejected:", exc)

# --- question/answer similarity over a small corpus ------------------------

corpus = [
    parse_dataset_line(
        '{"Id":"a","question":"train a decision tree on iris",'
        '"answer":"tree = fit(iris); follow the splits","category":"Easy"}'
    ),
    parse_dataset_line(
        '{"Id":"b","question":"explain svm margins",'
        '"answer":"the margin separates classes; svm maximizes it","category":"Medium"}'
    ),
    parse_dataset_line(
        '{"Id":"c","question":"plot knn accuracy against k",'
        '"answer":"accuracy of knn plotted for each k","category":"Easy"}'
    ),
]
report = qa_similarity_report(corpus)
print(f"\nQA similarity: n={report.pair_count} mean={report.mean:.3f} sd={report.std_dev:.3f}")
print("histogram bins (20 over [0,1]):", report.histogram)

# --- near-duplicate filtering ----------------------------------------------

questions = [
    ("q1", "implement a decision tree classifier on iris and report accuracy"),
    ("q2", "implement a decision tree classifier on iris and report test accuracy"),
    ("q3", "derive gradient descent updates for logistic regression"),
]
result = dedup_filter(questions, threshold=0.8)
print("\ndedup kept:", result.kept)
print("dedup dropped:", result.dropped)
