"""Agreement statistics, error distributions, and progress profiles.

These are the validation numbers the rest of the system reports:
Pearson/Spearman/kappa between automated and faculty marks, the
prediction-error histogram with worst-case listing, and per-subject
activity profiles. All functions are pure and reproducible byte-for-byte.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from datetime import datetime, timedelta
from typing import Sequence

from .core import Role

KAPPA_BAND_EDGES = (0.0, 20.0, 40.0, 60.0, 80.0, 100.0)
ERROR_HISTOGRAM_RANGE = 15  # 1-mark bins labeled -15..15, plus overflow bins


class LengthMismatchError(ValueError):
    pass


class TooFewError(ValueError):
    pass


class EmptyRowsError(ValueError):
    pass


class MixedSubjectsError(ValueError):
    pass


@dataclass(frozen=True)
class CorrelationResult:
    value: float
    zero_variance: bool = False


def _check_pair_lengths(x: Sequence[float], y: Sequence[float]) -> None:
    if len(x) != len(y):
        raise LengthMismatchError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise TooFewError("need at least 2 pairs")


def pearson(x: Sequence[float], y: Sequence[float]) -> CorrelationResult:
    """Sample Pearson correlation; constant input yields 0 with a flag."""
    _check_pair_lengths(x, y)
    n = len(x)
    mean_x = sum(x) / n
    mean_y = sum(y) / n
    dx = [v - mean_x for v in x]
    dy = [v - mean_y for v in y]
    ss_x = sum(v * v for v in dx)
    ss_y = sum(v * v for v in dy)
    if ss_x == 0.0 or ss_y == 0.0:
        return CorrelationResult(0.0, zero_variance=True)
    value = sum(a * b for a, b in zip(dx, dy)) / math.sqrt(ss_x * ss_y)
    return CorrelationResult(max(-1.0, min(1.0, value)))


def _average_ranks(values: Sequence[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        # ties share the average of the ranks they span (1-based)
        average = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = average
        i = j + 1
    return ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> CorrelationResult:
    """Pearson over fractional (average) ranks."""
    _check_pair_lengths(x, y)
    return pearson(_average_ranks(x), _average_ranks(y))


def mark_band(mark: float) -> int:
    """5 equal 20-mark bands: [0,20),[20,40),[40,60),[60,80),[80,100]."""
    return min(4, int(mark // 20))


@dataclass(frozen=True)
class KappaResult:
    value: float
    band_confusion: tuple[tuple[int, ...], ...]
    band_edges: tuple[float, ...] = KAPPA_BAND_EDGES
    zero_variance: bool = False


def cohen_kappa(marks_a: Sequence[float], marks_b: Sequence[float]) -> KappaResult:
    """Chance-corrected agreement over 5-band binned marks."""
    _check_pair_lengths(marks_a, marks_b)
    n = len(marks_a)
    confusion = [[0] * 5 for _ in range(5)]
    for a, b in zip(marks_a, marks_b):
        confusion[mark_band(a)][mark_band(b)] += 1
    observed = sum(confusion[k][k] for k in range(5)) / n
    row_marginals = [sum(confusion[k]) / n for k in range(5)]
    col_marginals = [sum(confusion[k][j] for k in range(5)) / n for j in range(5)]
    expected = sum(r * c for r, c in zip(row_marginals, col_marginals))
    frozen = tuple(tuple(row) for row in confusion)
    if expected >= 1.0:
        # both raters stuck to a single band; total observed agreement
        return KappaResult(1.0, frozen, zero_variance=True)
    value = (observed - expected) / (1.0 - expected)
    return KappaResult(value, frozen)


@dataclass(frozen=True)
class AgreementReport:
    pearson_r: float
    spearman_rho: float
    cohen_kappa: float
    n_pairs: int
    band_confusion: tuple[tuple[int, ...], ...]
    band_edges: tuple[float, ...] = KAPPA_BAND_EDGES
    zero_variance: bool = False


def agreement_report(pairs: Sequence[tuple[float, float]]) -> AgreementReport:
    """Bundle the three agreement statistics over (ai, faculty) mark pairs."""
    if len(pairs) < 2:
        raise TooFewError("need at least 2 pairs")
    ai = [a for a, _ in pairs]
    faculty = [b for _, b in pairs]
    p = pearson(ai, faculty)
    s = spearman(ai, faculty)
    k = cohen_kappa(ai, faculty)
    return AgreementReport(
        pearson_r=p.value,
        spearman_rho=s.value,
        cohen_kappa=k.value,
        n_pairs=len(pairs),
        band_confusion=k.band_confusion,
        zero_variance=p.zero_variance or s.zero_variance,
    )


@dataclass(frozen=True)
class WorstCase:
    id: str
    actual: float
    predicted: float
    deviation: float
    topic_tag: str = ""


@dataclass(frozen=True)
class ErrorReport:
    histogram: tuple[int, ...]  # bins labeled -15..15 in order
    underflow: int  # deviations below -15.5
    overflow: int  # deviations at or above 15.5
    mean_error: float
    share_within_5: float
    worst: tuple[WorstCase, ...]

    @property
    def bin_labels(self) -> tuple[int, ...]:
        return tuple(range(-ERROR_HISTOGRAM_RANGE, ERROR_HISTOGRAM_RANGE + 1))


def error_report(
    rows: Sequence[tuple[str, float, float, str]], k: int = 10
) -> ErrorReport:
    """Histogram and worst-k of (predicted - actual) deviations.

    rows are (id, actual, predicted, topic_tag). Bin label b covers
    [b-0.5, b+0.5); worst cases sort by |deviation| descending with ties
    broken by id ascending.
    """
    if not rows:
        raise EmptyRowsError("rows must be nonempty")
    if k > len(rows):
        raise ValueError("k must not exceed the row count")
    histogram = [0] * (2 * ERROR_HISTOGRAM_RANGE + 1)
    underflow = 0
    overflow = 0
    deviations = []
    within = 0
    for row_id, actual, predicted, topic in rows:
        deviation = predicted - actual
        deviations.append(deviation)
        if abs(deviation) <= 5.0:
            within += 1
        label = math.floor(deviation + 0.5)
        if label < -ERROR_HISTOGRAM_RANGE:
            underflow += 1
        elif label > ERROR_HISTOGRAM_RANGE:
            overflow += 1
        else:
            histogram[label + ERROR_HISTOGRAM_RANGE] += 1
    ranked = sorted(rows, key=lambda row: (-abs(row[2] - row[1]), row[0]))
    worst = tuple(
        WorstCase(id=r[0], actual=r[1], predicted=r[2], deviation=r[2] - r[1], topic_tag=r[3])
        for r in ranked[:k]
    )
    return ErrorReport(
        histogram=tuple(histogram),
        underflow=underflow,
        overflow=overflow,
        mean_error=sum(deviations) / len(deviations),
        share_within_5=within / len(rows),
        worst=worst,
    )


@dataclass(frozen=True)
class SubjectEvent:
    """One activity event: a lab assigned to / completed by / conducted by a subject."""

    kind: str  # "assigned" | "completed" | "conducted"
    subject_id: str
    lab_id: str
    timestamp: datetime
    score: float | None = None  # final score (completed) or class average (conducted)
    section: str = ""


@dataclass(frozen=True)
class ProgressProfile:
    subject_id: str
    role: Role
    series: tuple[tuple[str, float, datetime], ...]  # (lab_id, final_score, completed_at)
    heatmap: dict[tuple[int, int], int]  # (ISO weekday 1-7, week-of-range) -> count
    completion_ratio: float
    labs_conducted: dict[str, int] = field(default_factory=dict)  # per section (faculty)
    mean_class_gain: float = 0.0


def build_progress_profile(
    subject_id: str, role: Role, events: Sequence[SubjectEvent]
) -> ProgressProfile:
    """Deterministic fold over one subject's events, sorted by timestamp."""
    for event in events:
        if event.subject_id != subject_id:
            raise MixedSubjectsError(
                f"event for {event.subject_id!r} mixed into profile of {subject_id!r}"
            )
    ordered = sorted(events, key=lambda e: (e.timestamp, e.lab_id, e.kind))

    series = tuple(
        (e.lab_id, e.score if e.score is not None else 0.0, e.timestamp)
        for e in ordered
        if e.kind == "completed"
    )

    heatmap: dict[tuple[int, int], int] = {}
    if ordered:
        first_day = min(e.timestamp for e in ordered).date()
        range_start = first_day - timedelta(days=first_day.isoweekday() - 1)
        for e in ordered:
            day = e.timestamp.date()
            key = (day.isoweekday(), (day - range_start).days // 7)
            heatmap[key] = heatmap.get(key, 0) + 1

    assigned = {e.lab_id for e in ordered if e.kind in ("assigned", "completed")}
    completed = {e.lab_id for e in ordered if e.kind == "completed"}
    ratio = len(completed) / len(assigned) if assigned else 0.0

    conducted = [e for e in ordered if e.kind == "conducted"]
    labs_conducted: dict[str, int] = {}
    for e in conducted:
        labs_conducted[e.section] = labs_conducted.get(e.section, 0) + 1
    averages = [e.score for e in conducted if e.score is not None]
    gain = 0.0
    if len(averages) >= 2:
        steps = [b - a for a, b in zip(averages, averages[1:])]
        gain = sum(steps) / len(steps)

    return ProgressProfile(
        subject_id=subject_id,
        role=role,
        series=series,
        heatmap=heatmap,
        completion_ratio=ratio,
        labs_conducted=labs_conducted,
        mean_class_gain=gain,
    )


# ---------------------------------------------------------------------------
# Export helpers: typed JSON documents and CSV series for offline plotting.

REPORT_SCHEMA_VERSION = 1


def jsonify(value):
    if isinstance(value, datetime):
        return value.isoformat()
    if isinstance(value, dict):
        return {str(k): jsonify(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonify(v) for v in value]
    if isinstance(value, Role):
        return value.value
    return value


def report_to_json(report, kind: str) -> str:
    document = {"schema_version": REPORT_SCHEMA_VERSION, "kind": kind}
    document.update(jsonify(asdict(report)))
    return json.dumps(document, indent=2, sort_keys=True)


def error_rows_csv(rows: Sequence[tuple[str, float, float, str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["id", "actual", "predicted", "error", "topic_tag"])
    for row_id, actual, predicted, topic in rows:
        writer.writerow([row_id, actual, predicted, predicted - actual, topic])
    return buffer.getvalue()


def scatter_pairs_csv(pairs: Sequence[tuple[float, float]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["ai_mark", "faculty_mark"])
    for a, b in pairs:
        writer.writerow([a, b])
    return buffer.getvalue()


def heatmap_csv(profile: ProgressProfile) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["weekday", "week", "count"])
    for (weekday, week), count in sorted(profile.heatmap.items()):
        writer.writerow([weekday, week, count])
    return buffer.getvalue()
