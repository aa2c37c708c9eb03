"""Shared domain types and the JSONL dataset interchange format.

Every other module builds on these records. Parsing is strict about the
six dataset fields (Id/question/answer/category/marksAI/marksFaculty) and
serialization is byte-stable: the same record always produces the same
line, with keys in that fixed order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator

MARK_TOLERANCE = 1e-9


class Difficulty(str, Enum):
    EASY = "Easy"
    MEDIUM = "Medium"
    HARD = "Hard"

    @property
    def ordinal(self) -> int:
        return {"Easy": 1, "Medium": 2, "Hard": 3}[self.value]


class LabMode(str, Enum):
    PROCTORED = "Proctored"
    NON_PROCTORED = "NonProctored"


class LabState(str, Enum):
    DRAFT = "Draft"
    ALLOCATED = "Allocated"
    ACTIVE = "Active"
    CLOSED = "Closed"


class Role(str, Enum):
    FACULTY = "Faculty"
    STUDENT = "Student"


class GeneratorBackend(str, Enum):
    TEMPLATE = "Template"
    EXTERNAL = "External"


class DatasetError(ValueError):
    """Base class for dataset parsing/validation failures."""

    def __init__(self, message: str, line_number: int | None = None):
        super().__init__(message)
        self.line_number = line_number


class MalformedJsonError(DatasetError):
    pass


class MissingFieldError(DatasetError):
    def __init__(self, name: str, line_number: int | None = None):
        super().__init__(f"missing required field {name!r}", line_number)
        self.field_name = name


class OutOfRangeError(DatasetError):
    def __init__(self, name: str, value: object, line_number: int | None = None):
        super().__init__(f"field {name!r} out of range [0,100]: {value!r}", line_number)
        self.field_name = name
        self.value = value


class BadCategoryError(DatasetError):
    def __init__(self, value: object, line_number: int | None = None):
        super().__init__(f"category must be Easy/Medium/Hard, got {value!r}", line_number)
        self.value = value


class DuplicateIdError(DatasetError):
    def __init__(self, record_id: str, line_number: int | None = None):
        super().__init__(f"duplicate record id {record_id!r}", line_number)
        self.record_id = record_id


@dataclass(frozen=True)
class DatasetRecord:
    """One row of the six-field question/answer dataset."""

    id: str
    question: str
    answer: str
    category: Difficulty
    marks_ai: float | None = None
    marks_faculty: float | None = None

    def __post_init__(self):
        if not self.id:
            raise MissingFieldError("Id")
        if not self.question:
            raise MissingFieldError("question")
        for name, value in (("marksAI", self.marks_ai), ("marksFaculty", self.marks_faculty)):
            if value is not None and not (-MARK_TOLERANCE <= value <= 100 + MARK_TOLERANCE):
                raise OutOfRangeError(name, value)


_CATEGORY_BY_LOWER = {d.value.lower(): d for d in Difficulty}


def _parse_mark(obj: dict, key: str) -> float | None:
    if key not in obj or obj[key] is None:
        return None
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise OutOfRangeError(key, value)
    value = float(value)
    if not (-MARK_TOLERANCE <= value <= 100 + MARK_TOLERANCE):
        raise OutOfRangeError(key, value)
    return value


def parse_dataset_line(line: str) -> DatasetRecord:
    """Parse one JSONL line into a validated record.

    Unknown fields are ignored; absent marks stay absent. Category labels
    match case-insensitively and are stored canonical.
    """
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedJsonError(f"not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise MalformedJsonError("line is not a JSON object")

    for name in ("Id", "question", "answer", "category"):
        if name not in obj or obj[name] is None:
            raise MissingFieldError(name)

    record_id = str(obj["Id"])
    question = str(obj["question"])
    answer = str(obj["answer"])
    raw_category = str(obj["category"])
    category = _CATEGORY_BY_LOWER.get(raw_category.strip().lower())
    if category is None:
        raise BadCategoryError(raw_category)
    if not record_id:
        raise MissingFieldError("Id")
    if not question:
        raise MissingFieldError("question")

    return DatasetRecord(
        id=record_id,
        question=question,
        answer=answer,
        category=category,
        marks_ai=_parse_mark(obj, "marksAI"),
        marks_faculty=_parse_mark(obj, "marksFaculty"),
    )


def _canonical_mark(value: float) -> float | int:
    return int(value) if value == int(value) else value


def serialize_record(record: DatasetRecord) -> str:
    """Canonical one-line JSON with keys in the fixed field order."""
    obj: dict[str, object] = {
        "Id": record.id,
        "question": record.question,
        "answer": record.answer,
        "category": record.category.value,
    }
    if record.marks_ai is not None:
        obj["marksAI"] = _canonical_mark(record.marks_ai)
    if record.marks_faculty is not None:
        obj["marksFaculty"] = _canonical_mark(record.marks_faculty)
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


@dataclass
class CorpusLoadResult:
    records: list[DatasetRecord]
    rejected: list[tuple[int, str]]  # (line number, reason)


def iter_dataset_lines(lines: Iterable[str]) -> Iterator[tuple[int, str]]:
    for number, line in enumerate(lines, start=1):
        stripped = line.strip()
        if stripped:
            yield number, stripped


def load_corpus(path: str | Path, strict: bool = True) -> CorpusLoadResult:
    """Load a JSONL corpus, rejecting duplicate ids with their line numbers.

    strict=True raises on the first bad line; strict=False collects
    rejects and keeps going (first occurrence of an id wins).
    """
    records: list[DatasetRecord] = []
    rejected: list[tuple[int, str]] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as handle:
        for number, line in iter_dataset_lines(handle):
            try:
                record = parse_dataset_line(line)
                if record.id in seen:
                    raise DuplicateIdError(record.id, number)
            except DatasetError as exc:
                exc.line_number = number
                if strict:
                    raise
                rejected.append((number, str(exc)))
                continue
            seen.add(record.id)
            records.append(record)
    return CorpusLoadResult(records=records, rejected=rejected)


def save_corpus(records: Iterable[DatasetRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(serialize_record(record) + "\n")


_STATE_ORDER = [LabState.DRAFT, LabState.ALLOCATED, LabState.ACTIVE, LabState.CLOSED]


@dataclass(frozen=True)
class TransitionResult:
    accepted: bool
    reason: str = ""


def validate_transition(current: LabState, nxt: LabState) -> TransitionResult:
    """Accept only adjacent forward moves in Draft->Allocated->Active->Closed."""
    ci = _STATE_ORDER.index(current)
    ni = _STATE_ORDER.index(nxt)
    if ni == ci + 1:
        return TransitionResult(True)
    if ni <= ci:
        return TransitionResult(False, f"backward or repeated transition {current.value}->{nxt.value}")
    return TransitionResult(False, f"transition {current.value}->{nxt.value} skips a state")


@dataclass(frozen=True)
class Lab:
    """A faculty-defined lab. State only moves forward; see validate_transition."""

    lab_id: str
    title: str
    topic_keywords: tuple[str, ...]
    difficulty: Difficulty
    viva_duration_minutes: int
    mode: LabMode
    description: str = ""
    instructions: str = ""
    deadline: datetime | None = None
    state: LabState = LabState.DRAFT
    # per-lab grading knobs (faculty-configurable, defaults documented in README)
    viva_weight: float = 0.3
    viva_question_count: int = 3
    grade_weights: tuple[float, float, float] = (0.6, 0.2, 0.2)

    def __post_init__(self):
        if self.viva_duration_minutes <= 0:
            raise ValueError("viva_duration_minutes must be a positive whole number")
        if not (0.0 <= self.viva_weight <= 1.0):
            raise ValueError("viva_weight must lie in [0,1]")
        if self.viva_question_count < 1:
            raise ValueError("viva_question_count must be >= 1")

    def with_state(self, nxt: LabState) -> "Lab":
        outcome = validate_transition(self.state, nxt)
        if not outcome.accepted:
            raise ValueError(outcome.reason)
        return replace(self, state=nxt)


@dataclass(frozen=True)
class Allocation:
    """One unique question (plus rubric answer) bound to one student."""

    allocation_id: str
    lab_id: str
    student_id: str
    question_text: str
    rubric_answer: str
    generated_at: datetime
    generator_backend: GeneratorBackend


@dataclass(frozen=True)
class Submission:
    submission_id: str
    allocation_id: str
    code_text: str
    language_tag: str
    submitted_at: datetime
    ai_score: float | None = None
    faculty_override: float | None = None
    viva_score: float | None = None
    final_score: float | None = None
    feedback: tuple[str, ...] = ()

    def __post_init__(self):
        for name, value in (
            ("ai_score", self.ai_score),
            ("faculty_override", self.faculty_override),
            ("viva_score", self.viva_score),
            ("final_score", self.final_score),
        ):
            if value is not None and not (-MARK_TOLERANCE <= value <= 100 + MARK_TOLERANCE):
                raise OutOfRangeError(name, value)
        if self.ai_score is not None and not self.feedback:
            raise ValueError("ai_score present requires nonempty feedback")


@dataclass(frozen=True)
class User:
    user_id: str
    role: Role
    credential_hash: str
    display_name: str = ""

    def __post_init__(self):
        if not self.credential_hash:
            raise ValueError("credential_hash must not be empty")
