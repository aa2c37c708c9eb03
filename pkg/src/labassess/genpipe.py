"""Question generation: one unique, difficulty-matched question per student.

The Template backend composes questions from the curated bank with
seeded slot draws, so a whole batch is a pure function of the request.
An External backend can plug in over HTTP behind the same screening:
candidates are accepted only while they stay below the near-duplicate
threshold against everything already kept.
"""

from __future__ import annotations

import hashlib
import json
import random
import urllib.error
import urllib.request
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Protocol, Sequence

from .core import Allocation, Difficulty, GeneratorBackend, Lab, LabState
from .question_bank import (
    ANSWER_FORM,
    GENERIC_ANSWER_CODE,
    GENERIC_ANSWER_NOTES,
    GENERIC_HYPERS,
    GENERIC_TASKS,
    GENERIC_VIVA,
    DATASETS,
    METRICS,
    QUESTION_FORMS_BY_TIER,
    SPLITS,
    VARIATIONS,
    find_topic,
)
from .textsim import TfidfVectorizer, Vectorizer, cosine

DEFAULT_DEDUP_THRESHOLD = 0.85
DEFAULT_MAX_ATTEMPTS = 8


class DiversityExhaustedError(RuntimeError):
    def __init__(self, achieved: int, requested: int):
        super().__init__(
            f"could not reach {requested} sufficiently distinct questions; achieved {achieved}"
        )
        self.achieved = achieved
        self.requested = requested


class BackendUnavailableError(RuntimeError):
    pass


class AlreadyAllocatedError(RuntimeError):
    pass


@dataclass(frozen=True)
class GenerationRequest:
    topic_keywords: tuple[str, ...]
    difficulty: Difficulty
    student_count: int
    seed: int = 42
    backend: GeneratorBackend = GeneratorBackend.TEMPLATE
    max_attempts_per_question: int = DEFAULT_MAX_ATTEMPTS
    dedup_threshold: float = DEFAULT_DEDUP_THRESHOLD

    def __post_init__(self):
        if not self.topic_keywords:
            raise ValueError("topic_keywords must be nonempty")
        if self.student_count < 1:
            raise ValueError("student_count must be >= 1")
        if self.max_attempts_per_question < 1:
            raise ValueError("max_attempts_per_question must be >= 1")
        if not (0.0 < self.dedup_threshold <= 1.0):
            raise ValueError("dedup_threshold must lie in (0,1]")


@dataclass(frozen=True)
class Provenance:
    backend: GeneratorBackend
    attempt: int
    seed: int


@dataclass(frozen=True)
class GeneratedQuestion:
    question_text: str
    rubric_answer: str
    difficulty: Difficulty
    provenance: Provenance

    def __post_init__(self):
        if not self.question_text or not self.rubric_answer:
            raise ValueError("question_text and rubric_answer must be nonempty")


def _seeded_rng(*parts: object) -> random.Random:
    digest = hashlib.sha256("\x1f".join(str(p) for p in parts).encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def template_generate(
    keywords: Sequence[str], difficulty: Difficulty, seed: int, attempt_index: int
) -> GeneratedQuestion:
    """Compose one question/rubric pair; pure in (keywords, difficulty, seed, attempt)."""
    if not keywords:
        raise ValueError("keywords must be nonempty")
    rng = _seeded_rng("template", ",".join(keywords), difficulty.value, seed, attempt_index)
    keyword = rng.choice(list(keywords))
    topic = find_topic(keyword)

    if topic is not None:
        task = rng.choice(topic.tasks[difficulty.value])
        hyper = rng.choice(topic.hypers)
        code = topic.answer_code
        notes = topic.answer_notes
    else:
        # no bank entry: fall back to the generic implement-and-evaluate form
        task = rng.choice(GENERIC_TASKS[difficulty.value])
        hyper = rng.choice(GENERIC_HYPERS)
        code = GENERIC_ANSWER_CODE
        notes = GENERIC_ANSWER_NOTES

    form = rng.choice(QUESTION_FORMS_BY_TIER[difficulty.value])
    slots = {
        "keyword": keyword,
        "task": task,
        "hyper": hyper,
        "dataset": rng.choice(DATASETS),
        "metric": rng.choice(METRICS),
        "split": rng.choice(SPLITS),
        "variation": rng.choice(VARIATIONS),
    }
    question = form.format(**slots)
    answer = ANSWER_FORM.format(
        keyword=keyword,
        dataset=slots["dataset"],
        code=code,
        hyper=slots["hyper"],
        metric=slots["metric"],
        task=slots["task"],
        notes=notes,
        variation_note=slots["variation"].lower(),
    )
    return GeneratedQuestion(
        question_text=question,
        rubric_answer=answer,
        difficulty=difficulty,
        provenance=Provenance(GeneratorBackend.TEMPLATE, attempt_index, seed),
    )


def viva_questions(
    keywords: Sequence[str], difficulty: Difficulty, seed: int, count: int = 3
) -> list[tuple[str, str]]:
    """Seeded draw of rubric-backed viva question/answer pairs for a topic."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = _seeded_rng("viva", ",".join(keywords), difficulty.value, seed)
    keyword = rng.choice(list(keywords))
    topic = find_topic(keyword)
    bank = list(topic.viva if topic is not None else GENERIC_VIVA)
    picked = bank if count >= len(bank) else rng.sample(bank, count)
    pairs = [(q.format(keyword=keyword), a.format(keyword=keyword)) for q, a in picked]
    while len(pairs) < count:  # small banks cycle rather than fail
        pairs.append(pairs[len(pairs) % len(bank)])
    return pairs[:count]


class ExternalGenerator(Protocol):
    def generate(
        self,
        keywords: Sequence[str],
        difficulty: Difficulty,
        attempt_index: int,
        avoid_digests: Sequence[str],
    ) -> tuple[str, str]: ...


class HttpGeneratorClient:
    """Plain-text question/answer generation over HTTP.

    The request carries keywords, difficulty, the attempt index, and
    digests of already-kept questions as a no-repeat hint. The response
    body must contain QUESTION: and ANSWER: sections.
    """

    def __init__(self, base_url: str, timeout_seconds: float = 30.0, retries: int = 2):
        self.base_url = base_url.rstrip("/")
        self.timeout_seconds = timeout_seconds
        self.retries = retries

    def generate(self, keywords, difficulty, attempt_index, avoid_digests):
        payload = json.dumps(
            {
                "keywords": list(keywords),
                "difficulty": difficulty.value,
                "attempt_index": attempt_index,
                "avoid": list(avoid_digests),
            }
        ).encode("utf-8")
        last_error: Exception | None = None
        for _ in range(self.retries + 1):
            request = urllib.request.Request(
                self.base_url + "/generate",
                data=payload,
                headers={"Content-Type": "application/json"},
            )
            try:
                with urllib.request.urlopen(request, timeout=self.timeout_seconds) as response:
                    return parse_generator_response(response.read().decode("utf-8"))
            except (urllib.error.URLError, ValueError, OSError) as exc:
                last_error = exc
        raise BackendUnavailableError(f"external generator failed: {last_error}")


def parse_generator_response(text: str) -> tuple[str, str]:
    upper = text.upper()
    q_at = upper.find("QUESTION:")
    a_at = upper.find("ANSWER:")
    if q_at < 0 or a_at < 0 or a_at <= q_at:
        raise ValueError("response must contain QUESTION: then ANSWER: sections")
    question = text[q_at + len("QUESTION:") : a_at].strip()
    answer = text[a_at + len("ANSWER:") :].strip()
    if not question or not answer:
        raise ValueError("QUESTION/ANSWER sections must be nonempty")
    return question, answer


def question_digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:12]


def generate_batch(
    request: GenerationRequest,
    vectorizer: Vectorizer | None = None,
    external: ExternalGenerator | None = None,
) -> list[GeneratedQuestion]:
    """Produce exactly student_count questions, pairwise below the threshold.

    Candidates are screened greedily in generation order against the kept
    set; a candidate too close to any kept question burns one attempt.
    """
    if vectorizer is None:
        vectorizer = TfidfVectorizer()
    if request.backend is GeneratorBackend.EXTERNAL and external is None:
        raise BackendUnavailableError("external backend requested but no client configured")

    kept: list[GeneratedQuestion] = []
    kept_vectors = []
    attempt_index = 0
    for _ in range(request.student_count):
        attempts = 0
        while True:
            if request.backend is GeneratorBackend.TEMPLATE:
                candidate = template_generate(
                    request.topic_keywords, request.difficulty, request.seed, attempt_index
                )
            else:
                question, answer = external.generate(
                    request.topic_keywords,
                    request.difficulty,
                    attempt_index,
                    [question_digest(g.question_text) for g in kept],
                )
                candidate = GeneratedQuestion(
                    question_text=question,
                    rubric_answer=answer,
                    difficulty=request.difficulty,
                    provenance=Provenance(GeneratorBackend.EXTERNAL, attempt_index, request.seed),
                )
            attempt_index += 1
            attempts += 1
            vector = vectorizer.vectorize(candidate.question_text)
            if all(cosine(vector, kv) < request.dedup_threshold for kv in kept_vectors):
                kept.append(candidate)
                kept_vectors.append(vector)
                break
            if attempts >= request.max_attempts_per_question:
                raise DiversityExhaustedError(len(kept), request.student_count)
    return kept


def allocate_lab(
    lab: Lab,
    roster: Sequence[str],
    seed: int = 42,
    backend: GeneratorBackend = GeneratorBackend.TEMPLATE,
    max_attempts_per_question: int = DEFAULT_MAX_ATTEMPTS,
    dedup_threshold: float = DEFAULT_DEDUP_THRESHOLD,
    vectorizer: Vectorizer | None = None,
    external: ExternalGenerator | None = None,
    now: datetime | None = None,
) -> tuple[Lab, list[Allocation]]:
    """Generate a batch and zip it to the roster; all-or-nothing.

    Returns the lab advanced to Allocated plus one Allocation per student.
    Any generation failure propagates before anything is constructed, so
    the caller's lab row stays Draft.
    """
    if lab.state is not LabState.DRAFT:
        raise AlreadyAllocatedError(f"lab {lab.lab_id} is {lab.state.value}, not Draft")
    if not roster:
        raise ValueError("roster must be nonempty")
    if len(set(roster)) != len(roster):
        raise ValueError("roster ids must be unique")
    if not lab.topic_keywords:
        raise ValueError("lab has no topic keywords")

    request = GenerationRequest(
        topic_keywords=tuple(lab.topic_keywords),
        difficulty=lab.difficulty,
        student_count=len(roster),
        seed=seed,
        backend=backend,
        max_attempts_per_question=max_attempts_per_question,
        dedup_threshold=dedup_threshold,
    )
    batch = generate_batch(request, vectorizer=vectorizer, external=external)
    generated_at = now if now is not None else datetime.now(timezone.utc)
    allocations = [
        Allocation(
            allocation_id=f"alloc-{lab.lab_id}-{student_id}",
            lab_id=lab.lab_id,
            student_id=student_id,
            question_text=question.question_text,
            rubric_answer=question.rubric_answer,
            generated_at=generated_at,
            generator_backend=backend,
        )
        for student_id, question in zip(roster, batch)
    ]
    return lab.with_state(LabState.ALLOCATED), allocations


def batch_to_json(batch: Sequence[GeneratedQuestion]) -> str:
    """Canonical serialization used by the determinism checks."""
    return json.dumps(
        [
            {
                "question": g.question_text,
                "answer": g.rubric_answer,
                "difficulty": g.difficulty.value,
                "backend": g.provenance.backend.value,
                "attempt": g.provenance.attempt,
                "seed": g.provenance.seed,
            }
            for g in batch
        ],
        sort_keys=True,
        separators=(",", ":"),
    )
