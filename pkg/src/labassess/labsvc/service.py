"""The lab service core: auth, lifecycle, submissions, vivas, reports.

Command methods validate, compute every derived result (grades, viva
questions, ids, timestamps), then append one event whose payload carries
all of it; reducers only apply payloads. Replaying the log therefore
reconstructs identical state without re-running any generation or
grading, which is what the crash-recovery tests rely on.
"""

from __future__ import annotations

import hashlib
import hmac
import json
import secrets
import threading
from dataclasses import dataclass, field, replace
from datetime import datetime, timedelta, timezone
from typing import Callable, Sequence

from .. import analytics, genpipe
from ..core import (
    Allocation,
    Difficulty,
    GeneratorBackend,
    Lab,
    LabMode,
    LabState,
    Role,
    Submission,
    User,
    validate_transition,
)
from ..evaluator import GbtModel, grade_submission, score_viva_answer
from ..textsim import TfidfVectorizer, Vectorizer, cosine
from .store import InMemoryEventLog, StoredEvent

PBKDF2_ITERATIONS = 60_000
DEFAULT_TOKEN_TTL_MINUTES = 480
DEFAULT_PLAGIARISM_THRESHOLD = 0.9


class ServiceError(Exception):
    """Structured service failure: {code, message, details} over HTTP."""

    code = "internal"
    http_status = 500

    def __init__(self, message: str, details: dict | None = None):
        super().__init__(message)
        self.details = details or {}


class BadCredentialsError(ServiceError):
    code, http_status = "bad_credentials", 401


class BadTokenError(ServiceError):
    code, http_status = "bad_token", 401


class AccountDisabledError(ServiceError):
    code, http_status = "account_disabled", 403


class ForbiddenError(ServiceError):
    code, http_status = "forbidden", 403


class NotFoundError(ServiceError):
    code, http_status = "not_found", 404


class ConflictError(ServiceError):
    code, http_status = "conflict", 409


class ValidationFailedError(ServiceError):
    code, http_status = "validation_failed", 422


class NotYourAllocationError(ServiceError):
    code, http_status = "not_your_allocation", 403


class LabNotActiveError(ServiceError):
    code, http_status = "lab_not_active", 409


class DeadlinePassedError(ServiceError):
    code, http_status = "deadline_passed", 409


class SessionExpiredError(ServiceError):
    code, http_status = "session_expired", 409


class IndexOutOfRangeError(ServiceError):
    code, http_status = "index_out_of_range", 422


class AlreadyAnsweredError(ServiceError):
    code, http_status = "already_answered", 409


class OutOfRangeError(ServiceError):
    code, http_status = "out_of_range", 422


class GradingUnavailableError(ServiceError):
    code, http_status = "grading_unavailable", 503


PUBLIC = frozenset()  # marker: no authentication required

ROUTE_ALLOWED_ROLES: dict[str, frozenset[Role]] = {
    "healthz": PUBLIC,
    "login": PUBLIC,
    "create_lab": frozenset({Role.FACULTY}),
    "allocate": frozenset({Role.FACULTY}),
    "deallocate": frozenset({Role.FACULTY}),
    "activate_lab": frozenset({Role.FACULTY}),
    "close_lab": frozenset({Role.FACULTY}),
    "list_labs": frozenset({Role.FACULTY, Role.STUDENT}),
    "get_lab": frozenset({Role.FACULTY, Role.STUDENT}),
    "submit_code": frozenset({Role.STUDENT}),
    "answer_viva": frozenset({Role.STUDENT}),
    "override_score": frozenset({Role.FACULTY}),
    "class_report": frozenset({Role.FACULTY}),
    "my_progress": frozenset({Role.FACULTY, Role.STUDENT}),
    "export_submission": frozenset({Role.FACULTY, Role.STUDENT}),
}


@dataclass(frozen=True)
class SessionToken:
    token: str
    user_id: str
    role: Role
    issued_at: datetime
    expires_at: datetime


@dataclass
class VivaSession:
    session_id: str
    allocation_id: str
    questions: tuple[tuple[str, str], ...]  # (question_text, rubric_answer)
    answers: dict[int, tuple[str, float]] = field(default_factory=dict)
    state: str = "Open"  # Open | Completed | Expired
    started_at: datetime | None = None
    duration_limit_minutes: int = 0


@dataclass(frozen=True)
class ClassReport:
    lab_id: str
    agreement: analytics.AgreementReport | None
    agreement_note: str
    errors: analytics.ErrorReport | None
    ranking: tuple[tuple[str, str, float, str], ...]  # (student, submission, final, completed_at)
    plagiarism_alerts: tuple[tuple[str, str, float], ...]


def _iso(moment: datetime) -> str:
    return moment.isoformat()


def _parse_iso(text: str) -> datetime:
    return datetime.fromisoformat(text)


class LabService:
    def __init__(
        self,
        log=None,
        model: GbtModel | None = None,
        vectorizer: Vectorizer | None = None,
        clock: Callable[[], datetime] | None = None,
        seed: int = 42,
        token_ttl_minutes: int = DEFAULT_TOKEN_TTL_MINUTES,
        plagiarism_threshold: float = DEFAULT_PLAGIARISM_THRESHOLD,
    ):
        self.log = log if log is not None else InMemoryEventLog()
        self.model = model
        self.vectorizer = vectorizer if vectorizer is not None else TfidfVectorizer()
        self.clock = clock if clock is not None else (lambda: datetime.now(timezone.utc))
        self.seed = seed
        self.token_ttl = timedelta(minutes=token_ttl_minutes)
        self.plagiarism_threshold = plagiarism_threshold

        self._lock = threading.RLock()
        self._users: dict[str, User] = {}
        self._credentials: dict[str, dict] = {}
        self._disabled: set[str] = set()
        self._tokens: dict[str, SessionToken] = {}  # ephemeral: not event-sourced
        self._labs: dict[str, Lab] = {}
        self._lab_meta: dict[str, dict] = {}  # created_by, created_at, section
        self._allocations: dict[str, Allocation] = {}
        self._alloc_by_lab_student: dict[tuple[str, str], str] = {}
        self._submissions: dict[str, Submission] = {}
        self._submission_by_alloc: dict[str, str] = {}
        self._grade_parts: dict[str, dict] = {}  # submission_id -> breakdown numbers
        self._viva_sessions: dict[str, VivaSession] = {}
        self._events: list[StoredEvent] = []

        for event in self.log.read_all():
            self._apply(event)
            self._events.append(event)

    # ------------------------------------------------------------------
    # event plumbing

    def _now(self) -> datetime:
        moment = self.clock()
        if moment.tzinfo is None:
            moment = moment.replace(tzinfo=timezone.utc)
        return moment

    def _record(self, kind: str, entity_kind: str, entity_id: str, payload: dict) -> StoredEvent:
        event = StoredEvent(
            sequence=self.log.next_sequence,
            kind=kind,
            entity_kind=entity_kind,
            entity_id=entity_id,
            payload=payload,
            recorded_at=_iso(self._now()),
        )
        self.log.append(event)
        self._apply(event)
        self._events.append(event)
        return event

    def _apply(self, event: StoredEvent) -> None:
        getattr(self, f"_apply_{event.kind}")(event.payload)

    # ------------------------------------------------------------------
    # users and authentication

    def add_user(
        self, user_id: str, password: str, role: Role, display_name: str = "", disabled: bool = False
    ) -> User:
        with self._lock:
            if user_id in self._users:
                raise ConflictError(f"user {user_id!r} already exists")
            if not password:
                raise ValidationFailedError("password must be nonempty", {"fields": ["password"]})
            salt = secrets.token_hex(16)
            digest = hashlib.pbkdf2_hmac(
                "sha256", password.encode("utf-8"), bytes.fromhex(salt), PBKDF2_ITERATIONS
            ).hex()
            self._record(
                "user_added",
                "user",
                user_id,
                {
                    "user_id": user_id,
                    "role": role.value,
                    "display_name": display_name,
                    "salt": salt,
                    "hash": digest,
                    "iterations": PBKDF2_ITERATIONS,
                    "disabled": disabled,
                },
            )
            return self._users[user_id]

    def _apply_user_added(self, p: dict) -> None:
        self._users[p["user_id"]] = User(
            user_id=p["user_id"],
            role=Role(p["role"]),
            credential_hash=p["hash"],
            display_name=p["display_name"],
        )
        self._credentials[p["user_id"]] = {
            "salt": p["salt"],
            "hash": p["hash"],
            "iterations": p["iterations"],
        }
        if p.get("disabled"):
            self._disabled.add(p["user_id"])

    def login(self, username: str, password: str) -> SessionToken:
        with self._lock:
            creds = self._credentials.get(username)
            # hash against a fixed dummy salt when the user is unknown, so
            # timing does not reveal which usernames exist
            salt = creds["salt"] if creds else "00" * 16
            iterations = creds["iterations"] if creds else PBKDF2_ITERATIONS
            digest = hashlib.pbkdf2_hmac(
                "sha256", password.encode("utf-8"), bytes.fromhex(salt), iterations
            ).hex()
            expected = creds["hash"] if creds else "ff" * 32
            if not hmac.compare_digest(digest, expected):
                raise BadCredentialsError("invalid username or password")
            if username in self._disabled:
                raise AccountDisabledError("account is disabled")
            now = self._now()
            token = SessionToken(
                token=secrets.token_hex(24),
                user_id=username,
                role=self._users[username].role,
                issued_at=now,
                expires_at=now + self.token_ttl,
            )
            self._tokens[token.token] = token
            return token

    def authorize(self, token: str | None, route: str) -> User | None:
        """Resolve the caller for a route; deny by default."""
        allowed = ROUTE_ALLOWED_ROLES.get(route)
        if allowed is None:
            raise ForbiddenError(f"unknown route {route!r}")
        if allowed is PUBLIC:
            return None
        if not token:
            raise BadTokenError("missing bearer token")
        session = self._tokens.get(token)
        if session is None:
            raise BadTokenError("unknown or revoked token")
        if self._now() >= session.expires_at:
            raise BadTokenError("token expired")
        if session.user_id in self._disabled:
            raise AccountDisabledError("account is disabled")
        user = self._users[session.user_id]
        if user.role not in allowed:
            raise ForbiddenError(f"role {user.role.value} may not call {route}")
        return user

    # ------------------------------------------------------------------
    # lab lifecycle

    def create_lab(
        self,
        token: str,
        title: str,
        topic_keywords: Sequence[str],
        difficulty: str,
        viva_duration_minutes: int,
        mode: str,
        description: str = "",
        instructions: str = "",
        deadline: datetime | None = None,
        section: str = "",
        viva_weight: float = 0.3,
        viva_question_count: int = 3,
        grade_weights: Sequence[float] = (0.6, 0.2, 0.2),
    ) -> Lab:
        with self._lock:
            caller = self.authorize(token, "create_lab")
            bad_fields = []
            if not title:
                bad_fields.append("title")
            if not topic_keywords or not all(k.strip() for k in topic_keywords):
                bad_fields.append("topic_keywords")
            if difficulty not in {d.value for d in Difficulty}:
                bad_fields.append("difficulty")
            if mode not in {m.value for m in LabMode}:
                bad_fields.append("mode")
            if not isinstance(viva_duration_minutes, int) or viva_duration_minutes <= 0:
                bad_fields.append("viva_duration")
            if not (0.0 <= viva_weight <= 1.0):
                bad_fields.append("viva_weight")
            if len(tuple(grade_weights)) != 3 or any(w < 0 for w in grade_weights) or abs(
                sum(grade_weights) - 1.0
            ) > 1e-9:
                bad_fields.append("grade_weights")
            if bad_fields:
                raise ValidationFailedError("invalid lab fields", {"fields": bad_fields})

            lab_id = f"lab-{len(self._labs) + 1}"
            now = self._now()
            self._record(
                "lab_created",
                "lab",
                lab_id,
                {
                    "lab_id": lab_id,
                    "title": title,
                    "topic_keywords": list(topic_keywords),
                    "difficulty": difficulty,
                    "viva_duration_minutes": viva_duration_minutes,
                    "mode": mode,
                    "description": description,
                    "instructions": instructions,
                    "deadline": _iso(deadline) if deadline else None,
                    "section": section,
                    "viva_weight": viva_weight,
                    "viva_question_count": viva_question_count,
                    "grade_weights": list(grade_weights),
                    "created_by": caller.user_id,
                    "created_at": _iso(now),
                },
            )
            return self._labs[lab_id]

    def _apply_lab_created(self, p: dict) -> None:
        self._labs[p["lab_id"]] = Lab(
            lab_id=p["lab_id"],
            title=p["title"],
            topic_keywords=tuple(p["topic_keywords"]),
            difficulty=Difficulty(p["difficulty"]),
            viva_duration_minutes=p["viva_duration_minutes"],
            mode=LabMode(p["mode"]),
            description=p["description"],
            instructions=p["instructions"],
            deadline=_parse_iso(p["deadline"]) if p["deadline"] else None,
            viva_weight=p["viva_weight"],
            viva_question_count=p["viva_question_count"],
            grade_weights=tuple(p["grade_weights"]),
        )
        self._lab_meta[p["lab_id"]] = {
            "created_by": p["created_by"],
            "created_at": p["created_at"],
            "section": p["section"],
        }

    def _get_lab_or_404(self, lab_id: str) -> Lab:
        lab = self._labs.get(lab_id)
        if lab is None:
            raise NotFoundError(f"lab {lab_id!r} not found")
        return lab

    def allocate(
        self,
        token: str,
        lab_id: str,
        roster: Sequence[str],
        backend: GeneratorBackend = GeneratorBackend.TEMPLATE,
        external: genpipe.ExternalGenerator | None = None,
    ) -> dict:
        with self._lock:
            self.authorize(token, "allocate")
            lab = self._get_lab_or_404(lab_id)
            if lab.state is not LabState.DRAFT:
                raise ConflictError(f"lab {lab_id} is {lab.state.value}, not Draft")
            if not roster or len(set(roster)) != len(roster):
                raise ValidationFailedError("roster must be nonempty with unique ids", {"fields": ["roster"]})
            unknown = [s for s in roster if s not in self._users]
            if unknown:
                raise ValidationFailedError("unknown students in roster", {"students": unknown})

            new_lab, allocations = genpipe.allocate_lab(
                lab,
                roster,
                seed=self.seed,
                backend=backend,
                vectorizer=self.vectorizer,
                external=external,
                now=self._now(),
            )
            self._record(
                "lab_allocated",
                "lab",
                lab_id,
                {
                    "lab_id": lab_id,
                    "allocations": [
                        {
                            "allocation_id": a.allocation_id,
                            "student_id": a.student_id,
                            "question_text": a.question_text,
                            "rubric_answer": a.rubric_answer,
                            "generated_at": _iso(a.generated_at),
                            "generator_backend": a.generator_backend.value,
                        }
                        for a in allocations
                    ],
                },
            )
            return {
                "lab_id": lab_id,
                "allocated": len(allocations),
                "students": [
                    {"student_id": a.student_id, "allocation_id": a.allocation_id}
                    for a in allocations
                ],
            }

    def _apply_lab_allocated(self, p: dict) -> None:
        lab = self._labs[p["lab_id"]]
        self._labs[p["lab_id"]] = replace(lab, state=LabState.ALLOCATED)
        for entry in p["allocations"]:
            allocation = Allocation(
                allocation_id=entry["allocation_id"],
                lab_id=p["lab_id"],
                student_id=entry["student_id"],
                question_text=entry["question_text"],
                rubric_answer=entry["rubric_answer"],
                generated_at=_parse_iso(entry["generated_at"]),
                generator_backend=GeneratorBackend(entry["generator_backend"]),
            )
            self._allocations[allocation.allocation_id] = allocation
            self._alloc_by_lab_student[(p["lab_id"], allocation.student_id)] = allocation.allocation_id

    def deallocate(self, token: str, lab_id: str) -> dict:
        """Administrative reset of a not-yet-active lab back to Draft."""
        with self._lock:
            self.authorize(token, "deallocate")
            lab = self._get_lab_or_404(lab_id)
            if lab.state is not LabState.ALLOCATED:
                raise ConflictError(f"lab {lab_id} is {lab.state.value}; only Allocated labs can be deallocated")
            self._record("lab_deallocated", "lab", lab_id, {"lab_id": lab_id})
            return {"lab_id": lab_id, "state": LabState.DRAFT.value}

    def _apply_lab_deallocated(self, p: dict) -> None:
        lab_id = p["lab_id"]
        self._labs[lab_id] = replace(self._labs[lab_id], state=LabState.DRAFT)
        doomed = [a for a in self._allocations.values() if a.lab_id == lab_id]
        for allocation in doomed:
            del self._allocations[allocation.allocation_id]
            del self._alloc_by_lab_student[(lab_id, allocation.student_id)]

    def _change_state(self, token: str, lab_id: str, route: str, nxt: LabState) -> Lab:
        with self._lock:
            self.authorize(token, route)
            lab = self._get_lab_or_404(lab_id)
            outcome = validate_transition(lab.state, nxt)
            if not outcome.accepted:
                raise ConflictError(outcome.reason)
            self._record(
                "lab_state_changed", "lab", lab_id, {"lab_id": lab_id, "state": nxt.value}
            )
            return self._labs[lab_id]

    def activate_lab(self, token: str, lab_id: str) -> Lab:
        return self._change_state(token, lab_id, "activate_lab", LabState.ACTIVE)

    def close_lab(self, token: str, lab_id: str) -> Lab:
        return self._change_state(token, lab_id, "close_lab", LabState.CLOSED)

    def _apply_lab_state_changed(self, p: dict) -> None:
        self._labs[p["lab_id"]] = replace(self._labs[p["lab_id"]], state=LabState(p["state"]))

    def list_labs(self, token: str) -> list[dict]:
        with self._lock:
            caller = self.authorize(token, "list_labs")
            if caller.role is Role.FACULTY:
                return [
                    self._lab_view(lab, caller)
                    for lab in self._labs.values()
                    if self._lab_meta[lab.lab_id]["created_by"] == caller.user_id
                ]
            views = []
            for (lab_id, student_id), alloc_id in self._alloc_by_lab_student.items():
                if student_id == caller.user_id:
                    views.append(self._lab_view(self._labs[lab_id], caller))
            return views

    def get_lab(self, token: str, lab_id: str) -> dict:
        with self._lock:
            caller = self.authorize(token, "get_lab")
            lab = self._get_lab_or_404(lab_id)
            if caller.role is Role.STUDENT and (lab_id, caller.user_id) not in self._alloc_by_lab_student:
                raise NotFoundError(f"lab {lab_id!r} not found")
            return self._lab_view(lab, caller)

    def _lab_view(self, lab: Lab, caller: User) -> dict:
        meta = self._lab_meta[lab.lab_id]
        view = {
            "lab_id": lab.lab_id,
            "title": lab.title,
            "topic_keywords": list(lab.topic_keywords),
            "difficulty": lab.difficulty.value,
            "viva_duration_minutes": lab.viva_duration_minutes,
            "mode": lab.mode.value,
            "description": lab.description,
            "instructions": lab.instructions,
            "deadline": _iso(lab.deadline) if lab.deadline else None,
            "state": lab.state.value,
            "section": meta["section"],
            "viva_weight": lab.viva_weight,
            "viva_question_count": lab.viva_question_count,
        }
        if caller.role is Role.STUDENT:
            alloc_id = self._alloc_by_lab_student.get((lab.lab_id, caller.user_id))
            if alloc_id:
                allocation = self._allocations[alloc_id]
                view["allocation"] = {
                    "allocation_id": allocation.allocation_id,
                    "question_text": allocation.question_text,
                }
                sub_id = self._submission_by_alloc.get(alloc_id)
                if sub_id:
                    view["submission"] = self.submission_view(sub_id)
        else:
            entries = []
            for allocation in sorted(
                (a for a in self._allocations.values() if a.lab_id == lab.lab_id),
                key=lambda a: a.student_id,
            ):
                sub_id = self._submission_by_alloc.get(allocation.allocation_id)
                entries.append(
                    {
                        "allocation_id": allocation.allocation_id,
                        "student_id": allocation.student_id,
                        "question_text": allocation.question_text,
                        "submission": self.submission_view(sub_id) if sub_id else None,
                    }
                )
            view["allocations"] = entries
        return view

    # ------------------------------------------------------------------
    # submissions and grading

    def submit_code(self, token: str, allocation_id: str, code_text: str, language_tag: str) -> dict:
        with self._lock:
            caller = self.authorize(token, "submit_code")
            allocation = self._allocations.get(allocation_id)
            if allocation is None:
                raise NotFoundError(f"allocation {allocation_id!r} not found")
            if allocation.student_id != caller.user_id:
                raise NotYourAllocationError("allocation belongs to a different student")
            lab = self._labs[allocation.lab_id]
            if lab.state is not LabState.ACTIVE:
                raise LabNotActiveError(f"lab {lab.lab_id} is {lab.state.value}")
            now = self._now()
            if lab.deadline is not None and now > lab.deadline:
                raise DeadlinePassedError("submission deadline has passed")
            if self.model is None:
                raise GradingUnavailableError("no grading model loaded")

            previous_id = self._submission_by_alloc.get(allocation_id)
            breakdown = grade_submission(
                code_text,
                allocation.question_text,
                allocation.rubric_answer,
                lab.difficulty,
                self.model,
                self.vectorizer,
                weights=lab.grade_weights,
            )
            viva_seed = int.from_bytes(
                hashlib.sha256(f"{self.seed}:{allocation_id}".encode()).digest()[:8], "big"
            )
            questions = genpipe.viva_questions(
                lab.topic_keywords, lab.difficulty, viva_seed, lab.viva_question_count
            )
            submission_id = f"sub-{allocation_id}"
            session_id = f"viva-{allocation_id}"
            self._record(
                "submission_recorded",
                "submission",
                submission_id,
                {
                    "submission_id": submission_id,
                    "allocation_id": allocation_id,
                    "code_text": code_text,
                    "language_tag": language_tag,
                    "submitted_at": _iso(now),
                    "replaces": previous_id,
                    "ai_score": breakdown.final,
                    "grade": {
                        "correctness_score": breakdown.correctness_score,
                        "readability_score": breakdown.readability_score,
                        "complexity_score": breakdown.complexity_score,
                        "weights": list(breakdown.weights),
                        "final": breakdown.final,
                    },
                    "feedback": list(breakdown.feedback),
                    "viva_session": {
                        "session_id": session_id,
                        "questions": [[q, a] for q, a in questions],
                        "started_at": _iso(now),
                        "duration_limit_minutes": lab.viva_duration_minutes,
                    },
                },
            )
            view = self.submission_view(submission_id)
            view["viva"] = self.viva_view(session_id)
            return view

    def _apply_submission_recorded(self, p: dict) -> None:
        allocation_id = p["allocation_id"]
        previous_id = p.get("replaces")
        if previous_id:
            self._submissions.pop(previous_id, None)
            self._grade_parts.pop(previous_id, None)
            self._viva_sessions.pop(f"viva-{allocation_id}", None)
        submission = Submission(
            submission_id=p["submission_id"],
            allocation_id=allocation_id,
            code_text=p["code_text"],
            language_tag=p["language_tag"],
            submitted_at=_parse_iso(p["submitted_at"]),
            ai_score=p["ai_score"],
            final_score=p["ai_score"],
            feedback=tuple(p["feedback"]),
        )
        self._submissions[submission.submission_id] = submission
        self._submission_by_alloc[allocation_id] = submission.submission_id
        self._grade_parts[submission.submission_id] = dict(p["grade"])
        viva = p["viva_session"]
        self._viva_sessions[viva["session_id"]] = VivaSession(
            session_id=viva["session_id"],
            allocation_id=allocation_id,
            questions=tuple((q, a) for q, a in viva["questions"]),
            started_at=_parse_iso(viva["started_at"]),
            duration_limit_minutes=viva["duration_limit_minutes"],
        )

    def _final_score(self, submission: Submission, lab: Lab) -> float:
        """Override wins; otherwise grade mixed with viva by the lab's weight."""
        if submission.faculty_override is not None:
            return submission.faculty_override
        grade = submission.ai_score if submission.ai_score is not None else 0.0
        if submission.viva_score is None:
            return grade
        w = lab.viva_weight
        return min(100.0, max(0.0, (1.0 - w) * grade + w * submission.viva_score))

    def answer_viva(self, token: str, session_id: str, question_index: int, answer_text: str) -> dict:
        with self._lock:
            caller = self.authorize(token, "answer_viva")
            session = self._viva_sessions.get(session_id)
            if session is None:
                raise NotFoundError(f"viva session {session_id!r} not found")
            allocation = self._allocations[session.allocation_id]
            if allocation.student_id != caller.user_id:
                raise NotYourAllocationError("viva session belongs to a different student")
            if session.state == "Expired":
                raise SessionExpiredError("viva session has expired")
            if session.state == "Completed":
                raise ConflictError("viva session is already completed")

            now = self._now()
            deadline = session.started_at + timedelta(minutes=session.duration_limit_minutes)
            if now > deadline:
                self._expire_viva(session, now)
                raise SessionExpiredError(
                    "viva time limit elapsed; unanswered questions scored 0",
                    {"viva_score": self._submissions[
                        self._submission_by_alloc[session.allocation_id]
                    ].viva_score},
                )
            if not (0 <= question_index < len(session.questions)):
                raise IndexOutOfRangeError(
                    f"question_index must lie in [0,{len(session.questions) - 1}]"
                )
            if question_index in session.answers:
                raise AlreadyAnsweredError(f"question {question_index} already answered")

            rubric = session.questions[question_index][1]
            score, note = score_viva_answer(answer_text, rubric, self.vectorizer)
            answered = dict(session.answers)
            answered[question_index] = (answer_text, score)
            completed = len(answered) == len(session.questions)
            viva_score = (
                sum(s for _, s in answered.values()) / len(session.questions) if completed else None
            )
            self._record(
                "viva_answered",
                "viva",
                session_id,
                {
                    "session_id": session_id,
                    "question_index": question_index,
                    "answer_text": answer_text,
                    "score": score,
                    "completed": completed,
                    "viva_score": viva_score,
                },
            )
            result = {"question_index": question_index, "score": score, "note": note}
            if completed:
                result["viva_score"] = viva_score
                result["submission"] = self.submission_view(
                    self._submission_by_alloc[session.allocation_id]
                )
            return result

    def _apply_viva_answered(self, p: dict) -> None:
        session = self._viva_sessions[p["session_id"]]
        session.answers[p["question_index"]] = (p["answer_text"], p["score"])
        if p["completed"]:
            session.state = "Completed"
            self._set_viva_score(session.allocation_id, p["viva_score"])

    def _expire_viva(self, session: VivaSession, now: datetime) -> None:
        unanswered = [i for i in range(len(session.questions)) if i not in session.answers]
        scores = dict(session.answers)
        for i in unanswered:
            scores[i] = ("", 0.0)
        viva_score = sum(s for _, s in scores.values()) / len(session.questions)
        self._record(
            "viva_expired",
            "viva",
            session.session_id,
            {
                "session_id": session.session_id,
                "expired_at": _iso(now),
                "unanswered": unanswered,
                "viva_score": viva_score,
            },
        )

    def _apply_viva_expired(self, p: dict) -> None:
        session = self._viva_sessions[p["session_id"]]
        for i in p["unanswered"]:
            session.answers[i] = ("", 0.0)
        session.state = "Expired"
        self._set_viva_score(session.allocation_id, p["viva_score"])

    def _set_viva_score(self, allocation_id: str, viva_score: float) -> None:
        submission_id = self._submission_by_alloc[allocation_id]
        submission = replace(self._submissions[submission_id], viva_score=viva_score)
        lab = self._labs[self._allocations[allocation_id].lab_id]
        self._submissions[submission_id] = replace(
            submission, final_score=self._final_score(submission, lab)
        )

    def expire_overdue_viva(self, session_id: str) -> None:
        """Force the timer check without answering (used by sweepers/tests)."""
        with self._lock:
            session = self._viva_sessions.get(session_id)
            if session is None or session.state != "Open":
                return
            now = self._now()
            if now > session.started_at + timedelta(minutes=session.duration_limit_minutes):
                self._expire_viva(session, now)

    def override_score(self, token: str, submission_id: str, override: float, reason: str) -> dict:
        with self._lock:
            caller = self.authorize(token, "override_score")
            submission = self._submissions.get(submission_id)
            if submission is None:
                raise NotFoundError(f"submission {submission_id!r} not found")
            if not (0.0 <= override <= 100.0):
                raise OutOfRangeError(f"override must lie in [0,100], got {override!r}")
            self._record(
                "score_overridden",
                "submission",
                submission_id,
                {
                    "submission_id": submission_id,
                    "override": override,
                    "reason": reason,
                    "previous_final": submission.final_score,
                    "actor": caller.user_id,
                },
            )
            return self.submission_view(submission_id)

    def _apply_score_overridden(self, p: dict) -> None:
        submission_id = p["submission_id"]
        submission = replace(self._submissions[submission_id], faculty_override=p["override"])
        lab = self._labs[self._allocations[submission.allocation_id].lab_id]
        self._submissions[submission_id] = replace(
            submission, final_score=self._final_score(submission, lab)
        )

    def audit_trail(self, submission_id: str) -> list[dict]:
        """Every recorded event touching a submission, in order."""
        with self._lock:
            return [
                {
                    "sequence": e.sequence,
                    "kind": e.kind,
                    "recorded_at": e.recorded_at,
                    "payload": e.payload,
                }
                for e in self._events
                if e.entity_kind == "submission" and e.entity_id == submission_id
            ]

    def submission_view(self, submission_id: str) -> dict:
        submission = self._submissions.get(submission_id)
        if submission is None:
            raise NotFoundError(f"submission {submission_id!r} not found")
        grade = self._grade_parts.get(submission_id, {})
        return {
            "submission_id": submission.submission_id,
            "allocation_id": submission.allocation_id,
            "language_tag": submission.language_tag,
            "submitted_at": _iso(submission.submitted_at),
            "ai_score": submission.ai_score,
            "faculty_override": submission.faculty_override,
            "viva_score": submission.viva_score,
            "final_score": submission.final_score,
            "feedback": list(submission.feedback),
            "grade": grade,
        }

    def viva_view(self, session_id: str) -> dict:
        session = self._viva_sessions.get(session_id)
        if session is None:
            raise NotFoundError(f"viva session {session_id!r} not found")
        return {
            "session_id": session.session_id,
            "allocation_id": session.allocation_id,
            "state": session.state,
            "questions": [q for q, _ in session.questions],
            "answered": sorted(session.answers),
            "started_at": _iso(session.started_at),
            "duration_limit_minutes": session.duration_limit_minutes,
        }

    # ------------------------------------------------------------------
    # reports

    def class_report(self, token: str, lab_id: str) -> ClassReport:
        with self._lock:
            self.authorize(token, "class_report")
            self._get_lab_or_404(lab_id)
            submissions = [
                (self._allocations[s.allocation_id].student_id, s)
                for s in self._submissions.values()
                if self._allocations[s.allocation_id].lab_id == lab_id
            ]

            pairs = [
                (s.ai_score, s.faculty_override)
                for _, s in submissions
                if s.ai_score is not None and s.faculty_override is not None
            ]
            if len(pairs) >= 2:
                agreement = analytics.agreement_report(pairs)
                note = ""
            else:
                agreement = None
                note = "insufficient pairs"

            rows = [
                (s.submission_id, s.faculty_override, s.ai_score, "")
                for _, s in submissions
                if s.ai_score is not None and s.faculty_override is not None
            ]
            errors = analytics.error_report(rows, k=min(10, len(rows))) if rows else None

            def completed_at(sub: Submission) -> str:
                return _iso(sub.submitted_at)

            ranked = sorted(
                (
                    (student, s.submission_id, s.final_score or 0.0, completed_at(s))
                    for student, s in submissions
                ),
                key=lambda row: (-row[2], row[3], row[0]),
            )

            alerts = []
            vectors = [
                (s.submission_id, self.vectorizer.vectorize(s.code_text)) for _, s in submissions
            ]
            for i in range(len(vectors)):
                for j in range(i + 1, len(vectors)):
                    similarity = cosine(vectors[i][1], vectors[j][1])
                    if similarity >= self.plagiarism_threshold:
                        alerts.append((vectors[i][0], vectors[j][0], similarity))

            return ClassReport(
                lab_id=lab_id,
                agreement=agreement,
                agreement_note=note,
                errors=errors,
                ranking=tuple(ranked),
                plagiarism_alerts=tuple(alerts),
            )

    def my_progress(self, token: str) -> analytics.ProgressProfile:
        with self._lock:
            caller = self.authorize(token, "my_progress")
            events: list[analytics.SubjectEvent] = []
            if caller.role is Role.STUDENT:
                for allocation in self._allocations.values():
                    if allocation.student_id != caller.user_id:
                        continue
                    events.append(
                        analytics.SubjectEvent(
                            kind="assigned",
                            subject_id=caller.user_id,
                            lab_id=allocation.lab_id,
                            timestamp=allocation.generated_at,
                        )
                    )
                    submission_id = self._submission_by_alloc.get(allocation.allocation_id)
                    if submission_id:
                        submission = self._submissions[submission_id]
                        if submission.final_score is not None:
                            events.append(
                                analytics.SubjectEvent(
                                    kind="completed",
                                    subject_id=caller.user_id,
                                    lab_id=allocation.lab_id,
                                    timestamp=submission.submitted_at,
                                    score=submission.final_score,
                                )
                            )
            else:
                for lab_id, meta in self._lab_meta.items():
                    if meta["created_by"] != caller.user_id:
                        continue
                    finals = [
                        s.final_score
                        for s in self._submissions.values()
                        if self._allocations[s.allocation_id].lab_id == lab_id
                        and s.final_score is not None
                    ]
                    events.append(
                        analytics.SubjectEvent(
                            kind="conducted",
                            subject_id=caller.user_id,
                            lab_id=lab_id,
                            timestamp=_parse_iso(meta["created_at"]),
                            score=sum(finals) / len(finals) if finals else None,
                            section=meta["section"],
                        )
                    )
            return analytics.build_progress_profile(caller.user_id, caller.role, events)

    def export_submission(self, token: str, submission_id: str) -> dict:
        """Portable archive of one submission for external publishing."""
        with self._lock:
            caller = self.authorize(token, "export_submission")
            submission = self._submissions.get(submission_id)
            if submission is None:
                raise NotFoundError(f"submission {submission_id!r} not found")
            allocation = self._allocations[submission.allocation_id]
            if caller.role is Role.STUDENT and allocation.student_id != caller.user_id:
                raise NotYourAllocationError("submission belongs to a different student")
            return {
                "format": "labassess-export",
                "version": 1,
                "question": allocation.question_text,
                "code_text": submission.code_text,
                "language_tag": submission.language_tag,
                "scores": {
                    "ai_score": submission.ai_score,
                    "viva_score": submission.viva_score,
                    "faculty_override": submission.faculty_override,
                    "final_score": submission.final_score,
                },
                "feedback": list(submission.feedback),
            }

    # ------------------------------------------------------------------
    # state inspection

    def state_fingerprint(self) -> str:
        """Canonical digest of domain state; equal iff replay reproduced it."""
        with self._lock:
            state = {
                "users": {
                    uid: {"role": u.role.value, "display_name": u.display_name, "hash": u.credential_hash}
                    for uid, u in self._users.items()
                },
                "disabled": sorted(self._disabled),
                "labs": {
                    lab_id: {
                        "title": lab.title,
                        "keywords": list(lab.topic_keywords),
                        "difficulty": lab.difficulty.value,
                        "state": lab.state.value,
                        "deadline": _iso(lab.deadline) if lab.deadline else None,
                        "meta": self._lab_meta[lab_id],
                    }
                    for lab_id, lab in self._labs.items()
                },
                "allocations": {
                    aid: {
                        "lab": a.lab_id,
                        "student": a.student_id,
                        "question": a.question_text,
                        "rubric": a.rubric_answer,
                    }
                    for aid, a in self._allocations.items()
                },
                "submissions": {
                    sid: {
                        "allocation": s.allocation_id,
                        "code": s.code_text,
                        "ai": s.ai_score,
                        "override": s.faculty_override,
                        "viva": s.viva_score,
                        "final": s.final_score,
                        "feedback": list(s.feedback),
                    }
                    for sid, s in self._submissions.items()
                },
                "vivas": {
                    vid: {
                        "allocation": v.allocation_id,
                        "state": v.state,
                        "questions": [list(q) for q in v.questions],
                        "answers": {str(i): list(a) for i, a in sorted(v.answers.items())},
                    }
                    for vid, v in self._viva_sessions.items()
                },
            }
            blob = json.dumps(state, sort_keys=True, separators=(",", ":"))
            return hashlib.sha256(blob.encode("utf-8")).hexdigest()
