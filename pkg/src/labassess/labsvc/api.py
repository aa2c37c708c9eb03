"""HTTP JSON API over the service core.

Thin transport layer: bearer-token extraction, request models, and a
uniform {code, message, details} error shape. All behavior lives in
LabService; routes never compute scores themselves.
"""

from __future__ import annotations

from dataclasses import asdict, is_dataclass
from datetime import datetime

from fastapi import FastAPI, Header, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from ..analytics import jsonify
from ..core import GeneratorBackend
from .service import LabService, ServiceError


class LoginBody(BaseModel):
    username: str
    password: str


class CreateLabBody(BaseModel):
    title: str
    topic_keywords: list[str]
    difficulty: str
    viva_duration_minutes: int
    mode: str
    description: str = ""
    instructions: str = ""
    deadline: datetime | None = None
    section: str = ""
    viva_weight: float = 0.3
    viva_question_count: int = 3
    grade_weights: list[float] = Field(default=[0.6, 0.2, 0.2])


class AllocateBody(BaseModel):
    roster: list[str]
    backend: str = GeneratorBackend.TEMPLATE.value


class SubmitBody(BaseModel):
    code_text: str
    language_tag: str = "python"


class VivaAnswerBody(BaseModel):
    question_index: int
    answer_text: str


class OverrideBody(BaseModel):
    override: float
    reason: str


def _bearer(authorization: str | None) -> str | None:
    if authorization and authorization.startswith("Bearer "):
        return authorization[len("Bearer ") :]
    return None


def _plain(value):
    if is_dataclass(value) and not isinstance(value, type):
        return jsonify(asdict(value))
    return jsonify(value)


def create_app(service: LabService) -> FastAPI:
    app = FastAPI(title="labassess", docs_url=None, redoc_url=None)

    @app.exception_handler(ServiceError)
    async def service_error_handler(_request: Request, exc: ServiceError):
        return JSONResponse(
            status_code=exc.http_status,
            content={"code": exc.code, "message": str(exc), "details": exc.details},
        )

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "grading_enabled": service.model is not None}

    @app.post("/login")
    def login(body: LoginBody):
        token = service.login(body.username, body.password)
        return {
            "token": token.token,
            "user_id": token.user_id,
            "role": token.role.value,
            "expires_at": token.expires_at.isoformat(),
        }

    @app.post("/labs")
    def create_lab(body: CreateLabBody, authorization: str | None = Header(default=None)):
        lab = service.create_lab(
            _bearer(authorization),
            title=body.title,
            topic_keywords=body.topic_keywords,
            difficulty=body.difficulty,
            viva_duration_minutes=body.viva_duration_minutes,
            mode=body.mode,
            description=body.description,
            instructions=body.instructions,
            deadline=body.deadline,
            section=body.section,
            viva_weight=body.viva_weight,
            viva_question_count=body.viva_question_count,
            grade_weights=tuple(body.grade_weights),
        )
        return {"lab_id": lab.lab_id, "state": lab.state.value}

    @app.post("/labs/{lab_id}/allocate")
    def allocate(lab_id: str, body: AllocateBody, authorization: str | None = Header(default=None)):
        return service.allocate(
            _bearer(authorization), lab_id, body.roster, backend=GeneratorBackend(body.backend)
        )

    @app.delete("/labs/{lab_id}/allocations")
    def deallocate(lab_id: str, authorization: str | None = Header(default=None)):
        return service.deallocate(_bearer(authorization), lab_id)

    @app.post("/labs/{lab_id}/activate")
    def activate(lab_id: str, authorization: str | None = Header(default=None)):
        lab = service.activate_lab(_bearer(authorization), lab_id)
        return {"lab_id": lab.lab_id, "state": lab.state.value}

    @app.post("/labs/{lab_id}/close")
    def close(lab_id: str, authorization: str | None = Header(default=None)):
        lab = service.close_lab(_bearer(authorization), lab_id)
        return {"lab_id": lab.lab_id, "state": lab.state.value}

    @app.get("/me/labs")
    def my_labs(authorization: str | None = Header(default=None)):
        return {"labs": service.list_labs(_bearer(authorization))}

    @app.get("/labs/{lab_id}")
    def get_lab(lab_id: str, authorization: str | None = Header(default=None)):
        return service.get_lab(_bearer(authorization), lab_id)

    @app.post("/allocations/{allocation_id}/submissions")
    def submit(allocation_id: str, body: SubmitBody, authorization: str | None = Header(default=None)):
        return service.submit_code(
            _bearer(authorization), allocation_id, body.code_text, body.language_tag
        )

    @app.post("/viva/{session_id}/answers")
    def answer_viva(
        session_id: str, body: VivaAnswerBody, authorization: str | None = Header(default=None)
    ):
        return service.answer_viva(
            _bearer(authorization), session_id, body.question_index, body.answer_text
        )

    @app.get("/viva/{session_id}")
    def viva_state(session_id: str, authorization: str | None = Header(default=None)):
        service.authorize(_bearer(authorization), "answer_viva")
        return service.viva_view(session_id)

    @app.post("/submissions/{submission_id}/override")
    def override(
        submission_id: str, body: OverrideBody, authorization: str | None = Header(default=None)
    ):
        return service.override_score(
            _bearer(authorization), submission_id, body.override, body.reason
        )

    @app.get("/labs/{lab_id}/report")
    def class_report(lab_id: str, authorization: str | None = Header(default=None)):
        return _plain(service.class_report(_bearer(authorization), lab_id))

    @app.get("/me/progress")
    def my_progress(authorization: str | None = Header(default=None)):
        profile = service.my_progress(_bearer(authorization))
        document = _plain(profile)
        # dict keys must be strings on the wire; heatmap keys are tuples
        document["heatmap"] = [
            {"weekday": day, "week": week, "count": count}
            for (day, week), count in sorted(profile.heatmap.items())
        ]
        return document

    @app.get("/submissions/{submission_id}/export")
    def export(submission_id: str, authorization: str | None = Header(default=None)):
        return service.export_submission(_bearer(authorization), submission_id)

    return app
