"""Credentialed lab service: lifecycle, submissions, vivas, reports."""

from .api import create_app
from .service import (
    LabService,
    ROUTE_ALLOWED_ROLES,
    ServiceError,
    SessionToken,
    VivaSession,
)
from .store import FileEventLog, InMemoryEventLog, StoredEvent

__all__ = [
    "LabService",
    "ROUTE_ALLOWED_ROLES",
    "ServiceError",
    "SessionToken",
    "VivaSession",
    "FileEventLog",
    "InMemoryEventLog",
    "StoredEvent",
    "create_app",
]
