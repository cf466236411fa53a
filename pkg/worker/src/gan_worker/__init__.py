"""Render worker: blendable class-conditional image synthesis over HTTP."""

from .app import create_app
from .model import DEFAULT_MODEL, RequestError, WorkerModel, parse_request

__all__ = [
    "DEFAULT_MODEL",
    "RequestError",
    "WorkerModel",
    "create_app",
    "parse_request",
]
