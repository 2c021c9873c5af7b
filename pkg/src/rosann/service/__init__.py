"""HTTP service: FastAPI app factory, job registry, project store."""

from rosann.service.app import create_app
from rosann.service.jobs import Job, JobRegistry, UnknownJob
from rosann.service.store import ProjectStore, UnknownBag, UnknownProject

__all__ = [
    "Job",
    "JobRegistry",
    "ProjectStore",
    "UnknownBag",
    "UnknownJob",
    "UnknownProject",
    "create_app",
]
