"""Single-writer ownership of annotation projects.

Every project has one in-memory owner; all mutations run under its
lock and persist before the call returns, so a GET after any mutation
sees the saved state and a process restart loses nothing.  Creating a
project pulls observation bounds from the bag's manifest and imports
its transcript as per-speaker tiers.
"""

from __future__ import annotations

import threading
from typing import Callable

from rosann.annotation.core import Project, UnknownTier, import_transcript
from rosann.annotation.storage import load_project, save_project
from rosann.errors import RosannError
from rosann.media.pipeline import MANIFEST_NAME, load_manifest, load_transcript_segments
from rosann.paths import DataDirs


class UnknownProject(RosannError):
    code = "NOT_FOUND"


class UnknownBag(RosannError):
    code = "NOT_FOUND"


class ProjectStore:
    def __init__(self, dirs: DataDirs):
        self.dirs = dirs
        self._projects: dict[str, Project] = {}
        self._locks: dict[str, threading.RLock] = {}
        self._guard = threading.Lock()

    def _lock_for(self, bag_id: str) -> threading.RLock:
        with self._guard:
            return self._locks.setdefault(bag_id, threading.RLock())

    def _load_if_exists(self, bag_id: str) -> Project | None:
        if bag_id in self._projects:
            return self._projects[bag_id]
        path = self.dirs.project_file(bag_id)
        if path.exists():
            project = load_project(path)
            self._projects[bag_id] = project
            return project
        return None

    def exists(self, bag_id: str) -> bool:
        with self._lock_for(bag_id):
            return self._load_if_exists(bag_id) is not None

    def get(self, bag_id: str) -> Project:
        with self._lock_for(bag_id):
            project = self._load_if_exists(bag_id)
            if project is None:
                raise UnknownProject(f"no project for bag {bag_id!r}")
            return project

    def open_or_create(self, bag_id: str) -> tuple[Project, bool]:
        """Existing project, or a fresh one seeded from the manifest."""
        with self._lock_for(bag_id):
            project = self._load_if_exists(bag_id)
            if project is not None:
                return project, False
            manifest_path = self.dirs.processed_for(bag_id) / MANIFEST_NAME
            if not manifest_path.exists():
                raise UnknownBag(
                    f"bag {bag_id!r} has no manifest; process it first"
                )
            manifest = load_manifest(self.dirs, bag_id)
            project = Project(
                bag_id=bag_id,
                observation_ms=max(manifest.observation_ms, 1),
            )
            if manifest.transcript is not None:
                segments = load_transcript_segments(
                    self.dirs.processed_for(bag_id) / manifest.transcript.path
                )
                import_transcript(project, segments)
            save_project(project, self.dirs)
            self._projects[bag_id] = project
            return project, True

    def mutate(self, bag_id: str, op: Callable[[Project], object]) -> object:
        """Run one mutation under the project lock and persist it."""
        with self._lock_for(bag_id):
            project = self._load_if_exists(bag_id)
            if project is None:
                raise UnknownProject(f"no project for bag {bag_id!r}")
            result = op(project)
            save_project(project, self.dirs)
            return result
