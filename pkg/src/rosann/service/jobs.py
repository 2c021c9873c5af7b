"""Background job registry for long-running extraction work.

Jobs run on plain threads: one bag's extraction is I/O and JPEG bound,
and the registry exists for observability, not throughput.  Terminal
states are immutable; a finished job keeps its result (or error) until
the process exits.
"""

from __future__ import annotations

import itertools
import threading
import traceback
from dataclasses import dataclass, field
from typing import Callable

from rosann.errors import RosannError

JOB_STATES = ("queued", "running", "done", "failed")


class UnknownJob(RosannError):
    code = "NOT_FOUND"


@dataclass(slots=True)
class Job:
    id: str
    kind: str
    state: str = "queued"
    progress: float = 0.0
    error: str | None = None
    result: dict | None = None

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "state": self.state,
            "progress": self.progress,
            "error": self.error,
            "result": self.result,
        }


class JobRegistry:
    def __init__(self):
        self._jobs: dict[str, Job] = {}
        self._threads: dict[str, threading.Thread] = {}
        self._lock = threading.Lock()
        self._ids = itertools.count(1)

    def submit(self, kind: str, work: Callable[[], dict]) -> Job:
        """Run work() on a thread; its dict return becomes the result."""
        with self._lock:
            job = Job(id=f"job-{next(self._ids)}", kind=kind)
            self._jobs[job.id] = job

        def run():
            with self._lock:
                if job.state != "queued":
                    return
                job.state = "running"
            try:
                result = work()
            except Exception as exc:
                with self._lock:
                    job.state = "failed"
                    job.error = f"{type(exc).__name__}: {exc}"
                    job.progress = 1.0
                traceback.print_exc()
            else:
                with self._lock:
                    job.state = "done"
                    job.result = result
                    job.progress = 1.0

        thread = threading.Thread(target=run, name=job.id, daemon=True)
        self._threads[job.id] = thread
        thread.start()
        return job

    def get(self, job_id: str) -> Job:
        with self._lock:
            job = self._jobs.get(job_id)
        if job is None:
            raise UnknownJob(f"no job {job_id!r}")
        return job

    def wait(self, job_id: str, timeout: float | None = None) -> Job:
        thread = self._threads.get(job_id)
        if thread is not None:
            thread.join(timeout)
        return self.get(job_id)
