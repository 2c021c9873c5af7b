"""Data directory layout shared by the pipeline, service, and CLI.

Everything lives under one root (env ROSANN_DATA_DIR, default ./datas):
input bags in rosbag-data/, extraction output in processed/<bag_id>/,
codebooks in booklist/, and annotation projects in annotation/.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

ENV_DATA_DIR = "ROSANN_DATA_DIR"
DEFAULT_DATA_DIR = "datas"


@dataclass(frozen=True, slots=True)
class DataDirs:
    root: Path

    @classmethod
    def from_env(cls, root: str | os.PathLike | None = None) -> "DataDirs":
        if root is None:
            root = os.environ.get(ENV_DATA_DIR, DEFAULT_DATA_DIR)
        return cls(Path(root))

    @property
    def bags(self) -> Path:
        return self.root / "rosbag-data"

    @property
    def processed(self) -> Path:
        return self.root / "processed"

    @property
    def booklist(self) -> Path:
        return self.root / "booklist"

    @property
    def annotation(self) -> Path:
        return self.root / "annotation"

    def processed_for(self, bag_id: str) -> Path:
        return self.processed / bag_id

    def project_file(self, bag_id: str) -> Path:
        return self.annotation / f"{bag_id}.json"

    def ensure(self) -> "DataDirs":
        """Create the full tree; safe to call repeatedly."""
        for sub in (self.bags, self.processed, self.booklist, self.annotation):
            sub.mkdir(parents=True, exist_ok=True)
        return self
