"""Workspace defaults shared by the command-line tools."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from qclp import distance

WORKSPACE_ENV = "QCLP_WORKSPACE"
CONFIG_NAME = "qclp.json"


@dataclass(frozen=True)
class WorkspaceConfig:
    output_dir: str = "."
    node_budget: int = distance.DEFAULT_NODE_BUDGET
    estimator_iterations: int = distance.DEFAULT_ITERATIONS
    jobs: int = 1
    seed: int = 0

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> WorkspaceConfig:
        data = json.loads(text)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path: str | Path) -> WorkspaceConfig:
        return cls.from_json(Path(path).read_text())

    def with_overrides(self, **values) -> WorkspaceConfig:
        return replace(self, **{k: v for k, v in values.items() if v is not None})


def resolve(config_path: str | Path | None = None) -> WorkspaceConfig:
    """Config from an explicit file, else the workspace's file, else defaults.

    The workspace directory comes from ``$QCLP_WORKSPACE`` when set; it also
    becomes the output directory unless the file says otherwise.
    """
    workspace = os.environ.get(WORKSPACE_ENV)
    if config_path is not None:
        return WorkspaceConfig.load(config_path)
    if workspace:
        candidate = Path(workspace) / CONFIG_NAME
        if candidate.exists():
            return WorkspaceConfig.load(candidate)
        return WorkspaceConfig(output_dir=workspace)
    return WorkspaceConfig()
