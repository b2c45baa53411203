"""Run-time budgets shared by the decision procedures, the oracle and the CLI."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .core import DomainError

CONFIG_ENV = "SPANNERS_CONFIG"


@dataclass(frozen=True)
class RunConfig:
    state_cap: int = 100_000      # largest automaton any construction may build
    witness_cap: int = 10_000     # longest witness ref-word that is decoded
    result_cap: int = 1_000_000   # largest relation evaluate() may materialize
    oracle_doc_len: int = 5       # document length bound of the brute-force checks
    oracle_trials: int = 500      # random instances per oracle-check run
    seed: int = 0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not isinstance(value, int) or isinstance(value, bool):
                raise DomainError(f"config field {f.name} must be an integer")
            if f.name != "seed" and value <= 0:
                raise DomainError(f"config field {f.name} must be positive")

    def replace(self, **changes) -> "RunConfig":
        data = asdict(self)
        data.update({k: v for k, v in changes.items() if v is not None})
        return RunConfig(**data)

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise DomainError(f"cannot read config {path}: {exc}") from exc
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise DomainError(f"unknown config fields {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path: str | Path | None = None) -> "RunConfig":
        """Explicit path, else the file named by $SPANNERS_CONFIG, else defaults."""
        path = path or os.environ.get(CONFIG_ENV)
        return cls.from_file(path) if path else cls()


DEFAULT_CONFIG = RunConfig()
