"""Run configuration shared by the CLI and the verification suite."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import DomainError

_TOL_FIELDS = ("theta_tol", "ode_tol", "quad_tol", "fd_step")


@dataclass(frozen=True)
class RunConfig:
    """Tolerances and output options for a run.

    All tolerances are absolute and must lie in (0, 1e-2].
    """

    theta_tol: float = 1e-12
    ode_tol: float = 1e-11
    quad_tol: float = 1e-10
    fd_step: float = 1e-5
    out: str | None = None
    fmt: str = "json"
    seed: int = 0

    def __post_init__(self):
        for name in _TOL_FIELDS:
            v = getattr(self, name)
            if not (0.0 < v <= 1e-2):
                raise DomainError(f"{name}={v} outside (0, 1e-2]")
        if self.fmt not in ("json", "csv"):
            raise DomainError(f"format must be json or csv, got {self.fmt!r}")

    @classmethod
    def from_file(cls, path, **overrides):
        with open(path) as fh:
            data = json.load(fh)
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)
