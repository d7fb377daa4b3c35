"""Run configuration and the key=value config-file format.

A config file holds one `key=value` pair per line; `#` starts a comment and
blank lines are ignored.  Keys are the long command-line flag names with
dashes replaced by underscores (`cfl_c=0.1`).  Values given on the command
line override the file.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

__all__ = ["RunConfig", "ConfigError", "load_config_file"]


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


@dataclass
class RunConfig:
    m: int = 128
    L: float = 3.2
    eps: float = 0.18
    eta: float = 1.0
    A: float = 1.0
    dt: float | None = None
    cfl_c: float | None = None
    tmax: float = 0.0
    seed: int = 0
    init: str = "benchmark"
    init_file: str | None = None
    out: str = "out"
    snap_every: int = 0
    series_every: int = 1
    tol: float = 1e-9
    max_iter: int = 500

    def __post_init__(self) -> None:
        if self.dt is not None and self.cfl_c is not None:
            raise ConfigError("give either dt or cfl-c, not both")
        if self.dt is None and self.cfl_c is None:
            self.cfl_c = 0.1
        if self.init not in ("benchmark", "random", "file"):
            raise ConfigError(f"unknown initial condition {self.init!r}")
        if self.init == "file" and not self.init_file:
            raise ConfigError("init=file requires init-file")
        if self.tmax < 0:
            raise ConfigError("tmax must be nonnegative")
        if self.snap_every < 0 or self.series_every < 0:
            raise ConfigError("output intervals must be nonnegative")

    @property
    def step_size(self) -> float:
        if self.dt is not None:
            return self.dt
        h = self.L / self.m
        return self.cfl_c * h * h

    def n_steps(self) -> int:
        if self.tmax == 0.0:
            return 0
        return max(1, int(round(self.tmax / self.step_size)))


def load_config_file(path) -> dict[str, str]:
    """Parse a key=value file into a string dict (no type coercion here)."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip().replace("-", "_")] = value.strip()
    return out
