"""Exception types raised across the package."""
from __future__ import annotations

from pathlib import Path


class LbLabError(Exception):
    """Root of all package errors."""


class ConfigError(LbLabError, ValueError):
    """Invalid experiment spec, config file or CLI value."""


class PartitionError(LbLabError, ValueError):
    """A partition request that cannot be honoured."""


class TraceWriteError(LbLabError, OSError):
    def __init__(self, path: Path, reason: str) -> None:
        super().__init__(f"Failed writing {path}: {reason}")
        self.path = Path(path)
