"""Exception types shared across the simulator."""
from __future__ import annotations

from typing import Optional


class AuhDockError(Exception):
    """Base class for every error raised by the package."""


class DomainError(AuhDockError, ValueError):
    """Numeric input outside the domain of an operation."""


class ConfigError(AuhDockError, ValueError):
    """Invalid parameter combination."""


class ScenarioError(ConfigError):
    """Problem with a scenario file, pointing at the offending key and line."""

    def __init__(self, message: str, *, key: Optional[str] = None, line: Optional[int] = None) -> None:
        location = []
        if key is not None:
            location.append(f"key '{key}'")
        if line is not None:
            location.append(f"line {line}")
        full = f"{message} ({', '.join(location)})" if location else message
        super().__init__(full)
        self.key = key
        self.line = line


class ContractViolation(AuhDockError, RuntimeError):
    """A caller broke the contract of an operation."""


class FsmFault(AuhDockError, RuntimeError):
    """The docking state machine received inconsistent inputs."""
