"""Degree capacity handling.

Coefficient tables are built with exact integer arithmetic whose size (and
the memory of the dense coupling table) grows quickly with the maximum
degree, so the library enforces a configurable capacity: 8 by default,
overridable through the IRREPCORE_MAX_L environment variable, with a hard
ceiling of 15.
"""

import os

DEFAULT_MAX_DEGREE = 8
HARD_MAX_DEGREE = 15

_ENV_VAR = "IRREPCORE_MAX_L"


class CapacityError(ValueError):
    """A requested degree exceeds the configured capacity."""


def max_degree_capacity() -> int:
    """Current degree capacity (default 8, env-overridable, ceiling 15)."""
    raw = os.environ.get(_ENV_VAR)
    if raw is None:
        return DEFAULT_MAX_DEGREE
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{_ENV_VAR} must be an integer, got {raw!r}") from None
    if not 0 <= value <= HARD_MAX_DEGREE:
        raise ValueError(
            f"{_ENV_VAR}={value} is outside the supported range "
            f"0..{HARD_MAX_DEGREE}"
        )
    return value


def check_degree(l: int, what: str = "degree") -> int:
    """Validate a degree against the capacity; returns it unchanged."""
    if l < 0:
        raise ValueError(f"{what} must be >= 0, got {l}")
    cap = max_degree_capacity()
    if l > cap:
        raise CapacityError(
            f"{what} {l} exceeds the configured capacity {cap} "
            f"(set {_ENV_VAR} to raise it, hard ceiling {HARD_MAX_DEGREE})"
        )
    return l
