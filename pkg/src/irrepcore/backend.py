"""Kernel backend selection.

The hot inner loops (spherical-harmonic evaluation and per-path coupling
contractions) exist twice: a compiled Cython extension and a pure-numpy
fallback with identical call signatures. The compiled backend is used
when importable; IRREPCORE_BACKEND=python|compiled forces a choice.
"""

import os
from contextlib import contextmanager

from . import _kernels_py

_BACKENDS = {"python": _kernels_py}
try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None
else:
    _BACKENDS["compiled"] = _compiled


def _select():
    choice = os.environ.get("IRREPCORE_BACKEND", "auto").strip().lower()
    if choice in ("auto", ""):
        return _compiled if _compiled is not None else _kernels_py
    if choice not in _BACKENDS:
        if choice == "compiled":
            raise RuntimeError(
                "IRREPCORE_BACKEND=compiled but the extension is not built"
            )
        raise RuntimeError(f"unknown IRREPCORE_BACKEND {choice!r}")
    return _BACKENDS[choice]


_ACTIVE = _select()


def get_kernels():
    """The active kernels module."""
    return _ACTIVE


def active_backend() -> str:
    """Name of the active backend: 'compiled' or 'python'."""
    return "compiled" if _ACTIVE is _compiled and _compiled is not None else "python"


def available_backends() -> dict:
    """All importable backends by name."""
    return dict(_BACKENDS)


@contextmanager
def use(name: str):
    """Temporarily switch the active backend (used by the benchmark)."""
    global _ACTIVE
    if name not in _BACKENDS:
        raise RuntimeError(f"backend {name!r} is not available")
    previous = _ACTIVE
    _ACTIVE = _BACKENDS[name]
    try:
        yield
    finally:
        _ACTIVE = previous
