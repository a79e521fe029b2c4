"""Backend selection for the heat-bath kernel.

The compiled module is used when it imports; setting FIVEVERTEX_PURE_PYTHON=1
forces the fallback (handy for debugging and for the benchmark).
"""
from __future__ import annotations

import os
from types import ModuleType

from . import _heatbath_py


def _load() -> tuple[ModuleType, str]:
    if os.environ.get("FIVEVERTEX_PURE_PYTHON", "").strip() not in ("", "0"):
        return _heatbath_py, "python"
    try:
        from . import _heatbath  # type: ignore[attr-defined]
    except ImportError:
        return _heatbath_py, "python"
    return _heatbath, "cython"


backend, BACKEND_NAME = _load()


def get_backend(name: str | None = None) -> ModuleType:
    """Kernel module by name ('cython' or 'python'); None gives the default."""
    if name is None:
        return backend
    if name == "python":
        return _heatbath_py
    if name == "cython":
        from . import _heatbath  # type: ignore[attr-defined]
        return _heatbath
    raise ValueError(f"unknown backend {name!r}")


def compiled_available() -> bool:
    try:
        from . import _heatbath  # type: ignore[attr-defined]  # noqa: F401
    except ImportError:
        return False
    return True
