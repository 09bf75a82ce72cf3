"""Kernel selection.

The compiled extension is used when it imports; otherwise the numpy
fallback. :func:`use` switches explicitly (benchmarks and equivalence tests).
"""
from __future__ import annotations

from types import ModuleType

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

kernels: ModuleType = _ckernels if _ckernels is not None else _pykernels


def available() -> list[str]:
    names = ["python"]
    if _ckernels is not None:
        names.insert(0, "compiled")
    return names


def load(name: str) -> ModuleType:
    if name == "python":
        return _pykernels
    if name == "compiled":
        if _ckernels is None:
            raise ImportError("ruinwalk._ckernels is not built; run `pip install -e .`")
        return _ckernels
    raise ValueError(f"unknown backend {name!r}")


def use(name: str) -> ModuleType:
    """Make ``name`` the active backend for every module; returns it."""
    global kernels
    kernels = load(name)
    return kernels


def name() -> str:
    return kernels.NAME


__all__ = ["available", "load", "use", "name", "kernels"]
