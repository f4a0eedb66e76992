"""Kernel backend selection: compiled Cython extension or pure-Python fallback.

The compiled backend (``bayeval._kernels``) is preferred when importable; the
pure backend (``bayeval._purekernels``) implements the identical algorithms
and produces bitwise-identical streams. Selection happens at import and can be
forced with the ``BAYEVAL_BACKEND`` environment variable (``compiled``,
``pure`` or ``auto``) or at runtime via :func:`select` (a testing/benchmark
hook; streams created before a switch keep their original backend).
"""

import os

from . import _purekernels
from .errors import ParameterError

try:
    from . import _kernels
except ImportError:  # extension not built on this platform
    _kernels = None

_active = None


def select(name="auto"):
    """Choose the kernel backend; returns the active backend module."""
    global _active
    if name == "auto":
        _active = _kernels if _kernels is not None else _purekernels
    elif name == "compiled":
        if _kernels is None:
            raise ParameterError("compiled backend requested but the extension is not built")
        _active = _kernels
    elif name == "pure":
        _active = _purekernels
    else:
        raise ParameterError(f"unknown backend {name!r}; expected auto, compiled or pure")
    return _active


def active():
    """The backend module currently in use."""
    return _active


def active_kind():
    """'compiled' or 'pure'."""
    return _active.BACKEND_KIND


def available_kinds():
    return ("compiled", "pure") if _kernels is not None else ("pure",)


select(os.environ.get("BAYEVAL_BACKEND", "auto"))
