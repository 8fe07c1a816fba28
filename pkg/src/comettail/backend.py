"""Selection between the compiled and pure-numpy accumulation kernels.

The compiled extension (built from _kernels.pyx at install time) and the
numpy module _kernels_np implement the identical accumulate contract. The
compiled one is preferred when the import succeeds; set COMETTAIL_FORCE_NUMPY
to a non-empty value other than "0" to force the fallback regardless.
"""
from __future__ import annotations

import os

__all__ = ["BACKEND_NAME", "accumulate", "get_backend", "available_backends"]


def _forced_numpy(environ=None):
    env = os.environ if environ is None else environ
    flag = env.get("COMETTAIL_FORCE_NUMPY", "")
    return bool(flag) and flag != "0"


def _load_compiled():
    from . import _kernels
    return _kernels


def _load_numpy():
    from . import _kernels_np
    return _kernels_np


def _select(environ=None):
    if _forced_numpy(environ):
        return "numpy", _load_numpy()
    try:
        return "compiled", _load_compiled()
    except ImportError:
        return "numpy", _load_numpy()


BACKEND_NAME, _impl = _select()
accumulate = _impl.accumulate


def available_backends():
    """Importable backends as {name: accumulate}, compiled first if present."""
    found = {}
    try:
        found["compiled"] = _load_compiled().accumulate
    except ImportError:
        pass
    found["numpy"] = _load_numpy().accumulate
    return found


def get_backend(name=None):
    """Resolve a backend request to (name, accumulate).

    None picks the import-time default; "compiled" raises ImportError when
    the extension is unavailable.
    """
    if name is None:
        return BACKEND_NAME, accumulate
    if name == "numpy":
        return "numpy", _load_numpy().accumulate
    if name == "compiled":
        return "compiled", _load_compiled().accumulate
    raise ValueError(f"unknown backend {name!r}")
