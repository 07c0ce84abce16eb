"""Kernel backend selection: compiled extension when available, pure Python otherwise.

Set ``ICSOURCE_BACKEND=python`` to force the pure kernels or
``ICSOURCE_BACKEND=c`` to require the compiled ones (ImportError if absent).
Both expose the same functions with identical semantics.
"""
from __future__ import annotations

import os

from . import _kernels_py

_requested = os.environ.get("ICSOURCE_BACKEND", "").strip().lower()
if _requested not in ("", "c", "python"):
    raise ImportError(
        f"ICSOURCE_BACKEND must be 'c' or 'python', got {_requested!r}"
    )

_compiled = None
if _requested != "python":
    try:
        from . import _kernels_c as _compiled  # type: ignore[attr-defined]
    except ImportError:
        _compiled = None
if _requested == "c" and _compiled is None:
    raise ImportError(
        "ICSOURCE_BACKEND=c requested but the compiled kernels are not installed"
    )

kernels = _compiled if _compiled is not None else _kernels_py
BACKEND = "c" if _compiled is not None else "python"


def backend_name() -> str:
    return BACKEND
