"""Kernel backend selection.

The hot per-heatmap loops (argmax, windowed mean, smoothing, quadratic
refinement) exist twice: a compiled Cython extension and a pure-Python
fallback with identical semantics. The compiled module is preferred when
importable; ``HMDECODE_BACKEND=python|compiled`` forces a choice. Both
backends accumulate in float64 in the same order, so their outputs match
bit for bit.
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_FORCED = os.environ.get("HMDECODE_BACKEND", "").strip().lower()
if _FORCED == "python":
    _active = _kernels_py
elif _FORCED == "compiled":
    if _compiled is None:
        raise ImportError("HMDECODE_BACKEND=compiled but the extension is not built")
    _active = _compiled
elif _FORCED:
    raise ValueError(f"unknown HMDECODE_BACKEND value: {_FORCED!r}")
else:
    _active = _compiled if _compiled is not None else _kernels_py


def kernels(name: str | None = None):
    """Return the active kernel module, or a specific one by name."""
    if name is None:
        return _active
    if name == "python":
        return _kernels_py
    if name == "compiled":
        if _compiled is None:
            raise ValueError("compiled backend is not available")
        return _compiled
    raise ValueError(f"unknown backend: {name!r}")


def backend_name() -> str:
    return "compiled" if _active is _compiled else "python"


def available_backends() -> tuple[str, ...]:
    return ("compiled", "python") if _compiled is not None else ("python",)
