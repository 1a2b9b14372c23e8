"""Statevector kernel dispatch.

Two interchangeable backends implement the same small-kernel API: a compiled
Cython extension (``_fast``) and a pure-numpy fallback (``pure``). The
extension is selected automatically when importable; set ``QTCLAB_KERNELS``
to ``pure`` or ``cython`` to force a choice, or call :func:`set_backend`
(used by the benchmark and the backend-parity tests).
"""

from __future__ import annotations

import os

from . import pure as _pure

try:
    from . import _fast as _cython
except ImportError:
    _cython = None

_FUNCTIONS = (
    "apply_ry",
    "apply_cry",
    "apply_dense",
    "apply_phases",
    "expect_zmask",
    "expect_pauli",
)

_active = _pure


def available_backends() -> tuple[str, ...]:
    return ("pure", "cython") if _cython is not None else ("pure",)


def get_backend(name: str):
    """Return the backend module for `name` ('pure' or 'cython')."""
    if name == "pure":
        return _pure
    if name == "cython":
        if _cython is None:
            raise ValueError("cython kernel extension is not built")
        return _cython
    raise ValueError(f"unknown kernel backend {name!r}")


def set_backend(name: str) -> None:
    """Switch the active backend; rebinds the module-level functions."""
    global _active
    _active = get_backend(name)
    for fn in _FUNCTIONS:
        globals()[fn] = getattr(_active, fn)


def backend_name() -> str:
    return _active.BACKEND_NAME


_requested = os.environ.get("QTCLAB_KERNELS", "").strip().lower()
if _requested:
    set_backend(_requested)
else:
    set_backend("cython" if _cython is not None else "pure")
