"""Kernel backend selection.

The hot per-triangle loops exist twice: a Cython extension
(``_ckernels``) and a NumPy fallback (``py_kernels``).  The compiled
backend is preferred when importable; set ``FREQDECAY_BACKEND=py`` or
``FREQDECAY_BACKEND=c`` to force a choice (forcing ``c`` raises if the
extension is missing).  ``benchmarks/bench_kernels.py`` compares the two.
"""

import os

_choice = os.environ.get("FREQDECAY_BACKEND", "").lower()
if _choice not in ("", "py", "c"):
    raise ImportError(f"FREQDECAY_BACKEND must be 'py' or 'c', got {_choice!r}")

_impl = None
if _choice != "py":
    try:
        from . import _ckernels as _impl
    except ImportError:
        if _choice == "c":
            raise
        _impl = None
if _impl is None:
    from . import py_kernels as _impl

name = _impl.name
clip_table = _impl.clip_table
level_chords = _impl.level_chords
element_stiffness = _impl.element_stiffness


def available_backends():
    """Names of the importable kernel backends."""
    out = ["python"]
    try:
        from . import _ckernels  # noqa: F401
        out.insert(0, "compiled")
    except ImportError:
        pass
    return out
