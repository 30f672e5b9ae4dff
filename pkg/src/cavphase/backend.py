"""Kernel backend selection: compiled extension if available, else pure Python.

Set CAVPHASE_BACKEND=python (or =compiled) to force a choice; the default
"auto" prefers the compiled extension.  ``kernels`` exposes the selected
module; both implementations share signatures and status codes.
"""

import os

from . import _kernels_py

_requested = os.environ.get("CAVPHASE_BACKEND", "auto").lower()

kernels = None
if _requested in ("auto", "compiled"):
    try:
        from . import _kernels as _compiled
        kernels = _compiled
    except ImportError:
        if _requested == "compiled":
            raise ImportError(
                "CAVPHASE_BACKEND=compiled but the cavphase._kernels "
                "extension is not built; run pip install -e . --no-build-isolation")
if kernels is None:
    kernels = _kernels_py

BACKEND = kernels.BACKEND


def available_backends():
    names = ["python"]
    try:
        from . import _kernels  # noqa: F401
        names.insert(0, "compiled")
    except ImportError:
        pass
    return names


def get_kernels(name):
    """Fetch a specific backend module by name (for benchmarks/tests)."""
    if name == "python":
        return _kernels_py
    if name == "compiled":
        from . import _kernels as _compiled
        return _compiled
    raise ValueError(f"unknown backend {name!r}")
