"""Kernel backend selection.

The compiled Cython extension is used when importable; otherwise the numpy
fallback takes over transparently.  Set NLHARM_PURE_PYTHON=1 to force the
fallback (used by the benchmark and the backend-equivalence tests).
"""

import os

if os.environ.get("NLHARM_PURE_PYTHON"):
    from . import _kernels_py as kernels

    HAVE_COMPILED = False
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]

        HAVE_COMPILED = True
    except ImportError:
        from . import _kernels_py as kernels

        HAVE_COMPILED = False


def backend_name():
    return kernels.BACKEND
