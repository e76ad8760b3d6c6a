"""Backend selection for the ball kernels.

The compiled extension is used when it was built; set
``OUTERFP_PURE_PYTHON=1`` to force the pure-Python implementation.
"""
import os

BACKEND = "python"

if os.environ.get("OUTERFP_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from ._kernels import Context, act, displacements  # noqa: F401

        BACKEND = "cython"
    except ImportError:
        pass

if BACKEND == "python":
    from ._kernels_py import Context, act, displacements  # noqa: F401
