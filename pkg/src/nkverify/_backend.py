"""Select the kernel implementation at import time.

The compiled module is used when present.  Setting ``NKVERIFY_PURE_PYTHON=1``
forces the numpy fallback, which is also used when the extension was not
built.
"""
import os

if os.environ.get("NKVERIFY_PURE_PYTHON") == "1":
    from nkverify import _pykernels as kernels

    BACKEND = "python"
else:
    try:
        from nkverify import _ckernels as kernels

        BACKEND = "cython"
    except ImportError:  # extension not built
        from nkverify import _pykernels as kernels

        BACKEND = "python"

__all__ = ["kernels", "BACKEND"]
