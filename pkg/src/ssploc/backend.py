"""Kernel backend selection.

The batched log-likelihood kernels exist twice: a Cython extension
(``ssploc._kernels``) and a numpy fallback (``ssploc._kernels_py``). The
compiled module is preferred when it has been built; set
``SSPLOC_BACKEND=python`` to force the fallback, ``=compiled`` to require
the extension. ``benchmarks/backend_bench.py`` compares the two.
"""

from __future__ import annotations

import os

from . import _kernels_py


def _select():
    choice = os.environ.get("SSPLOC_BACKEND", "auto").lower()
    if choice == "python":
        return _kernels_py
    try:
        from . import _kernels

        return _kernels
    except ImportError:
        if choice == "compiled":
            raise ImportError(
                "SSPLOC_BACKEND=compiled but the ssploc._kernels extension is "
                "not built; run `python setup.py build_ext --inplace`"
            ) from None
        return _kernels_py


kernels = _select()


def active_backend() -> str:
    """Name of the kernel implementation in use: 'compiled' or 'python'."""
    return kernels.BACKEND_NAME


def get_kernels(name: str):
    """Fetch a specific implementation (for tests and benchmarks)."""
    if name == "python":
        return _kernels_py
    if name == "compiled":
        from . import _kernels

        return _kernels
    raise ValueError(f"unknown backend {name!r}")
