"""Kernel backend selection.

The compiled extension is used when it was built and importable, unless the
environment variable ``POSGEOM_PURE_PYTHON`` is set to a non-empty value other
than ``0``. Both backends expose ``add_terms``, ``mul_terms`` and
``bareiss_echelon`` with identical semantics.
"""

import os

from . import _kernels_py

_force_pure = os.environ.get("POSGEOM_PURE_PYTHON", "") not in ("", "0")

compiled = None
if not _force_pure:
    try:
        from . import _kernels as compiled
    except ImportError:  # extension not built
        compiled = None

_impl = compiled if compiled is not None else _kernels_py
BACKEND = "cython" if compiled is not None else "python"

add_terms = _impl.add_terms
mul_terms = _impl.mul_terms
bareiss_echelon = _impl.bareiss_echelon
