"""Select the RK4 Lindblad kernel: compiled extension if built, numpy otherwise.

Set ``RAMANSWAP_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _lindblad_py

try:
    if os.environ.get("RAMANSWAP_PURE_PYTHON"):
        raise ImportError("pure-python kernel requested")
    from . import _lindblad_ext as _impl
    BACKEND = "cython"
except ImportError:
    _impl = _lindblad_py
    BACKEND = "python"

rk4_lindblad = _impl.rk4_lindblad
rk4_lindblad_python = _lindblad_py.rk4_lindblad
