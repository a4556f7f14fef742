"""Backend selection for the well-being kernel.

The compiled extension is used when it imports; otherwise, or when
``LOCKDOWNSIM_PURE_PYTHON=1`` is set, the pure-Python implementation is used.
"""

import os

from . import _kernels_py

if os.environ.get("LOCKDOWNSIM_PURE_PYTHON") == "1":
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = _impl.BACKEND
wellbeing_terms = _impl.wellbeing_terms
objective_grid = _impl.objective_grid
optimize = _impl.optimize
