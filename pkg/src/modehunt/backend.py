"""Runtime selection of the pairwise-kernel backend.

The compiled extension ``modehunt._core`` is preferred when importable;
otherwise the NumPy fallback is used.  The environment variable
``MODEHUNT_BACKEND`` forces the choice (``c`` or ``numpy``), and
:func:`select` rebinds it at runtime (used by the backend benchmark and
by tests that exercise both implementations).
"""

import logging
import os

from . import _numpy_core

logger = logging.getLogger(__name__)

try:
    from . import _core
except ImportError:
    _core = None

#: the module providing density/gradient/hessian/mean_shift/cross sums
active = _numpy_core


def available():
    """Names of the importable backends."""
    return ("c", "numpy") if _core is not None else ("numpy",)


def select(name):
    """Bind the active backend; returns the selected module.

    ``name`` is ``"c"``, ``"numpy"`` or ``"auto"`` (compiled if present).
    """
    global active
    if name == "auto":
        name = "c" if _core is not None else "numpy"
    if name == "c":
        if _core is None:
            raise RuntimeError("compiled backend requested but modehunt._core is not built")
        active = _core
    elif name == "numpy":
        active = _numpy_core
    else:
        raise ValueError(f"unknown backend {name!r}; expected 'c', 'numpy' or 'auto'")
    return active


_forced = os.environ.get("MODEHUNT_BACKEND", "auto").strip().lower() or "auto"
select(_forced)
if active is _numpy_core and _core is None and _forced == "auto":
    logger.info("compiled kernel core not available; using the NumPy fallback")
