"""Backend selection for the hot loops.

The compiled extension is used when it imports cleanly. Setting the
environment variable ``SSBAND_KERNELS=python`` forces the numpy fallback.
``BACKEND`` names the active implementation.
"""
import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

if _compiled is not None and os.environ.get("SSBAND_KERNELS", "").lower() != "python":
    _impl, BACKEND = _compiled, "compiled"
else:
    _impl, BACKEND = _kernels_py, "python"

idwt_step = _impl.idwt_step
dwt_step = _impl.dwt_step
eval_points = _impl.eval_points
project_points = _impl.project_points


def get_backend(name):
    """Return the kernel module called ``name`` ("compiled" or "python")."""
    if name == "python":
        return _kernels_py
    if name == "compiled":
        if _compiled is None:
            raise ImportError("compiled kernels are not available")
        return _compiled
    raise ValueError("unknown backend %r" % name)


def compiled_available():
    return _compiled is not None
