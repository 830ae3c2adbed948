"""Kernel backend selection.

The compiled extension is preferred when importable; set ``FNSLAB_KERNEL`` to
``python`` or ``compiled`` to force one side.  ``benchmarks/bench_kernels.py``
compares the two.
"""

import os

from . import _kernel_ref

_choice = os.environ.get("FNSLAB_KERNEL", "").strip().lower()

if _choice == "python":
    _impl = _kernel_ref
elif _choice == "compiled":
    from . import _kernel as _impl  # noqa: F401 -- import error is the answer
else:
    try:
        from . import _kernel as _impl
    except ImportError:
        _impl = _kernel_ref

BACKEND = _impl.BACKEND
apply_multiplier = _impl.apply_multiplier
leray = _impl.leray
advect = _impl.advect
spectral_gradient = _impl.spectral_gradient
if_stage = _impl.if_stage
if_final = _impl.if_final


def get_backend(name):
    """Return a specific backend module ("python" or "compiled")."""
    if name == "python":
        return _kernel_ref
    if name == "compiled":
        from . import _kernel
        return _kernel
    raise ValueError(f"unknown kernel backend {name!r}")
