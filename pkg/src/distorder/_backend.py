"""Selects the compiled kernels when available, else the numpy fallback.

Set ``DISTORDER_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _fallback


def _load_compiled() -> ModuleType | None:
    if os.environ.get("DISTORDER_PURE_PYTHON", "") not in ("", "0"):
        return None
    try:
        from . import _core
    except ImportError:
        return None
    return _core


compiled = _load_compiled()
impl: ModuleType = compiled if compiled is not None else _fallback
BACKEND = "compiled" if compiled is not None else "python"


def get(name: str) -> ModuleType:
    """Kernel module by name: ``"compiled"`` or ``"python"``."""
    if name == "python":
        return _fallback
    if name == "compiled":
        if compiled is None:
            raise ImportError("compiled kernels are not available")
        return compiled
    raise ValueError(f"unknown backend: {name!r}")


causal_conv = impl.causal_conv
volterra_march = impl.volterra_march
tril_toeplitz_inv = impl.tril_toeplitz_inv
