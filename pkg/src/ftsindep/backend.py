"""Backend selection: compiled contraction kernels when available,
pure NumPy otherwise.

Set ``FTSINDEP_PURE=1`` in the environment to force the pure backend even
when the extension is installed (used by the benchmark and parity tests).
"""

from __future__ import annotations

import os

from . import _contractions_py as _pure

try:
    from . import _contractions as _compiled  # type: ignore[attr-defined]
except ImportError:
    _compiled = None

_impl = _pure if (_compiled is None or os.environ.get("FTSINDEP_PURE")) else _compiled

shifted_product_sum = _impl.shifted_product_sum
xi_lag_sums = _impl.xi_lag_sums
diag_band_sums = _impl.diag_band_sums
tau_raw_sums = _impl.tau_raw_sums


def active_backend() -> str:
    """Name of the backend selected at import time."""
    return "pure" if _impl is _pure else "compiled"


def have_compiled() -> bool:
    return _compiled is not None


def get_backend(name: str):
    """Return the named backend module ("pure" or "compiled")."""
    if name == "pure":
        return _pure
    if name == "compiled":
        if _compiled is None:
            raise ValueError("compiled backend is not installed")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")
