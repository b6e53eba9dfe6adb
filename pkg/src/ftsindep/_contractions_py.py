"""Pure NumPy implementations of the hot contraction kernels.

The compiled extension (``ftsindep._contractions``) provides the same
functions with fused loops; this module is the fallback selected at import
time when the extension is unavailable.  Negative lags delegate to the
positive-lag computation with the operand roles swapped, which makes the
lag-swap identities hold bitwise within a backend.
"""

from __future__ import annotations

import numpy as np


def shifted_product_sum(a: np.ndarray, b: np.ndarray, dr: int, dc: int) -> float:
    """``sum_{i,j} a[i, j] * b[i + dr, j + dc]`` over in-range indices."""
    n = a.shape[0]
    i0, i1 = max(0, -dr), n - max(0, dr)
    j0, j1 = max(0, -dc), n - max(0, dc)
    if i0 >= i1 or j0 >= j1:
        return 0.0
    return float(
        np.sum(a[i0:i1, j0:j1] * b[i0 + dr : i1 + dr, j0 + dc : j1 + dc])
    )


def xi_lag_sums(a: np.ndarray, b: np.ndarray, hmax: int) -> np.ndarray:
    """Diagonal-shift sums ``sum a[i, j] b[i+h, j+h]`` for h = -hmax..hmax."""
    out = np.zeros(2 * hmax + 1)
    for h in range(-hmax, hmax + 1):
        if h >= 0:
            out[h + hmax] = shifted_product_sum(a, b, h, h)
        else:
            out[h + hmax] = shifted_product_sum(b, a, -h, -h)
    return out


def diag_band_sums(a: np.ndarray, lmax: int) -> np.ndarray:
    """Superdiagonal sums ``sum_i a[i, i + l]`` for l = 0..lmax."""
    n = a.shape[0]
    out = np.zeros(lmax + 1)
    for l in range(min(lmax, n - 1) + 1):
        out[l] = np.trace(a, offset=l)
    return out


def _tau_raw_nonneg(gx: np.ndarray, gy: np.ndarray, c: np.ndarray, h: int) -> float:
    s = gx.shape[0]
    if h >= s:
        return 0.0
    b = s - h
    u = np.sqrt(c[:b] * c[h : b + h])
    prod = gx[:b, :b] * gy[h : b + h, h : b + h]
    return float(u @ prod @ u)


def tau_raw_sums(gx: np.ndarray, gy: np.ndarray, n: int, hs) -> np.ndarray:
    """Triangular-weighted contraction of two lag-overlap matrices.

    ``gx`` and ``gy`` are ``(2n-1) x (2n-1)`` arrays indexed by lag pairs
    (lag l at row ``l + n - 1``).  For each shift h the result is

        sum_{l, l'} sqrt(c_l c_{l+h}) sqrt(c_{l'} c_{l'+h})
                    gx[l, l'] gy[l+h, l'+h]

    with ``c_l = 1 - |l|/n`` and out-of-range lags contributing zero.
    """
    lags = np.arange(-(n - 1), n)
    c = 1.0 - np.abs(lags) / n
    out = np.empty(len(hs))
    for k, h in enumerate(hs):
        if h >= 0:
            out[k] = _tau_raw_nonneg(gx, gy, c, h)
        else:
            out[k] = _tau_raw_nonneg(gy, gx, c, -h)
    return out
