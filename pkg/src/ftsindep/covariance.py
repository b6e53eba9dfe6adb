"""Empirical cross- and autocovariance surfaces at arbitrary lags, and
their integrated products.

The defining sums use the truncated index range but always demean with the
full-sample mean curve, and normalize by ``1/n`` (not ``1/(n-h)``).  Lags
whose summation range is empty yield exact zeros so that kernel-weighted
lag sums stay total.

Integrated quantities are computed through ``n x n`` Gram matrices of the
centered curves rather than ``m x m`` surfaces; the two routes agree
exactly up to rounding (the surface route survives in the test suite as an
oracle).  All operations are pure and reentrant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft

from . import backend
from .errors import GridMismatch, LengthMismatch
from .functional import FunctionalSample, Grid, _frozen, _gram_values

__all__ = [
    "CovSurface",
    "cross_cov_surface",
    "autocov_surface",
    "integrated_sq_cross_cov",
    "integrated_autocov",
    "gram_of_autocov_surfaces",
    "save_surface_csv",
]


@dataclass(frozen=True, eq=False)
class CovSurface:
    """Values of a covariance surface on the ``(t, s)`` grid squares."""

    values: np.ndarray
    grid: Grid
    lag: int

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))


def _check_pair(x: FunctionalSample, y: FunctionalSample) -> None:
    if x.n != y.n:
        raise LengthMismatch(f"samples have {x.n} and {y.n} curves")
    if not x.grid.same_as(y.grid):
        raise GridMismatch("samples live on different grids")


def _centered(sample: FunctionalSample) -> np.ndarray:
    return sample.values - sample.values.mean(axis=0)


def _cross_surface_values(xc: np.ndarray, yc: np.ndarray, h: int) -> np.ndarray:
    n = xc.shape[0]
    if h >= 0:
        if h >= n:
            return np.zeros((xc.shape[1], yc.shape[1]))
        return (xc[: n - h].T @ yc[h:]) / n
    # negative lag: transpose of the swapped positive-lag surface, which
    # reproduces the defining sum exactly
    return _cross_surface_values(yc, xc, -h).T.copy()


def cross_cov_surface(x: FunctionalSample, y: FunctionalSample, h: int) -> CovSurface:
    """Sample cross-covariance surface of ``x`` against ``y`` shifted by lag ``h``.

    For ``h >= 0`` the entry at ``(t, s)`` is
    ``(1/n) sum_{i=1}^{n-h} (x_i(t) - xbar(t)) (y_{i+h}(s) - ybar(s))``;
    negative lags mirror the sum.  ``|h| >= n`` gives the zero surface.
    """
    _check_pair(x, y)
    return CovSurface(_cross_surface_values(_centered(x), _centered(y), h), x.grid, h)


def autocov_surface(x: FunctionalSample, lag: int) -> CovSurface:
    """Autocovariance surface, i.e. the cross-covariance of ``x`` with itself."""
    return cross_cov_surface(x, x, lag)


def integrated_sq_cross_cov(x: FunctionalSample, y: FunctionalSample, h: int) -> float:
    """Squared L2 norm of the lag-``h`` cross-covariance surface.

    Evaluated by the exact Gram factorization
    ``(1/n^2) sum_{i,j} A[i, j] B[i+h, j+h]`` with ``A``, ``B`` the Gram
    matrices of the centered curves.
    """
    _check_pair(x, y)
    n = x.n
    w = x.grid.weights
    a = _gram_values(_centered(x), w)
    b = _gram_values(_centered(y), w)
    if h >= 0:
        raw = backend.shifted_product_sum(a, b, h, h)
    else:
        raw = backend.shifted_product_sum(b, a, -h, -h)
    return raw / (n * n)


def integrated_autocov(x: FunctionalSample, lag: int) -> float:
    """Integral of the lag-``lag`` autocovariance surface along its diagonal.

    Equals ``(1/n) sum_i <xc_i, xc_{i+|lag|}>`` and is even in the lag by
    construction; lags at or beyond ``n`` return 0.
    """
    n = x.n
    lag = abs(int(lag))
    if lag >= n:
        return 0.0
    a = _gram_values(_centered(x), x.grid.weights)
    return float(backend.diag_band_sums(a, lag)[lag]) / n


def gram_of_autocov_surfaces(x: FunctionalSample, lag_bound: int) -> np.ndarray:
    """Overlap matrix of autocovariance surfaces across lag pairs.

    Entry ``(l + L, l' + L)`` is the double integral of the product of the
    lag-``l`` and lag-``l'`` autocovariance surfaces, for ``l, l'`` in
    ``[-L, L]``.  Contracted through the curve Gram matrix in O(n^2) per
    pair; surfaces are never materialized.  Lags beyond ``n - 1`` give zero
    rows.
    """
    if lag_bound < 0:
        raise ValueError("lag bound must be nonnegative")
    n = x.n
    a = _gram_values(_centered(x), x.grid.weights)
    size = 2 * lag_bound + 1
    out = np.zeros((size, size))
    # (l, l') -> (l', l) and (l, l') -> (-l, -l') are exact symmetries of
    # the defining sum; compute one wedge and mirror.
    for l in range(0, min(lag_bound, n - 1) + 1):
        for lp in range(-min(lag_bound, n - 1), min(lag_bound, n - 1) + 1):
            if lp < -l or (lp >= 0 and lp > l):
                continue
            v = backend.shifted_product_sum(a, a, l, lp) / (n * n)
            out[l + lag_bound, lp + lag_bound] = v
            out[lp + lag_bound, l + lag_bound] = v
            out[lag_bound - l, lag_bound - lp] = v
            out[lag_bound - lp, lag_bound - l] = v
    return out


def lag_overlap_full(gram: np.ndarray, n: int) -> np.ndarray:
    """All-lags overlap matrix via FFT autocorrelation of a Gram matrix.

    Returns the ``(2n-1) x (2n-1)`` array with entry ``(l + n-1, l' + n-1)``
    equal to ``(1/n^2) sum_{i,j} G[i, j] G[i+l, j+l']``, i.e. the full-range
    version of :func:`gram_of_autocov_surfaces` for precomputed ``G``.
    """
    size = 2 * n - 1
    p = scipy.fft.next_fast_len(size, real=True)
    f = scipy.fft.rfft2(gram, s=(p, p))
    # |F|^2 in place: re <- re^2 + im^2, im <- 0
    re, im = f.real, f.imag
    re *= re
    im *= im
    re += im
    im[:] = 0.0
    c = scipy.fft.irfft2(f, s=(p, p))
    # reassemble so lag l sits at index l + n - 1 (negative lags wrap)
    out = np.empty((size, size))
    neg = n - 1
    out[:neg, :neg] = c[p - neg :, p - neg :]
    out[:neg, neg:] = c[p - neg :, :n]
    out[neg:, :neg] = c[:n, p - neg :]
    out[neg:, neg:] = c[:n, :n]
    out /= n * n
    return out


def save_surface_csv(surface: CovSurface, path) -> None:
    """Write the ``m x m`` surface values as plain CSV rows."""
    with open(path, "w", encoding="utf-8") as fh:
        for row in surface.values:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
