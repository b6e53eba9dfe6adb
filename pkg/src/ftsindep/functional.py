"""Discrete substrate for curves on [0, 1]: grids, quadrature, inner
products, centering and Gram matrices.

Curves are stored densely as rows of an ``n x m`` array evaluated on a
shared grid; integrals are trapezoid quadrature sums, which are exact for
the piecewise-linear interpolants used throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch, InvalidGrid

__all__ = [
    "Grid",
    "FunctionalSample",
    "GramMatrix",
    "make_uniform_grid",
    "inner_product",
    "center",
    "gram_matrix",
    "sample_csv_text",
    "save_sample_csv",
    "load_sample_csv",
]


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=np.float64)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Grid:
    """Quadrature grid on [0, 1]: ordered points plus positive weights.

    The weights must integrate the constant function to the span of the
    points (checked to 1e-9), which trapezoid weights do by construction.
    """

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "points", _frozen(self.points))
        object.__setattr__(self, "weights", _frozen(self.weights))
        p, w = self.points, self.weights
        if p.ndim != 1 or p.size < 1 or w.shape != p.shape:
            raise InvalidGrid("points and weights must be 1-d arrays of equal length")
        if p.size > 1 and not np.all(np.diff(p) > 0):
            raise InvalidGrid("grid points must be strictly increasing")
        if p[0] < 0.0 or p[-1] > 1.0:
            raise InvalidGrid("grid points must lie in [0, 1]")
        if not np.all(w > 0):
            raise InvalidGrid("quadrature weights must be positive")
        if abs(w.sum() - (p[-1] - p[0])) > 1e-9:
            raise InvalidGrid("weights must sum to the span of the grid")

    @property
    def size(self) -> int:
        return self.points.size

    def same_as(self, other: "Grid") -> bool:
        return np.array_equal(self.points, other.points) and np.array_equal(
            self.weights, other.weights
        )


def make_uniform_grid(m: int) -> Grid:
    """Uniform grid of ``m`` points spanning [0, 1] with trapezoid weights.

    Raises
    ------
    InvalidGrid
        If ``m < 2``.
    """
    if m < 2:
        raise InvalidGrid(f"need at least 2 grid points, got {m}")
    points = np.linspace(0.0, 1.0, m)
    step = 1.0 / (m - 1)
    weights = np.full(m, step)
    weights[0] = weights[-1] = 0.5 * step
    return Grid(points, weights)


@dataclass(frozen=True, eq=False)
class FunctionalSample:
    """``n`` curves evaluated on a shared grid of ``m`` points.

    ``values[i, j]`` is curve ``i`` at grid point ``j``. Instances are
    immutable after construction and safe to share between workers.
    """

    values: np.ndarray
    grid: Grid

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.values, dtype=np.float64))
        object.__setattr__(self, "values", _frozen(v))
        if self.values.ndim != 2:
            raise ValueError("values must be a 2-d array (curves x grid points)")
        if self.values.shape[0] < 1:
            raise ValueError("sample must contain at least one curve")
        if self.values.shape[1] != self.grid.size:
            raise GridMismatch(
                f"curves have {self.values.shape[1]} points, grid has {self.grid.size}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("curve values must all be finite")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """Symmetric ``n x n`` matrix of pairwise curve inner products."""

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen(self.entries))

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def _require_same_grid(a: Grid, b: Grid) -> None:
    if not a.same_as(b):
        raise GridMismatch("operands live on different grids")


def inner_product(f: np.ndarray, g: np.ndarray, grid: Grid) -> float:
    """Quadrature inner product ``sum_j w_j f_j g_j`` of two curves."""
    f = np.asarray(f, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if f.shape != (grid.size,) or g.shape != (grid.size,):
        raise GridMismatch("curves do not match the grid length")
    return float(np.dot(grid.weights, f * g))


def center(sample: FunctionalSample) -> FunctionalSample:
    """Subtract the pointwise sample mean curve from every curve."""
    mean = sample.values.mean(axis=0)
    return FunctionalSample(sample.values - mean, sample.grid)


def _gram_values(values: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Raw Gram matrix of the rows of ``values`` under quadrature weights."""
    return (values * weights) @ values.T


def gram_matrix(sample: FunctionalSample) -> GramMatrix:
    """Gram matrix ``G[i, j] = <curve_i, curve_j>`` of a sample."""
    g = _gram_values(sample.values, sample.grid.weights)
    # dgemm output is symmetric only to rounding; make it exact
    return GramMatrix(0.5 * (g + g.T))


def sample_csv_text(sample: FunctionalSample) -> str:
    """CSV form of a sample: a ``#grid`` coordinate row, then one row per
    curve.  Floats carry 17 significant digits so the text round-trips."""
    lines = ["#grid," + ",".join(f"{t:.17g}" for t in sample.grid.points)]
    for row in sample.values:
        lines.append(",".join(f"{v:.17g}" for v in row))
    return "\n".join(lines) + "\n"


def save_sample_csv(sample: FunctionalSample, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(sample_csv_text(sample))


def load_sample_csv(path) -> FunctionalSample:
    """Read a sample written by :func:`save_sample_csv`.

    Files without a ``#grid`` header are placed on the uniform grid with as
    many points as there are columns.
    """
    rows: list[list[float]] = []
    grid: Grid | None = None
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#grid"):
                coords = [float(tok) for tok in line.split(",")[1:]]
                pts = np.asarray(coords)
                grid = Grid(pts, _trapezoid_weights(pts))
                continue
            rows.append([float(tok) for tok in line.split(",")])
    if not rows:
        raise ValueError(f"no curves found in {path}")
    values = np.asarray(rows)
    if grid is None:
        grid = make_uniform_grid(values.shape[1])
    return FunctionalSample(values, grid)


def _trapezoid_weights(points: np.ndarray) -> np.ndarray:
    if points.size < 2:
        raise InvalidGrid("need at least 2 grid points")
    d = np.diff(points)
    w = np.empty(points.size)
    w[0] = 0.5 * d[0]
    w[-1] = 0.5 * d[-1]
    w[1:-1] = 0.5 * (d[:-1] + d[1:])
    return w
