"""Discrete periodic function spaces and staggered difference operators.

A square domain (0, L)^2 is covered by an m-by-m uniform mesh with spacing
h = L / m.  Cell-centered values live at ((i + 1/2) h, (j + 1/2) h) for
0-based indices, vertex-centered values at the cell corner shared by cells
(i, j) and (i+1, j+1), and edge-centered values at the east-west / north-south
face midpoints.  Periodicity is implicit: every operator indexes modulo m,
with no ghost layers.

The operators are the four-point staggered gradient ``grad_v`` and its
adjoint divergence ``div_v``, the standard 5-point and diagonal (skew)
Laplacians, 4-point transfer averages between centers and vertices, the
4-Laplacian, a variable-mobility divergence form, and the h^2-weighted inner
products and norms built on them.  Public functions take and return field
wrappers; the ``_*`` array kernels underneath are shared with the solver hot
loops.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GridSpec",
    "CellField",
    "VertexField",
    "EdgeFieldEW",
    "EdgeFieldNS",
    "cell_centers",
    "grad_v",
    "div_v",
    "laplacian",
    "laplacian_skew",
    "avg_v2c",
    "avg_c2v",
    "p_laplacian_4",
    "mobility_div",
    "inner_cell",
    "inner_vertex",
    "inner_edge_ew",
    "inner_edge_ns",
    "norm",
    "grad_norm",
    "grad_norm_4",
    "mean",
    "diff_x_edge",
    "diff_y_edge",
    "edge_grad_norm_sq",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic m-by-m mesh on (0, L)^2 with spacing h = L / m."""

    m: int
    L: float

    def __post_init__(self) -> None:
        if self.m < 4:
            raise ValueError(f"need m >= 4 for the staggered stencils, got m={self.m}")
        if self.m % 2 != 0:
            raise ValueError(f"m must be even for the periodic transforms, got m={self.m}")
        if not (self.L > 0.0) or not math.isfinite(self.L):
            raise ValueError(f"domain side must be positive and finite, got L={self.L}")

    @property
    def h(self) -> float:
        return self.L / self.m


def _as_field_values(grid: GridSpec, values, what: str) -> np.ndarray:
    a = np.ascontiguousarray(values, dtype=np.float64)
    if a.shape != (grid.m, grid.m):
        raise ValueError(f"{what} values must have shape {(grid.m, grid.m)}, got {a.shape}")
    if not np.isfinite(a).all():
        raise ValueError(f"{what} contains non-finite entries")
    return a


@dataclass(frozen=True, eq=False)
class CellField:
    """Cell-centered scalar field; values[i, j] sits at ((i+1/2) h, (j+1/2) h)."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _as_field_values(self.grid, self.values, "CellField"))

    def copy(self) -> "CellField":
        return CellField(self.grid, self.values.copy())

    @staticmethod
    def zeros(grid: GridSpec) -> "CellField":
        return CellField(grid, np.zeros((grid.m, grid.m)))

    @staticmethod
    def full(grid: GridSpec, value: float) -> "CellField":
        return CellField(grid, np.full((grid.m, grid.m), float(value)))


@dataclass(frozen=True, eq=False)
class VertexField:
    """Vertex-centered scalar field; values[i, j] sits at the NE corner of cell (i, j)."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _as_field_values(self.grid, self.values, "VertexField"))

    def copy(self) -> "VertexField":
        return VertexField(self.grid, self.values.copy())


@dataclass(frozen=True, eq=False)
class EdgeFieldEW:
    """East-west edge field; values[i, j] sits at ((i+1) h, (j+1/2) h)."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _as_field_values(self.grid, self.values, "EdgeFieldEW"))


@dataclass(frozen=True, eq=False)
class EdgeFieldNS:
    """North-south edge field; values[i, j] sits at ((i+1/2) h, (j+1) h)."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _as_field_values(self.grid, self.values, "EdgeFieldNS"))


def cell_centers(grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    """Coordinate arrays (x, y) of the cell centers, indexed like field values."""
    c = (np.arange(grid.m) + 0.5) * grid.h
    return np.meshgrid(c, c, indexing="ij")


def _same_grid(a, b) -> None:
    if a.grid != b.grid:
        raise ValueError(f"fields live on different grids: {a.grid} vs {b.grid}")


# ---------------------------------------------------------------------------
# Array kernels (periodic shifts via np.roll).  x is axis 0, y is axis 1.
# ---------------------------------------------------------------------------

def _xp(a: np.ndarray) -> np.ndarray:
    return np.roll(a, -1, axis=0)


def _xm(a: np.ndarray) -> np.ndarray:
    return np.roll(a, 1, axis=0)


def _yp(a: np.ndarray) -> np.ndarray:
    return np.roll(a, -1, axis=1)


def _ym(a: np.ndarray) -> np.ndarray:
    return np.roll(a, 1, axis=1)


def _grad_v(a: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    """Four-point centered x/y differences from cell centers to vertices."""
    xp = _xp(a)
    yp = _yp(a)
    xpyp = _yp(xp)
    dx = (xpyp - yp + xp - a) / (2.0 * h)
    dy = (xpyp - xp + yp - a) / (2.0 * h)
    return dx, dy


def _div_v(p: np.ndarray, q: np.ndarray, h: float) -> np.ndarray:
    """Adjoint four-point divergence from vertex vector fields to cell centers."""
    pxm = _xm(p)
    dxp = p - pxm + _ym(p) - _ym(pxm)
    qym = _ym(q)
    dyq = q - qym + _xm(q) - _xm(qym)
    return (dxp + dyq) / (2.0 * h)


def _laplacian(a: np.ndarray, h: float) -> np.ndarray:
    return (_xp(a) + _xm(a) + _yp(a) + _ym(a) - 4.0 * a) / (h * h)


def _laplacian_skew(a: np.ndarray, h: float) -> np.ndarray:
    yp = _yp(a)
    ym = _ym(a)
    return (_xp(yp) + _xm(yp) + _xp(ym) + _xm(ym) - 4.0 * a) / (2.0 * h * h)


def _avg_v2c(v: np.ndarray) -> np.ndarray:
    vym = _ym(v)
    return 0.25 * (v + _xm(v) + vym + _xm(vym))


def _avg_c2v(a: np.ndarray) -> np.ndarray:
    xp = _xp(a)
    return 0.25 * (a + xp + _yp(a) + _yp(xp))


def _p_laplacian_4(a: np.ndarray, h: float) -> np.ndarray:
    dx, dy = _grad_v(a, h)
    r = dx * dx + dy * dy
    return _div_v(r * dx, r * dy, h)


def _mobility_div(mob: np.ndarray, a: np.ndarray, h: float) -> np.ndarray:
    mv = _avg_c2v(mob)
    dx, dy = _grad_v(a, h)
    return _div_v(mv * dx, mv * dy, h)


def _sum(a: np.ndarray) -> float:
    # Pairwise accumulation in the widest native float keeps reduction noise
    # far below the smallest Cauchy differences measured by the harness.
    return float(np.sum(a, dtype=np.longdouble))


def _grad_sq(a: np.ndarray, h: float) -> np.ndarray:
    dx, dy = _grad_v(a, h)
    return dx * dx + dy * dy


# ---------------------------------------------------------------------------
# Public operators
# ---------------------------------------------------------------------------

def grad_v(phi: CellField) -> tuple[VertexField, VertexField]:
    """Staggered gradient of a cell field, collocated at vertices."""
    dx, dy = _grad_v(phi.values, phi.grid.h)
    return VertexField(phi.grid, dx), VertexField(phi.grid, dy)


def div_v(p: VertexField, q: VertexField) -> CellField:
    """Divergence of a vertex vector field back to cell centers (mean-free)."""
    _same_grid(p, q)
    return CellField(p.grid, _div_v(p.values, q.values, p.grid.h))


def laplacian(phi: CellField) -> CellField:
    """Standard 5-point Laplacian."""
    return CellField(phi.grid, _laplacian(phi.values, phi.grid.h))


def laplacian_skew(phi: CellField) -> CellField:
    """Diagonal-stencil Laplacian, the composition div_v(grad_v(phi))."""
    return CellField(phi.grid, _laplacian_skew(phi.values, phi.grid.h))


def avg_v2c(v: VertexField) -> CellField:
    """Four-point vertex-to-center average."""
    return CellField(v.grid, _avg_v2c(v.values))


def avg_c2v(phi: CellField) -> VertexField:
    """Four-point center-to-vertex average."""
    return VertexField(phi.grid, _avg_c2v(phi.values))


def p_laplacian_4(phi: CellField) -> CellField:
    """4-Laplacian: divergence of |grad phi|^2 grad phi on the staggered grid."""
    return CellField(phi.grid, _p_laplacian_4(phi.values, phi.grid.h))


def mobility_div(mob: CellField, phi: CellField) -> CellField:
    """Divergence form div(M grad phi) with vertex-averaged mobility M > 0."""
    _same_grid(mob, phi)
    if np.any(mob.values <= 0.0):
        raise ValueError("mobility must be positive everywhere")
    return CellField(phi.grid, _mobility_div(mob.values, phi.values, phi.grid.h))


def inner_cell(u: CellField, v: CellField) -> float:
    """h^2-weighted grid inner product of two cell fields."""
    _same_grid(u, v)
    h = u.grid.h
    return h * h * _sum(u.values * v.values)


def inner_vertex(u: VertexField, v: VertexField) -> float:
    """h^2-weighted grid inner product of two vertex fields."""
    _same_grid(u, v)
    h = u.grid.h
    return h * h * _sum(u.values * v.values)


def inner_edge_ew(u: EdgeFieldEW, v: EdgeFieldEW) -> float:
    _same_grid(u, v)
    h = u.grid.h
    return h * h * _sum(u.values * v.values)


def inner_edge_ns(u: EdgeFieldNS, v: EdgeFieldNS) -> float:
    _same_grid(u, v)
    h = u.grid.h
    return h * h * _sum(u.values * v.values)


_NORM_POWERS = (1, 2, 4, 6)


def norm(phi: CellField, p) -> float:
    """Grid p-norm of a cell field, p in {1, 2, 4, 6, inf}."""
    if p == math.inf:
        return float(np.max(np.abs(phi.values)))
    if p not in _NORM_POWERS:
        raise ValueError(f"unsupported norm order p={p}; use one of {_NORM_POWERS} or inf")
    h = phi.grid.h
    return (h * h * _sum(np.abs(phi.values) ** p)) ** (1.0 / p)


def grad_norm(phi: CellField, p: int) -> float:
    """Staggered-gradient p-norm, p in {2, 4}: (h^2 sum |grad phi|^p)^(1/p)."""
    if p not in (2, 4):
        raise ValueError(f"unsupported gradient norm order p={p}; use 2 or 4")
    g2 = _grad_sq(phi.values, phi.grid.h)
    h = phi.grid.h
    if p == 2:
        return math.sqrt(h * h * _sum(g2))
    return (h * h * _sum(g2 * g2)) ** 0.25


def grad_norm_4(phi: CellField) -> float:
    return grad_norm(phi, 4)


def mean(phi: CellField) -> float:
    """Domain-normalized average, h^2 sum / L^2 = sum / m^2."""
    return _sum(phi.values) / (phi.grid.m * phi.grid.m)


# ---------------------------------------------------------------------------
# Plain edge differences/averages.  The edge inner products above together
# with these are diagnostic machinery (adjointness checks for the 5-point
# Laplacian); the time stepping itself never touches edge fields.
# ---------------------------------------------------------------------------

def diff_x_edge(phi: CellField) -> EdgeFieldEW:
    """Two-point x-difference from cell centers onto east-west edges."""
    a = phi.values
    return EdgeFieldEW(phi.grid, (_xp(a) - a) / phi.grid.h)


def diff_y_edge(phi: CellField) -> EdgeFieldNS:
    """Two-point y-difference from cell centers onto north-south edges."""
    a = phi.values
    return EdgeFieldNS(phi.grid, (_yp(a) - a) / phi.grid.h)


def edge_grad_norm_sq(phi: CellField) -> float:
    """Squared edge-gradient norm paired with the 5-point Laplacian."""
    dx = diff_x_edge(phi)
    dy = diff_y_edge(phi)
    return inner_edge_ew(dx, dx) + inner_edge_ns(dy, dy)
