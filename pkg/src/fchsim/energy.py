"""Discrete free energy of the functionalized Cahn-Hilliard model.

The energy splits into a difference of two strictly convex parts,

    F = F_c - F_e,

once the auxiliary terms A (phi^4 + |grad phi|^4) are added to both sides so
the indefinite cross term 3 phi^2 |grad phi|^2 joins a convex combination
(this requires A >= 1).  On the staggered grid,

    F_c = eps^-2/2 ||phi||_6^6 + (eps^-2/2 + eta/2) ||phi||_2^2
          + eps^2/2 ||lap phi||_2^2 + H,
    H   = A ||phi||_4^4 + A ||grad phi||_4^4 + 3 <phi^2, avg(|grad phi|^2)>,
    F_e = (eps^-2 + eta/4) ||phi||_4^4 + (1 + eta eps^2/2) ||grad phi||_2^2
          + A ||phi||_4^4 + A ||grad phi||_4^4,

with the gradient norms taken over vertices and ``avg`` the vertex-to-center
average.  This module provides the split, the variational derivatives of H
and of the convex/concave parts, the explicit source ``assemble_f`` built
from the previous iterate, and the per-step descent objective

    E[phi] = 1/2 ||phi - g||_{-1}^2 + s F_c(phi) - s <f, phi>_2

whose variation in a mean-zero direction d is <N[phi] - s f, d>_2, where N
is the nonlinear step operator assembled in :mod:`fchsim.scheme`.  Note the
factor s on f: the objective above is s times the backward-Euler increment
functional, so the source enters the gradient s-scaled.

Sign convention: ``assemble_f`` returns the negated concave-part gradient
(constant fields c map to -(4 eps^-2 + eta + 4A) c^3).  The time stepper
feeds the solver ``-assemble_f``, i.e. the concave-part gradient itself;
both ``scheme_energy`` and ``dir_deriv`` take whatever source field they are
given and are consistent with each other for any f.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _accel
from .grid import (
    CellField,
    GridSpec,
    _avg_c2v,
    _avg_v2c,
    _div_v,
    _grad_v,
    _laplacian,
    _laplacian_skew,
    _p_laplacian_4,
    _sum,
)
from .poisson import SpectralPlan, _inv_neg_laplacian

__all__ = ["ModelParams", "EnergySplit", "energy_split", "delta_H", "assemble_f", "scheme_energy", "dir_deriv"]


@dataclass(frozen=True)
class ModelParams:
    """Physical and scheme constants: interface width eps, model parameter
    eta (negative values select the Willmore variant), convexification
    constant A >= 1, time step s, and the grid."""

    eps: float
    eta: float
    A: float
    s: float
    grid: GridSpec

    def __post_init__(self) -> None:
        if not (self.eps > 0.0 and math.isfinite(self.eps)):
            raise ValueError(f"eps must be positive, got {self.eps}")
        if not (self.s > 0.0 and math.isfinite(self.s)):
            raise ValueError(f"time step s must be positive, got {self.s}")
        if not (self.A >= 1.0):
            raise ValueError(f"convex splitting needs A >= 1, got A={self.A}")
        if not (1.0 + self.eta * self.eps * self.eps / 2.0 > 0.0):
            raise ValueError(
                f"eta={self.eta} is outside the supported range: need 1 + eta*eps^2/2 > 0"
            )


class EnergySplit(NamedTuple):
    total: float
    convex: float
    concave: float


def _mean_mismatch(phi: np.ndarray, g: np.ndarray, what: str) -> None:
    gap = abs(float(phi.mean()) - float(g.mean()))
    if gap > 1e-8 * (1.0 + float(np.max(np.abs(g)))):
        raise ValueError(f"{what}: phi and g have different means (gap {gap:.3e})")


def _mean_nonzero(d: np.ndarray, what: str) -> None:
    if abs(float(d.mean())) > 1e-8 * (1.0 + float(np.max(np.abs(d)))):
        raise ValueError(f"{what}: direction must have zero mean")


def _hh(a: np.ndarray, h: float, A: float) -> float:
    """Convexified cross-term energy H (cell + vertex h^2 sums)."""
    dx, dy = _grad_v(a, h)
    p = dx * dx + dy * dy
    a2 = a * a
    quart = _sum(a2 * a2)
    grad4 = _sum(p * p)
    cross = _sum(a2 * _avg_v2c(p))
    return h * h * (A * quart + A * grad4 + 3.0 * cross)


def _convex_part(a: np.ndarray, h: float, eps: float, eta: float, A: float) -> float:
    em2 = 1.0 / (eps * eps)
    a2 = a * a
    lap = _laplacian(a, h)
    return h * h * (
        0.5 * em2 * _sum(a2 * a2 * a2)
        + 0.5 * (em2 + eta) * _sum(a2)
        + 0.5 * eps * eps * _sum(lap * lap)
    ) + _hh(a, h, A)


def _concave_part(a: np.ndarray, h: float, eps: float, eta: float, A: float) -> float:
    em2 = 1.0 / (eps * eps)
    a2 = a * a
    dx, dy = _grad_v(a, h)
    p = dx * dx + dy * dy
    return h * h * (
        (em2 + 0.25 * eta + A) * _sum(a2 * a2)
        + (1.0 + 0.5 * eta * eps * eps) * _sum(p)
        + A * _sum(p * p)
    )


def energy_split(phi: CellField, params: ModelParams) -> EnergySplit:
    """Total discrete energy and its convex/concave parts (total = convex - concave)."""
    a = phi.values
    h = phi.grid.h
    fc = _convex_part(a, h, params.eps, params.eta, params.A)
    fe = _concave_part(a, h, params.eps, params.eta, params.A)
    return EnergySplit(fc - fe, fc, fe)


def delta_H(phi: CellField, params: ModelParams) -> CellField:
    """Variational derivative of the convexified cross-term energy H."""
    a = phi.values
    h = phi.grid.h
    A = params.A
    dx, dy = _grad_v(a, h)
    p = dx * dx + dy * dy
    av2 = _avg_c2v(a * a)
    a3 = a * a * a
    out = (
        4.0 * A * a3
        - 4.0 * A * _div_v(p * dx, p * dy, h)
        + 6.0 * a * _avg_v2c(p)
        - 6.0 * _div_v(av2 * dx, av2 * dy, h)
    )
    return CellField(phi.grid, out)


def _delta_fc_np(a: np.ndarray, h: float, eps: float, eta: float, A: float) -> np.ndarray:
    """Gradient of the convex part, composed from the grid kernels."""
    em2 = 1.0 / (eps * eps)
    lap = _laplacian(a, h)
    lap2 = _laplacian(lap, h)
    dx, dy = _grad_v(a, h)
    p = dx * dx + dy * dy
    av2 = _avg_c2v(a * a)
    a2 = a * a
    a3 = a2 * a
    a5 = a3 * a2
    return (
        3.0 * em2 * a5
        + 4.0 * A * a3
        + (em2 + eta) * a
        + eps * eps * lap2
        + 6.0 * a * _avg_v2c(p)
        - 6.0 * _div_v(av2 * dx, av2 * dy, h)
        - 4.0 * A * _div_v(p * dx, p * dy, h)
    )


def _delta_fc(a: np.ndarray, h: float, eps: float, eta: float, A: float, work=None, out=None) -> np.ndarray:
    if _accel.delta_fc is not None:
        return _accel.delta_fc(a, h, eps, eta, A, work, out)
    res = _delta_fc_np(a, h, eps, eta, A)
    if out is None:
        return res
    np.copyto(out, res)
    return out


def _delta_fe_np(a: np.ndarray, h: float, eps: float, eta: float, A: float) -> np.ndarray:
    """Gradient of the concave part, composed from the grid kernels."""
    em2 = 1.0 / (eps * eps)
    a3 = a * a * a
    return (
        (4.0 * em2 + eta + 4.0 * A) * a3
        - (2.0 + eta * eps * eps) * _laplacian_skew(a, h)
        - 4.0 * A * _p_laplacian_4(a, h)
    )


def _delta_fe(a: np.ndarray, h: float, eps: float, eta: float, A: float) -> np.ndarray:
    """Gradient of the concave part (treated explicitly by the scheme)."""
    if _accel.delta_fe is not None:
        return _accel.delta_fe(a, h, eps, eta, A)
    return _delta_fe_np(a, h, eps, eta, A)


def _stencil_work(m: int):
    """Scratch bundle for repeated gradient evaluations (None without numba)."""
    return _accel.StencilWork(m) if _accel.delta_fc is not None else None


def assemble_f(phi_k: CellField, params: ModelParams) -> CellField:
    """Explicit source built from the previous step (negated concave gradient):

        f = -(4 eps^-2 + eta) phi^3 + (2 + eta eps^2) lap_skew phi
            - 4 A phi^3 + 4 A plap4 phi.
    """
    a = phi_k.values
    return CellField(phi_k.grid, -_delta_fe(a, phi_k.grid.h, params.eps, params.eta, params.A))


def _n_apply(phi: np.ndarray, g: np.ndarray, params: ModelParams, plan: SpectralPlan) -> np.ndarray:
    """Nonlinear step operator: inv_neg_laplacian(phi - g) + s * delta F_c(phi)."""
    tpg = _inv_neg_laplacian(plan, phi - g)
    return tpg + params.s * _delta_fc(phi, params.grid.h, params.eps, params.eta, params.A)


def scheme_energy(
    phi: CellField, g: CellField, f: CellField, params: ModelParams, plan: SpectralPlan
) -> float:
    """Strictly convex per-step objective

        E[phi] = 1/2 ||phi - g||_{-1}^2 + s F_c(phi) - s <f, phi>_2,

    minimized over fields sharing the mean of g."""
    _mean_mismatch(phi.values, g.values, "scheme_energy")
    h = phi.grid.h
    diff = phi.values - g.values
    t = _inv_neg_laplacian(plan, diff)
    hm1_sq = h * h * _sum(diff * t)
    fc = _convex_part(phi.values, h, params.eps, params.eta, params.A)
    cross = h * h * _sum(f.values * phi.values)
    return 0.5 * hm1_sq + params.s * fc - params.s * cross


def dir_deriv(
    phi: CellField,
    d: CellField,
    g: CellField,
    f: CellField,
    params: ModelParams,
    plan: SpectralPlan,
) -> float:
    """Directional derivative of ``scheme_energy`` at phi along a mean-zero d."""
    _mean_mismatch(phi.values, g.values, "dir_deriv")
    _mean_nonzero(d.values, "dir_deriv")
    n = _n_apply(phi.values, g.values, params, plan)
    h = phi.grid.h
    return h * h * _sum((n - params.s * f.values) * d.values)
