"""Fast periodic constant-coefficient solves.

The 5-point Laplacian is diagonal in the discrete Fourier basis, with
eigenvalues of -lap given by

    lam(k, l) = (4 / h^2) (sin^2(pi k / m) + sin^2(pi l / m)).

A :class:`SpectralPlan` precomputes these once per grid and backs three
solves used everywhere else:

* ``inv_neg_laplacian`` -- the zero-mean inverse of the negative Laplacian,
* ``hm1_inner`` / ``hm1_norm`` -- the discrete H^-1 inner product and norm
  on mean-zero fields,
* ``precond_solve`` -- the descent preconditioner, a positive combination of
  the inverse Laplacian, identity, Laplacian and biharmonic terms whose
  symbol is

      sigma(lam) = 1/lam + s c0 + s c1 lam + s eps^2 lam^2,
      c0 = 4 eps^-2 + eta + 4 A + 6,   c1 = 6 + 4 A.

Inputs are projected to exact zero mean in transform space (mode (0, 0) is
zeroed) so roundoff drift from long runs never aborts a solve; a grossly
nonzero mean still raises, since that signals a programming error upstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

from .grid import CellField, GridSpec, inner_cell

__all__ = ["SpectralPlan", "inv_neg_laplacian", "hm1_inner", "hm1_norm", "precond_solve"]

# A mean this large (relative to the sup norm) cannot be roundoff drift.
MEAN_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class SpectralPlan:
    """Precomputed eigenvalues and transform workspace for one grid.

    ``eig`` holds the full m-by-m symbol of -lap; the half-spectrum views
    used by the real transforms are derived from it.  Instances are immutable
    and shareable; the preconditioner symbol is memoized per parameter set.
    """

    grid: GridSpec
    eig: np.ndarray
    _inv_eig_r: np.ndarray
    _precond_cache: dict = field(default_factory=dict)

    @staticmethod
    def create(grid: GridSpec) -> "SpectralPlan":
        m, h = grid.m, grid.h
        s2 = np.sin(np.pi * np.arange(m) / m) ** 2
        eig = (4.0 / (h * h)) * (s2[:, None] + s2[None, :])
        eig_r = eig[:, : m // 2 + 1].copy()
        inv_eig_r = np.zeros_like(eig_r)
        inv_eig_r[eig_r > 0.0] = 1.0 / eig_r[eig_r > 0.0]
        return SpectralPlan(grid, eig, inv_eig_r)

    def _check_mean_zero(self, zeta: np.ndarray, what: str) -> None:
        scale = float(np.max(np.abs(zeta)))
        if scale == 0.0:
            return
        m = zeta.shape[0]
        if abs(float(zeta.sum()) / (m * m)) > MEAN_TOL * scale:
            raise ValueError(f"{what} requires a mean-zero field; got a grossly nonzero mean")

    def _solve_symbol(self, zeta: np.ndarray, inv_symbol: np.ndarray) -> np.ndarray:
        zhat = sfft.rfft2(zeta)
        zhat *= inv_symbol
        # m is even, so the default inverse length 2*(m//2 + 1 - 1) is exact.
        return sfft.irfft2(zhat)

    def _inv_precond_symbol(self, params) -> np.ndarray:
        key = (params.eps, params.eta, params.A, params.s)
        cached = self._precond_cache.get(key)
        if cached is not None:
            return cached
        inv_sigma = _inverse_precond_symbol(
            self.eig[:, : self.grid.m // 2 + 1], params.eps, params.eta, params.A, params.s
        )
        self._precond_cache[key] = inv_sigma
        return inv_sigma


def _inverse_precond_symbol(eig_r: np.ndarray, eps: float, eta: float, A: float, s: float) -> np.ndarray:
    c0 = 4.0 / (eps * eps) + eta + 4.0 * A + 6.0
    c1 = 6.0 + 4.0 * A
    nz = eig_r > 0.0
    sigma = np.zeros_like(eig_r)
    lam = eig_r[nz]
    sigma[nz] = 1.0 / lam + s * (c0 + c1 * lam + (eps * eps) * lam * lam)
    if np.any(sigma[nz] <= 0.0):
        raise ValueError(
            "preconditioner symbol is not positive definite for "
            f"eps={eps}, eta={eta}, A={A}, s={s}"
        )
    inv_sigma = np.zeros_like(eig_r)
    inv_sigma[nz] = 1.0 / sigma[nz]
    return inv_sigma


# Array-level entry points shared with the solver loop.

def _inv_neg_laplacian(plan: SpectralPlan, zeta: np.ndarray) -> np.ndarray:
    return plan._solve_symbol(zeta, plan._inv_eig_r)


def _precond_solve(plan: SpectralPlan, r: np.ndarray, params) -> np.ndarray:
    return plan._solve_symbol(r, plan._inv_precond_symbol(params))


def _precond_and_inv_lap(plan: SpectralPlan, r: np.ndarray, params) -> tuple[np.ndarray, np.ndarray]:
    """Return (d, inv_neg_laplacian(d)) for L d = r from one forward transform.

    The second field is just d with an extra 1/lam in transform space, so
    both inverse transforms run as a single batched call.
    """
    rhat = sfft.rfft2(r)
    rhat *= plan._inv_precond_symbol(params)
    d = sfft.irfft2(rhat, overwrite_x=False)
    rhat *= plan._inv_eig_r
    td = sfft.irfft2(rhat)
    return d, td


def inv_neg_laplacian(plan: SpectralPlan, zeta: CellField) -> CellField:
    """Solve -lap psi = zeta for the unique mean-zero psi."""
    if zeta.grid != plan.grid:
        raise ValueError("field grid does not match the spectral plan")
    plan._check_mean_zero(zeta.values, "inv_neg_laplacian")
    return CellField(plan.grid, _inv_neg_laplacian(plan, zeta.values))


def hm1_inner(plan: SpectralPlan, zeta: CellField, xi: CellField) -> float:
    """Discrete H^-1 inner product <zeta, inv_neg_laplacian(xi)> on mean-zero fields."""
    plan._check_mean_zero(zeta.values, "hm1_inner")
    return inner_cell(zeta, inv_neg_laplacian(plan, xi))


def hm1_norm(plan: SpectralPlan, zeta: CellField) -> float:
    value = hm1_inner(plan, zeta, zeta)
    return math.sqrt(max(value, 0.0))


def precond_solve(plan: SpectralPlan, r: CellField, params) -> CellField:
    """Apply the inverse preconditioner to a mean-zero residual field."""
    if r.grid != plan.grid:
        raise ValueError("field grid does not match the spectral plan")
    plan._check_mean_zero(r.values, "precond_solve")
    return CellField(plan.grid, _precond_solve(plan, r.values, params))
