"""Grid-refinement self-convergence study on the quadratic path s = C h^2.

Without an exact solution the error proxy is the Cauchy difference between
adjacent refinement levels: the coarse solution is lifted to the fine grid
with periodic bilinear interpolation and subtracted from the fine solution
at the same final time.  On the quadratic path the difference contracts at
second order in h.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..energy import ModelParams
from ..grid import CellField, GridSpec, norm
from ..poisson import SpectralPlan
from ..psd import PsdConfig
from ..scheme import Hooks, run
from .initial import init_benchmark

__all__ = ["prolong_bilinear", "cauchy_study", "CauchyRow", "rates_from_norms"]


def prolong_bilinear(coarse: CellField) -> CellField:
    """Periodic bilinear interpolation from a coarse cell-centered field to
    the twice-refined grid.

    Fine centers interleave coarse centers at offsets of a quarter coarse
    cell, so each 1D pass mixes nearest coarse neighbors with weights
    3/4 and 1/4; constants and locally affine data are reproduced exactly.
    """
    mc = coarse.grid.m
    fine_grid = GridSpec(2 * mc, coarse.grid.L)
    c = coarse.values
    tmp = np.empty((2 * mc, mc))
    tmp[0::2, :] = 0.25 * np.roll(c, 1, axis=0) + 0.75 * c
    tmp[1::2, :] = 0.75 * c + 0.25 * np.roll(c, -1, axis=0)
    out = np.empty((2 * mc, 2 * mc))
    out[:, 0::2] = 0.25 * np.roll(tmp, 1, axis=1) + 0.75 * tmp
    out[:, 1::2] = 0.75 * tmp + 0.25 * np.roll(tmp, -1, axis=1)
    return CellField(fine_grid, out)


def rates_from_norms(norms: Sequence[float]) -> list[float]:
    """log2 ratios of successive Cauchy norms; exactly 2.0 for a sequence
    contracting by 4 per level."""
    return [float(np.log2(a / b)) for a, b in zip(norms, norms[1:])]


@dataclass
class CauchyRow:
    m_coarse: int
    m_fine: int
    norm: float
    rate: float | None
    avg_iters_fine: float
    seconds_per_step_fine: float


def cauchy_study(
    levels: Sequence[int],
    C: float,
    L: float,
    eps: float,
    eta: float,
    A: float,
    T: float,
    solver_cfg: PsdConfig | None = None,
    init: Callable[[GridSpec], CellField] = init_benchmark,
    progress: Callable[[str], None] | None = None,
) -> list[CauchyRow]:
    """Run every level to time T with s = C h^2 and pair adjacent levels.

    Each level's step count is round(T / (C h^2)) with s = T / n, so all
    levels land on the same final time exactly.  Returns one row per
    adjacent pair with the fine-grid h^2-weighted 2-norm of the Cauchy
    difference and the observed rate relative to the previous pair.
    """
    levels = list(levels)
    if len(levels) < 2:
        raise ValueError("need at least two refinement levels")
    for mc, mf in zip(levels, levels[1:]):
        if mf != 2 * mc:
            raise ValueError(f"levels must double: got {mc} -> {mf}")
    cfg = solver_cfg or PsdConfig()

    fields: list[CellField] = []
    iters: list[float] = []
    secs: list[float] = []
    for m in levels:
        grid = GridSpec(m, L)
        h = grid.h
        n_steps = int(round(T / (C * h * h)))
        if n_steps < 1:
            raise ValueError(f"final time {T} shorter than one step at m={m}")
        s = T / n_steps
        params = ModelParams(eps=eps, eta=eta, A=A, s=s, grid=grid)
        assert abs(n_steps * s - T) <= 1e-12 * max(1.0, T)
        plan = SpectralPlan.create(grid)
        t0 = time.perf_counter()
        summary = run(init(grid), n_steps, params, plan, cfg, Hooks(series_every=0))
        elapsed = time.perf_counter() - t0
        fields.append(summary.phi)
        iters.append(summary.psd_iters_total / n_steps)
        secs.append(elapsed / n_steps)
        if progress is not None:
            progress(
                f"level m={m}: {n_steps} steps, avg {iters[-1]:.1f} iters/step, "
                f"{elapsed:.1f} s"
            )

    norms = []
    for coarse, fine in zip(fields, fields[1:]):
        delta = fine.values - prolong_bilinear(coarse).values
        norms.append(norm(CellField(fine.grid, delta), 2))
    rates = [None] + rates_from_norms(norms)
    return [
        CauchyRow(mc, mf, nv, rv, it, sc)
        for mc, mf, nv, rv, it, sc in zip(
            levels, levels[1:], norms, rates, iters[1:], secs[1:]
        )
    ]
