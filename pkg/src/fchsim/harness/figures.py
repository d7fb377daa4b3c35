"""Matplotlib renderings written next to the delimited outputs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from ..grid import CellField

__all__ = ["save_field_png", "save_series_png", "save_residual_png", "save_cauchy_png"]


def save_field_png(phi: CellField, path, title: str | None = None) -> None:
    fig, ax = plt.subplots(figsize=(5.0, 4.2))
    im = ax.imshow(
        phi.values.T,
        origin="lower",
        extent=[0, phi.grid.L, 0, phi.grid.L],
        cmap="RdBu_r",
        interpolation="nearest",
    )
    fig.colorbar(im, ax=ax, label="phi")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(Path(path), dpi=150)
    plt.close(fig)


def save_series_png(rows, path) -> None:
    """Energy decay and mass drift side by side."""
    times = np.array([r.time for r in rows])
    energy = np.array([r.energy for r in rows])
    mass = np.array([r.mass for r in rows])
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 3.6))
    ax1.plot(times, energy, "-", lw=1.2)
    ax1.set_xlabel("time")
    ax1.set_ylabel("energy")
    ax1.set_title("energy decay")
    ax2.plot(times, mass - mass[0], "-", lw=1.2)
    ax2.set_xlabel("time")
    ax2.set_ylabel("mass - mass(0)")
    ax2.set_title("mass drift")
    ax2.ticklabel_format(axis="y", style="sci", scilimits=(-2, 2))
    fig.tight_layout()
    fig.savefig(Path(path), dpi=150)
    plt.close(fig)


def save_residual_png(traces: dict, path) -> None:
    """Semi-log residual traces per grid size for one solver call."""
    fig, ax = plt.subplots(figsize=(5.4, 4.0))
    for m in sorted(traces):
        hist = traces[m]
        ax.semilogy(range(len(hist)), hist, "o-", ms=3, lw=1.0, label=f"m={m}")
    ax.set_xlabel("iteration")
    ax.set_ylabel("residual sup norm")
    ax.set_title("descent solver residual decay")
    ax.legend()
    fig.tight_layout()
    fig.savefig(Path(path), dpi=150)
    plt.close(fig)


def save_cauchy_png(rows, path) -> None:
    """Cauchy-difference norms against fine-grid spacing, with an h^2 guide."""
    hs = np.array([row.m_fine for row in rows], dtype=float)
    hs = 1.0 / hs
    norms = np.array([row.norm for row in rows])
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    ax.loglog(hs, norms, "o-", label="Cauchy difference")
    guide = norms[0] * (hs / hs[0]) ** 2
    ax.loglog(hs, guide, "k--", lw=0.9, label="order 2")
    ax.set_xlabel("1 / m (fine level)")
    ax.set_ylabel("difference 2-norm")
    ax.legend()
    fig.tight_layout()
    fig.savefig(Path(path), dpi=150)
    plt.close(fig)
