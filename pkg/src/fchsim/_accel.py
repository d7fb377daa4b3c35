"""Optional fused stencil kernels for the solver hot path.

The descent solver evaluates the gradient of the convex energy part many
times per time step (once per residual and once per line-search probe).
When numba is available the whole stencil bundle runs as fused passes over
the grid, writing into caller-owned scratch (:class:`StencilWork`) so the
hot loop performs no heap allocation; otherwise ``delta_fc``/``delta_fe``
are ``None`` and callers fall back to the composed numpy operators, which
are the canonical definitions either way.  Both paths are checked against
each other in the test suite.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False


class StencilWork:
    """Per-grid scratch arrays; one instance per solve, never shared."""

    def __init__(self, m: int):
        self.lap = np.empty((m, m))
        self.dx = np.empty((m, m))
        self.dy = np.empty((m, m))
        self.p = np.empty((m, m))
        self.av2 = np.empty((m, m))


if HAVE_NUMBA:

    @njit(cache=True)
    def _lap5(a, h, out):
        m = a.shape[0]
        h2 = h * h
        for i in range(m):
            im = i - 1 if i > 0 else m - 1
            ip = i + 1 if i + 1 < m else 0
            for j in range(m):
                jm = j - 1 if j > 0 else m - 1
                jp = j + 1 if j + 1 < m else 0
                out[i, j] = (a[ip, j] + a[im, j] + a[i, jp] + a[i, jm] - 4.0 * a[i, j]) / h2

    @njit(cache=True)
    def _vertex_pack(phi, h, dx, dy, p, av2):
        # Per vertex: staggered gradient components, their squared magnitude,
        # and the center-to-vertex average of phi^2.
        m = phi.shape[0]
        twoh = 2.0 * h
        for i in range(m):
            ip = i + 1 if i + 1 < m else 0
            for j in range(m):
                jp = j + 1 if j + 1 < m else 0
                a00 = phi[i, j]
                a10 = phi[ip, j]
                a01 = phi[i, jp]
                a11 = phi[ip, jp]
                gx = (a11 - a01 + a10 - a00) / twoh
                gy = (a11 - a10 + a01 - a00) / twoh
                dx[i, j] = gx
                dy[i, j] = gy
                p[i, j] = gx * gx + gy * gy
                av2[i, j] = 0.25 * (a00 * a00 + a10 * a10 + a01 * a01 + a11 * a11)

    @njit(cache=True)
    def _assemble_convex_grad(phi, lap, dx, dy, p, av2, h, c5, c3, c1, eps2, a4, out):
        m = phi.shape[0]
        h2 = h * h
        twoh = 2.0 * h
        for i in range(m):
            im = i - 1 if i > 0 else m - 1
            ip = i + 1 if i + 1 < m else 0
            for j in range(m):
                jm = j - 1 if j > 0 else m - 1
                jp = j + 1 if j + 1 < m else 0
                lap2 = (lap[ip, j] + lap[im, j] + lap[i, jp] + lap[i, jm] - 4.0 * lap[i, j]) / h2
                avp = 0.25 * (p[i, j] + p[im, j] + p[i, jm] + p[im, jm])
                divw = (
                    av2[i, j] * dx[i, j]
                    - av2[im, j] * dx[im, j]
                    + av2[i, jm] * dx[i, jm]
                    - av2[im, jm] * dx[im, jm]
                    + av2[i, j] * dy[i, j]
                    - av2[i, jm] * dy[i, jm]
                    + av2[im, j] * dy[im, j]
                    - av2[im, jm] * dy[im, jm]
                ) / twoh
                divp = (
                    p[i, j] * dx[i, j]
                    - p[im, j] * dx[im, j]
                    + p[i, jm] * dx[i, jm]
                    - p[im, jm] * dx[im, jm]
                    + p[i, j] * dy[i, j]
                    - p[i, jm] * dy[i, jm]
                    + p[im, j] * dy[im, j]
                    - p[im, jm] * dy[im, jm]
                ) / twoh
                ph = phi[i, j]
                ph2 = ph * ph
                ph3 = ph2 * ph
                ph5 = ph3 * ph2
                out[i, j] = (
                    c5 * ph5
                    + c3 * ph3
                    + c1 * ph
                    + eps2 * lap2
                    + 6.0 * ph * avp
                    - 6.0 * divw
                    - a4 * divp
                )

    @njit(cache=True)
    def _assemble_concave_grad(phi, dx, dy, p, h, c3, cskew, a4, out):
        m = phi.shape[0]
        twoh2 = 2.0 * h * h
        twoh = 2.0 * h
        for i in range(m):
            im = i - 1 if i > 0 else m - 1
            ip = i + 1 if i + 1 < m else 0
            for j in range(m):
                jm = j - 1 if j > 0 else m - 1
                jp = j + 1 if j + 1 < m else 0
                skew = (
                    phi[ip, jp] + phi[im, jp] + phi[ip, jm] + phi[im, jm] - 4.0 * phi[i, j]
                ) / twoh2
                divp = (
                    p[i, j] * dx[i, j]
                    - p[im, j] * dx[im, j]
                    + p[i, jm] * dx[i, jm]
                    - p[im, jm] * dx[im, jm]
                    + p[i, j] * dy[i, j]
                    - p[i, jm] * dy[i, jm]
                    + p[im, j] * dy[im, j]
                    - p[im, jm] * dy[im, jm]
                ) / twoh
                ph = phi[i, j]
                out[i, j] = c3 * ph * ph * ph - cskew * skew - a4 * divp

    def delta_fc(phi, h, eps, eta, A, work=None, out=None):
        """Gradient of the convex energy part, fused kernel path."""
        m = phi.shape[0]
        w = work if work is not None else StencilWork(m)
        if out is None:
            out = np.empty((m, m))
        em2 = 1.0 / (eps * eps)
        _lap5(phi, h, w.lap)
        _vertex_pack(phi, h, w.dx, w.dy, w.p, w.av2)
        _assemble_convex_grad(
            phi, w.lap, w.dx, w.dy, w.p, w.av2, h,
            3.0 * em2, 4.0 * A, em2 + eta, eps * eps, 4.0 * A, out,
        )
        return out

    def delta_fe(phi, h, eps, eta, A, work=None, out=None):
        """Gradient of the concave energy part, fused kernel path."""
        m = phi.shape[0]
        w = work if work is not None else StencilWork(m)
        if out is None:
            out = np.empty((m, m))
        em2 = 1.0 / (eps * eps)
        _vertex_pack(phi, h, w.dx, w.dy, w.p, w.av2)
        _assemble_concave_grad(
            phi, w.dx, w.dy, w.p, h,
            4.0 * em2 + eta + 4.0 * A, 2.0 + eta * eps * eps, 4.0 * A, out,
        )
        return out

else:
    delta_fc = None
    delta_fe = None
