"""Brute-force reference implementations of the staggered operators.

Everything here is written as plain index loops straight from the stencil
definitions, with explicit modular wrapping, and stays independent of the
package internals.  Tests compare the production operators against these on
small grids.
"""

from __future__ import annotations

import numpy as np


def dxv(a, h):
    """x-difference from cell centers to vertices."""
    m = a.shape[0]
    out = np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            ip, jp = (i + 1) % m, (j + 1) % m
            out[i, j] = (a[ip, jp] - a[i, jp] + a[ip, j] - a[i, j]) / (2.0 * h)
    return out


def dyv(a, h):
    """y-difference from cell centers to vertices."""
    m = a.shape[0]
    out = np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            ip, jp = (i + 1) % m, (j + 1) % m
            out[i, j] = (a[ip, jp] - a[ip, j] + a[i, jp] - a[i, j]) / (2.0 * h)
    return out


def dxc(v, h):
    """x-difference from vertices back to cell centers."""
    m = v.shape[0]
    out = np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            im, jm = (i - 1) % m, (j - 1) % m
            out[i, j] = (v[i, j] - v[im, j] + v[i, jm] - v[im, jm]) / (2.0 * h)
    return out


def dyc(v, h):
    """y-difference from vertices back to cell centers."""
    m = v.shape[0]
    out = np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            im, jm = (i - 1) % m, (j - 1) % m
            out[i, j] = (v[i, j] - v[i, jm] + v[im, j] - v[im, jm]) / (2.0 * h)
    return out


def div(p, q, h):
    return dxc(p, h) + dyc(q, h)


def lap(a, h):
    m = a.shape[0]
    out = np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            out[i, j] = (
                a[(i + 1) % m, j] + a[(i - 1) % m, j] + a[i, (j + 1) % m] + a[i, (j - 1) % m]
                - 4.0 * a[i, j]
            ) / (h * h)
    return out


def lap_skew(a, h):
    m = a.shape[0]
    out = np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            ip, im = (i + 1) % m, (i - 1) % m
            jp, jm = (j + 1) % m, (j - 1) % m
            out[i, j] = (a[ip, jp] + a[im, jp] + a[ip, jm] + a[im, jm] - 4.0 * a[i, j]) / (
                2.0 * h * h
            )
    return out


def avg_v2c(v):
    m = v.shape[0]
    out = np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            im, jm = (i - 1) % m, (j - 1) % m
            out[i, j] = 0.25 * (v[im, jm] + v[im, j] + v[i, j] + v[i, jm])
    return out


def avg_c2v(a):
    m = a.shape[0]
    out = np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            ip, jp = (i + 1) % m, (j + 1) % m
            out[i, j] = 0.25 * (a[i, j] + a[ip, j] + a[i, jp] + a[ip, jp])
    return out


def grad_sq(a, h):
    gx, gy = dxv(a, h), dyv(a, h)
    return gx * gx + gy * gy


def p_laplacian_4(a, h):
    gx, gy = dxv(a, h), dyv(a, h)
    r = gx * gx + gy * gy
    return div(r * gx, r * gy, h)


def mobility_div(mob, a, h):
    mv = avg_c2v(mob)
    gx, gy = dxv(a, h), dyv(a, h)
    return div(mv * gx, mv * gy, h)


def inner(h, u, v):
    total = 0.0
    m = u.shape[0]
    for i in range(m):
        for j in range(m):
            total += u[i, j] * v[i, j]
    return h * h * total


def norm_p(h, u, p):
    total = 0.0
    m = u.shape[0]
    for i in range(m):
        for j in range(m):
            total += abs(u[i, j]) ** p
    return (h * h * total) ** (1.0 / p)


def delta_fc(a, h, eps, eta, A):
    """Gradient of the convex energy part, term by term."""
    em2 = 1.0 / (eps * eps)
    gx, gy = dxv(a, h), dyv(a, h)
    r = gx * gx + gy * gy
    av2 = avg_c2v(a * a)
    return (
        3.0 * em2 * a**5
        + 4.0 * A * a**3
        + (em2 + eta) * a
        + eps * eps * lap(lap(a, h), h)
        + 6.0 * a * avg_v2c(r)
        - 6.0 * div(av2 * gx, av2 * gy, h)
        - 4.0 * A * div(r * gx, r * gy, h)
    )


def delta_fe(a, h, eps, eta, A):
    """Gradient of the concave energy part, term by term."""
    em2 = 1.0 / (eps * eps)
    return (
        (4.0 * em2 + eta) * a**3
        + 4.0 * A * a**3
        - (2.0 + eta * eps * eps) * lap_skew(a, h)
        - 4.0 * A * p_laplacian_4(a, h)
    )


def energy_total(a, h, eps, eta, A):
    """Full discrete energy by direct summation of every term."""
    em2 = 1.0 / (eps * eps)
    gx, gy = dxv(a, h), dyv(a, h)
    r = gx * gx + gy * gy
    la = lap(a, h)
    one = np.ones_like(a)
    return (
        0.5 * em2 * inner(h, a**3, a**3)
        - (em2 + 0.25 * eta) * inner(h, a**2, a**2)
        + 0.5 * (em2 + eta) * inner(h, a, a)
        + 0.5 * eps * eps * inner(h, la, la)
        - (1.0 + 0.5 * eta * eps * eps) * inner(h, r, one)
        + 3.0 * inner(h, a * a, avg_v2c(r))
    )


def energy_convex(a, h, eps, eta, A):
    em2 = 1.0 / (eps * eps)
    gx, gy = dxv(a, h), dyv(a, h)
    r = gx * gx + gy * gy
    la = lap(a, h)
    return (
        0.5 * em2 * inner(h, a**3, a**3)
        + 0.5 * (em2 + eta) * inner(h, a, a)
        + 0.5 * eps * eps * inner(h, la, la)
        + A * inner(h, a**2, a**2)
        + A * inner(h, r, r)
        + 3.0 * inner(h, a * a, avg_v2c(r))
    )


def energy_concave(a, h, eps, eta, A):
    em2 = 1.0 / (eps * eps)
    gx, gy = dxv(a, h), dyv(a, h)
    r = gx * gx + gy * gy
    one = np.ones_like(a)
    return (
        (em2 + 0.25 * eta) * inner(h, a**2, a**2)
        + (1.0 + 0.5 * eta * eps * eps) * inner(h, r, one)
        + A * inner(h, a**2, a**2)
        + A * inner(h, r, r)
    )


def apply_n(phi, g, s, eps, eta, A, h, inv_neg_lap):
    """Step operator via the term-by-term convex gradient; the inverse
    Laplacian is injected (tested separately by spectral identities)."""
    return inv_neg_lap(phi - g) + s * delta_fc(phi, h, eps, eta, A)
