"""Small quadrature and root-finding helpers shared by the numerical modules."""

from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

__all__ = [
    "gauss_legendre",
    "composite_gauss",
    "graded_breakpoints",
    "adaptive_quad",
    "bisect_roots",
    "refine_max",
]


@lru_cache(maxsize=32)
def _gl(order):
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(order, a=-1.0, b=1.0):
    """Gauss-Legendre nodes and weights on ``[a, b]``."""
    x, w = _gl(order)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def composite_gauss(breaks, order=16):
    """Nodes and weights of a composite Gauss-Legendre rule.

    Parameters
    ----------
    breaks : array_like
        Increasing panel endpoints.
    order : int
        Nodes per panel.
    """
    breaks = np.asarray(breaks, dtype=float)
    x, w = _gl(order)
    a, b = breaks[:-1, None], breaks[1:, None]
    half = 0.5 * (b - a)
    nodes = a + half * (x[None, :] + 1.0)
    weights = half * w[None, :]
    return nodes.ravel(), weights.ravel()


def graded_breakpoints(panels, levels=None):
    """Panel breakpoints on [0, 1], halving toward both endpoints.

    With ``panels`` even and ``levels`` unspecified the layout is
    ``0, 2^-(k), ..., 1/4, 1/2, 3/4, ..., 1 - 2^-(k), 1``.
    """
    half = max(panels // 2, 1)
    if levels is not None:
        half = levels
    left = [0.0] + [0.5 * 2.0 ** (-j) for j in range(half - 1, -1, -1)]
    right = [1.0 - v for v in reversed(left[:-1])]
    return np.array(left + right)


def adaptive_quad(f, a, b, epsabs=1e-10, epsrel=1e-12, limit=500, points=None):
    """QUADPACK adaptive Gauss-Kronrod integration of a real integrand.

    Returns ``(value, error_estimate)``.
    """
    return quad(f, a, b, epsabs=epsabs, epsrel=epsrel, limit=limit, points=points)


def bisect_roots(g, lo, hi, iters=60):
    """Vectorized bisection for sign-changing brackets ``[lo, hi]``.

    ``g`` must accept and return arrays. Every bracket is assumed to satisfy
    ``g(lo) * g(hi) < 0``.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    if lo.size == 0:
        return lo
    glo = g(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        left = np.sign(gm) == np.sign(glo)
        lo = np.where(left, mid, lo)
        glo = np.where(left, gm, glo)
        hi = np.where(left, hi, mid)
    return 0.5 * (lo + hi)


def refine_max(f, grid, candidates=3):
    """Maximize a scalar function of one variable from a dense grid.

    The best ``candidates`` grid points are polished by bounded Brent
    minimization on their neighbouring cells. Returns ``(x, f(x))``.
    """
    grid = np.asarray(grid, dtype=float)
    vals = np.asarray(f(grid), dtype=float)
    order = np.argsort(vals)[::-1][:candidates]
    best_x, best_v = grid[order[0]], vals[order[0]]
    for idx in order:
        lo = grid[max(idx - 1, 0)]
        hi = grid[min(idx + 1, grid.size - 1)]
        if hi <= lo:
            continue
        res = minimize_scalar(
            lambda x: -float(f(np.array([x]))[0]),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-13 * max(1.0, abs(hi))},
        )
        if -res.fun > best_v:
            best_x, best_v = res.x, -res.fun
    return best_x, best_v
