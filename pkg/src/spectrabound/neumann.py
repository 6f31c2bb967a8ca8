"""Nyström discretization of the double-layer operator and the Neumann problem.

The operator is ``(Pg)(z) = (1/pi) int g(sigma) d arg(sigma - z)`` for ``z`` on
the boundary.  The density ``g`` solving ``(I + P) g = 2 r`` reproduces ``r``
inside the domain through ``r(z) = (1/2) int g(sigma) mu(sigma, z) ds``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.linalg import lapack, lu_factor, lu_solve

from .geometry import (
    ConvexDomain,
    Disk,
    DomainError,
    Polygon,
    contains,
    sample_boundary,
)
from .operators import NumericalError, RationalFunction, boundary_sup

__all__ = [
    "NeumannSystem",
    "NeumannSolution",
    "assemble_p",
    "solve_neumann",
    "reconstruct",
    "smallest_enclosing_circle",
    "oscillation",
    "estimate_cn",
    "mobius",
    "lemniscate_projection_check",
]


@dataclass(frozen=True)
class NeumannSystem:
    """Discretized ``P`` on ``n`` boundary nodes.

    Attributes
    ----------
    domain : ConvexDomain
    nodes : BoundarySamples
        Quadrature nodes; ``p_matrix[i, j]`` couples target ``i`` to source ``j``.
    p_matrix : ndarray, shape (n, n)
    """

    domain: ConvexDomain
    nodes: object
    p_matrix: np.ndarray

    @property
    def n(self) -> int:
        return self.p_matrix.shape[0]

    @cached_property
    def lu(self):
        """LU factors of ``I + P``, computed once per system."""
        return lu_factor(np.eye(self.n) + self.p_matrix)

    @cached_property
    def condition_number(self) -> float:
        """1-norm condition number estimate of ``I + P`` (LAPACK ``gecon``)."""
        anorm = float(np.abs(np.eye(self.n) + self.p_matrix).sum(axis=0).max())
        rcond, info = lapack.dgecon(self.lu[0], anorm, norm="1")
        if info != 0:
            raise NumericalError(f"condition estimate failed (info={info})")
        return math.inf if rcond == 0 else 1.0 / float(rcond)

    def row_sum_error(self) -> float:
        return float(np.max(np.abs(self.p_matrix.sum(axis=1) - 1.0)))

    def apply(self, values) -> np.ndarray:
        return self.p_matrix @ np.asarray(values)

    def dump(self, path) -> None:
        """Write ``p_matrix`` as row-major little-endian float64."""
        Path(path).write_bytes(np.ascontiguousarray(self.p_matrix, dtype="<f8").tobytes())

    @staticmethod
    def load_matrix(path, n: int) -> np.ndarray:
        return np.frombuffer(Path(path).read_bytes(), dtype="<f8").reshape(n, n)


def _polygon_correction(P, smp, domain):
    """Rescale each off-edge block so it integrates the exact subtended angle."""
    v = domain.vertex_array
    a, b = v, np.roll(v, -1)
    z = smp.sigma[:, None]
    # angle subtended by edge e from z_i, in [0, pi]
    exact = np.angle((b[None, :] - z) / (a[None, :] - z)) / math.pi
    for e in range(v.size):
        cols = smp.edge == e
        block = P[:, cols]
        quad = block.sum(axis=1)
        rows = smp.edge != e
        scale = np.ones_like(quad)
        ok = rows & (quad > 0)
        scale[ok] = exact[ok, e] / quad[ok]
        P[:, cols] = block * scale[:, None]
        P[~rows[:, None] & cols[None, :]] = 0.0
    return P


def assemble_p(domain: ConvexDomain, n: int = 512) -> NeumannSystem:
    """Assemble the double-layer matrix on ``n`` boundary nodes.

    Off-diagonal entries are ``(1/pi) Re(nu_j / (sigma_j - z_i)) w_j``.  The
    diagonal of a smooth curve is the curvature limit ``kappa_i w_i / (2 pi)``.
    On polygons, entries from the target's own edge vanish and each other
    edge is rescaled to the exact angle it subtends, so rows sum to one.
    """
    if not domain.bounded:
        raise DomainError("Neumann assembly needs a bounded domain")
    smp = sample_boundary(domain, n)
    sigma, nu, w = smp.sigma, smp.nu, smp.weight
    diff = sigma[None, :] - sigma[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        K = np.real(nu[None, :] / diff) / math.pi
    idx = np.arange(sigma.size)
    K[idx, idx] = smp.curvature / (2 * math.pi)
    P = K * w[None, :]
    if isinstance(domain, Polygon):
        P = _polygon_correction(P, smp, domain)
    return NeumannSystem(domain, smp, P)


# ---------------------------------------------------------------------------
# solve


@dataclass(frozen=True)
class NeumannSolution:
    g: np.ndarray
    residual: float
    condition_number: float
    reconstruction_error: float = math.nan


def reconstruct(system: NeumannSystem, g, z) -> np.ndarray:
    """``(1/2) sum_j g_j mu(sigma_j, z) w_j`` at interior points ``z``."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    smp = system.nodes
    mu = np.real(smp.nu[None, :] / (smp.sigma[None, :] - z[:, None])) / math.pi
    return 0.5 * (mu * smp.weight[None, :]) @ np.asarray(g)


def _default_probes(domain, count=10):
    rng = np.random.default_rng(12345)
    c = domain.reference_point()
    # points on 0.6x scaled copy of the boundary
    from .geometry import boundary_curve

    u = rng.uniform(0, 1, count)
    return c + 0.6 * (boundary_curve(domain, u) - c)


def solve_neumann(system: NeumannSystem, r_values, probes=None, cond_limit: float = 1e10) -> NeumannSolution:
    """``g = 2 (I + P)^{-1} r`` by a dense LU solve (factors cached on the system).

    ``r_values`` is either boundary data at the nodes or a callable (for
    example a :class:`RationalFunction`).  For callables the interior
    reconstruction error is measured at ``probes`` (ten points on a shrunken
    copy of the boundary by default).
    """
    f = r_values if callable(r_values) else None
    r = np.asarray(f(system.nodes.sigma) if f else r_values, dtype=complex)
    if r.shape != (system.n,):
        raise ValueError("boundary data must have one value per node")
    cond = system.condition_number
    if not math.isfinite(cond) or cond > cond_limit:
        raise NumericalError(f"I + P is ill-conditioned (cond={cond:.3e})")
    parts = lu_solve(system.lu, np.column_stack([r.real, r.imag]))
    g = 2.0 * (parts[:, 0] + 1j * parts[:, 1])
    residual = float(np.max(np.abs(0.5 * (g + system.p_matrix @ g) - r)))
    rec = math.nan
    if f is not None:
        pts = _default_probes(system.domain) if probes is None else np.atleast_1d(np.asarray(probes, dtype=complex))
        for p in pts:
            if not contains(system.domain, complex(p), margin=0.0):
                raise DomainError(f"probe {p} is not interior")
        rec = float(np.max(np.abs(reconstruct(system, g, pts) - f(pts))))
    return NeumannSolution(g, residual, cond, rec)


# ---------------------------------------------------------------------------
# oscillation


def _circle_two(a, b):
    c = 0.5 * (a + b)
    return c, abs(a - c)


def _circle_three(a, b, c):
    ax, ay, bx, by, cx, cy = a.real, a.imag, b.real, b.imag, c.real, c.imag
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if abs(d) < 1e-300:
        # collinear: the farthest pair spans the circle
        pairs = [(a, b), (a, c), (b, c)]
        return _circle_two(*max(pairs, key=lambda p: abs(p[0] - p[1])))
    a2, b2, c2 = abs(a) ** 2, abs(b) ** 2, abs(c) ** 2
    ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d
    uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d
    centre = complex(ux, uy)
    return centre, max(abs(a - centre), abs(b - centre), abs(c - centre))


def smallest_enclosing_circle(points, seed: int = 0):
    """Welzl's randomized algorithm (iterative form) in the complex plane.

    Returns ``(centre, radius)``.  Expected linear time after a shuffle.
    """
    pts = np.asarray(points, dtype=complex).ravel()
    if pts.size == 0:
        raise ValueError("no points")
    if not np.all(np.isfinite(pts)):
        raise ValueError("non-finite points")
    pts = pts[np.random.default_rng(seed).permutation(pts.size)].tolist()
    tol = 1e-14

    def inside(circ, p):
        return abs(p - circ[0]) <= circ[1] * (1 + tol) + tol

    circ = (pts[0], 0.0)
    for i in range(1, len(pts)):
        p = pts[i]
        if inside(circ, p):
            continue
        circ = (p, 0.0)
        for j in range(i):
            q = pts[j]
            if inside(circ, q):
                continue
            circ = _circle_two(p, q)
            for k in range(j):
                s = pts[k]
                if not inside(circ, s):
                    circ = _circle_three(p, q, s)
    return complex(circ[0]), float(circ[1])


def oscillation(values) -> float:
    """``2 inf_c max |f - c|``: the diameter of the smallest enclosing circle."""
    return 2.0 * smallest_enclosing_circle(values)[1]


# ---------------------------------------------------------------------------
# empirical constants


def mobius(c) -> RationalFunction:
    """Disk automorphism ``(z - c) / (1 - conj(c) z)``."""
    c = complex(c)
    return RationalFunction((-c, 1.0), (1.0, -np.conj(c)))


def estimate_cn(domain: ConvexDomain, family, n: int = 1024, normalize: bool = True):
    """Lower estimates ``(c_n, d_n)`` of the Neumann constants over a family.

    Each member is scaled to boundary sup 1 (8192-point sampling plus local
    refinement) before solving; ``c_n`` is the largest ``max |g|`` and
    ``d_n`` the largest oscillation of ``(I + P)^{-1} r = g / 2``.
    """
    family = list(family)
    if not family:
        raise ValueError("empty family")
    system = assemble_p(domain, n)
    c_n = d_n = 0.0
    for r in family:
        if normalize:
            r = r.scaled(1.0 / boundary_sup(r, domain, n=8192))
        g = solve_neumann(system, r(system.nodes.sigma)).g
        c_n = max(c_n, float(np.max(np.abs(g))))
        d_n = max(d_n, oscillation(0.5 * g))
    return c_n, d_n


def lemniscate_projection_check(k: int, n: int = 512, domain: ConvexDomain | None = None) -> float:
    """``max |P sigma^k|`` on the unit disk, which vanishes for ``k >= 1``."""
    if k < 1:
        raise ValueError("power must be at least 1")
    domain = Disk(0.0, 1.0) if domain is None else domain
    if not isinstance(domain, Disk):
        raise DomainError("only the disk lemniscate is implemented")
    while True:
        system = assemble_p(domain, n)
        f = ((system.nodes.sigma - domain.center) / domain.radius) ** k
        err = float(np.max(np.abs(system.apply(f))))
        if err < 1e-8 or n >= 1 << 14:
            return err
        n *= 2
