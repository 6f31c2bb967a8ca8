"""Closed-form and quadrature upper bounds for K-spectral constants.

Every bound is returned as a :class:`BoundCertificate` carrying the named
intermediate quantities it was computed from.  The constant kinds are

``C``     scalar K-spectral constant,
``C_cb``  complete (matrix-valued) constant,
``C_N``   sup-norm constant of the Neumann density,
``D_N``   oscillation constant of the Neumann density,

related by ``C <= C_cb <= C_N <= 1 + D_N``.  A bound for a constant further
right in that chain is also a bound for every constant to its left, which is
how :func:`certificate` pools members.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    ConvexDomain,
    Disk,
    DomainError,
    Ellipse,
    HalfPlane,
    Sector,
    contains,
    metrics,
    sample_boundary,
)
from .operators import PoleError, RationalFunction, boundary_sup
from .quadrature import adaptive_quad, composite_gauss

__all__ = [
    "BoundCertificate",
    "UNIVERSAL_CONSTANT",
    "bound_tv",
    "bound_tv_flatness",
    "bound_sector_calculus",
    "bound_neumann_angle",
    "bound_neumann_sector_sharp",
    "q_kernel",
    "q_kernel_l1",
    "bound_curvature",
    "bound_area",
    "bound_universal",
    "bound_disk_exact",
    "all_bounds",
    "certificate",
    "jr_values",
    "jr_estimate_check",
    "representation_residual_bounded",
    "kr_values",
    "kr_constant_check",
    "representation_residual_sector",
]

UNIVERSAL_CONSTANT = 57.0
QUAD_TOL = 1e-10
KINDS = ("C", "C_cb", "C_N", "D_N")

# which member kinds bound a requested kind (C <= C_cb <= C_N <= 1 + D_N)
_DOMINATES = {
    "C": ("C", "C_cb", "C_N", "D_N"),
    "C_cb": ("C_cb", "C_N", "D_N"),
    "C_N": ("C_N", "D_N"),
    "D_N": ("D_N",),
}


@dataclass(frozen=True)
class BoundCertificate:
    """An upper bound for one constant, with provenance.

    Non-applicable certificates carry ``value = inf`` and a ``reason``.
    ``members`` is filled only for ``combined_min`` certificates.
    """

    constant_kind: str
    value: float
    source: str
    inputs: dict = field(default_factory=dict)
    applicable: bool = True
    reason: str = ""
    resolution: dict = field(default_factory=dict)
    members: tuple = ()

    def __post_init__(self):
        if self.constant_kind not in KINDS:
            raise ValueError(f"unknown constant kind {self.constant_kind!r}")
        if self.applicable and not self.value >= 1.0 - 1e-12:
            raise ValueError(f"certificate value {self.value} below 1")

    def as_dict(self) -> dict:
        out = {
            "constant_kind": self.constant_kind,
            "value": self.value if math.isfinite(self.value) else None,
            "source": self.source,
            "inputs": {k: _jsonable(v) for k, v in self.inputs.items()},
            "applicable": self.applicable,
            "resolution": dict(self.resolution),
        }
        if not self.applicable:
            out["reason"] = self.reason
        if self.members:
            out["members"] = [m.as_dict() for m in self.members]
        return out

    def to_json(self, **kw) -> str:
        return json.dumps(self.as_dict(), **kw)

    def as_kind(self, kind: str) -> "BoundCertificate":
        """The same bound relabelled for a constant it dominates."""
        if kind == self.constant_kind:
            return self
        if self.constant_kind not in _DOMINATES[kind]:
            raise ValueError(f"a {self.constant_kind} bound does not bound {kind}")
        value = self.value
        if self.constant_kind == "D_N" and kind != "D_N":
            value = 1.0 + value
        return BoundCertificate(
            kind, value, self.source, dict(self.inputs), self.applicable, self.reason, dict(self.resolution)
        )


def _jsonable(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def _na(kind, source, reason, **inputs):
    return BoundCertificate(kind, math.inf, source, inputs, applicable=False, reason=reason)


def _check_alpha(alpha):
    alpha = float(alpha)
    if not (0.0 < alpha <= math.pi / 2 + 1e-15):
        raise DomainError(f"half-angle {alpha} outside (0, pi/2]")
    return min(alpha, math.pi / 2)


def _half_angle_of(target):
    if isinstance(target, HalfPlane):
        return math.pi / 2
    if isinstance(target, Sector):
        return target.half_angle
    return _check_alpha(target)


# ---------------------------------------------------------------------------
# bounded domains


def bound_tv(domain: ConvexDomain) -> BoundCertificate:
    """``2 + pi + phi`` with ``phi`` the minimal total variation of ``log|sigma - omega|``."""
    if not domain.bounded:
        return _na("C_cb", "tv_bound", "unbounded domain")
    m = metrics(domain)
    return BoundCertificate(
        "C_cb",
        2.0 + math.pi + m.phi_tv,
        "tv_bound",
        {"phi": m.phi_tv, "tv_center": m.tv_center},
        resolution={"boundary_nodes": m.resolution},
    )


def bound_tv_flatness(domain: ConvexDomain) -> BoundCertificate:
    """``2 + pi + 2 log(tau^4 / (tau^2 - 2))``; needs ``tau^2 > 2``."""
    if not domain.bounded:
        return _na("C_cb", "flatness_tv_bound", "unbounded domain")
    m = metrics(domain)
    tau = m.tau
    if tau * tau <= 2.0 * (1 + 1e-12):
        return _na("C_cb", "flatness_tv_bound", "flatness tau^2 <= 2", tau=tau)
    value = 2.0 + math.pi + 2.0 * math.log(tau**4 / (tau * tau - 2.0))
    return BoundCertificate(
        "C_cb", value, "flatness_tv_bound", {"tau": tau, "tau_center": m.tau_center},
        resolution={"boundary_nodes": 4096},
    )


def bound_curvature(domain: ConvexDomain):
    """``D_N <= 4 pi R / L`` and ``C_cb <= 1 + 4 pi R / L``.

    ``R`` is the largest three-point circle radius of the boundary (``a^2/b``
    for an ellipse, infinite for a polygon).
    """
    if not domain.bounded:
        na = ("unbounded domain",)
        return _na("D_N", "curvature", *na), _na("C_cb", "curvature", *na)
    m = metrics(domain)
    R, L = m.r_three_point, m.perimeter
    if not math.isfinite(R):
        reason = "infinite three-point radius (boundary has corners)"
        return (_na("D_N", "curvature", reason, R=R, L=L), _na("C_cb", "curvature", reason, R=R, L=L))
    d = 4.0 * math.pi * R / L
    inputs = {"R": R, "L": L}
    # D_N >= 1 for any domain; the formula gives >= 2 since R >= L / (2 pi)
    return (
        BoundCertificate("D_N", d, "curvature", inputs),
        BoundCertificate("C_cb", 1.0 + d, "curvature", dict(inputs)),
    )


def bound_area(domain: ConvexDomain) -> BoundCertificate:
    """``C_N <= 3 + (2 pi delta^2 / area)^3``."""
    if not domain.bounded:
        return _na("C_N", "area", "unbounded domain")
    m = metrics(domain)
    ratio = 2.0 * math.pi * m.diameter**2 / m.area
    return BoundCertificate("C_N", 3.0 + ratio**3, "area", {"diameter": m.diameter, "area": m.area})


def bound_disk_exact(domain: ConvexDomain) -> BoundCertificate:
    """The disk value ``C = C_cb = 2``."""
    if not isinstance(domain, Disk):
        return _na("C_cb", "disk_exact", "domain is not a disk")
    return BoundCertificate("C_cb", 2.0, "disk_exact", {"radius": domain.radius})


def bound_universal(kind: str = "C_cb") -> BoundCertificate:
    """The convex-domain universal constant."""
    return BoundCertificate("C_cb", UNIVERSAL_CONSTANT, "universal_57", {}).as_kind(kind)


# ---------------------------------------------------------------------------
# sectors


def _sector_integrand(x):
    return (math.pi - x + math.sin(x)) / math.sin(x)


def bound_sector_calculus(alpha: float) -> BoundCertificate:
    """``1 + (2/pi) int_alpha^{pi/2} (pi - x + sin x) / sin x dx``.

    The integrand behaves like ``pi / x`` near 0; after ``x = e^u`` it is
    bounded and QUADPACK stays accurate down to ``alpha ~ 1e-12``.
    """
    alpha = _check_alpha(alpha)
    upper = math.pi / 2
    if alpha >= upper:
        return BoundCertificate("C_cb", 1.0, "sector_calculus", {"alpha": alpha, "integral": 0.0},
                                resolution={"epsabs": QUAD_TOL})
    # substitute x = exp(u): dx = x du, integrand x * f(x) is smooth and O(1) near 0
    val, err = adaptive_quad(
        lambda u: math.exp(u) * _sector_integrand(math.exp(u)), math.log(alpha), math.log(upper), epsabs=QUAD_TOL
    )
    value = 1.0 + 2.0 / math.pi * val
    return BoundCertificate(
        "C_cb", value, "sector_calculus", {"alpha": alpha, "integral": val},
        resolution={"epsabs": QUAD_TOL, "error_estimate": err},
    )


def bound_neumann_angle(alpha: float):
    """``C_N <= pi / alpha`` and ``C_cb <= (pi - alpha) / alpha``."""
    alpha = _check_alpha(alpha)
    inputs = {"alpha": alpha}
    return (
        BoundCertificate("C_N", math.pi / alpha, "neumann_angle", dict(inputs)),
        BoundCertificate("C_cb", (math.pi - alpha) / alpha, "neumann_angle", dict(inputs)),
    )


def _sharp_cn(alpha):
    return 2.0 - 2.0 / math.pi * math.log(math.tan(alpha * math.pi / (4.0 * (math.pi - alpha))))


def bound_neumann_sector_sharp(alpha: float):
    """Exact Neumann constant of a sector of half-angle ``alpha``.

    ``C_N = 2 - (2/pi) log tan(alpha pi / (4 (pi - alpha)))`` and
    ``C_cb <= ((pi - alpha)/pi) C_N``.
    """
    alpha = _check_alpha(alpha)
    cn = _sharp_cn(alpha)
    inputs = {"alpha": alpha}
    return (
        BoundCertificate("C_N", cn, "neumann_sector_sharp", dict(inputs)),
        BoundCertificate("C_cb", (math.pi - alpha) / math.pi * cn, "neumann_sector_sharp", dict(inputs)),
    )


def q_kernel(t, alpha: float):
    """The kernel ``q(t)`` whose L1 norm is ``C_N - 2`` on the sector.

    ``q(t) = (i/pi) nu e^{-t nu} [1/(e^{2 i alpha nu} - e^{-t nu}) + 1/(1 + e^{-t nu})]``
    with ``nu = pi / (2 (pi - alpha))``; evaluated in an overflow-free form
    for negative ``t``.
    """
    t = np.asarray(t, dtype=float)
    nu = math.pi / (2.0 * (math.pi - alpha))
    E = np.exp(2j * alpha * nu)
    out = np.empty(t.shape, dtype=complex)
    pos = t >= 0
    x = np.exp(-t[pos] * nu)
    out[pos] = x / (E - x) + x / (1.0 + x)
    y = np.exp(t[~pos] * nu)
    out[~pos] = 1.0 / (E * y - 1.0) + 1.0 / (1.0 + y)
    return 1j / math.pi * nu * out


def q_kernel_l1(alpha: float, truncation: float | None = None, tol: float = 1e-12) -> float:
    """``int_{-T}^{T} |q(t)| dt`` by adaptive quadrature.

    The kernel decays like ``exp(-nu |t|)``; the default truncation makes the
    discarded tail smaller than ``tol``.  A :class:`ValueError` is raised when
    a user-supplied truncation leaves a larger tail.
    """
    alpha = float(alpha)
    if not (0.0 < alpha < math.pi / 2):
        raise DomainError("q kernel needs 0 < alpha < pi/2")
    nu = math.pi / (2.0 * (math.pi - alpha))
    if truncation is None:
        truncation = 40.0 / nu
    T = float(truncation)
    tail = float(np.abs(q_kernel(np.array([-T, T]), alpha)).sum()) / nu
    if tail > tol:
        raise ValueError(f"truncation {T} leaves tail ~{tail:.2e} > {tol:.0e}")

    def f(t):
        return float(abs(q_kernel(np.array([t]), alpha)[0]))

    # the kernel varies on the scale 1/nu; split so QUADPACK sees smooth panels
    breaks = np.linspace(-T, T, 41)
    total = 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        total += adaptive_quad(f, a, b, epsabs=1e-14, epsrel=1e-13)[0]
    return total


# ---------------------------------------------------------------------------
# pooling


def all_bounds(target) -> list[BoundCertificate]:
    """Every individual certificate for a domain or a half-angle.

    For sectors (or a bare half-angle) the sharp sector constant is included;
    for bounded domains the tv, flatness, curvature, area and disk bounds.
    """
    if isinstance(target, ConvexDomain) and target.bounded:
        out = [bound_tv(target), bound_tv_flatness(target)]
        out.extend(bound_curvature(target))
        out.append(bound_area(target))
        out.append(bound_disk_exact(target))
    else:
        alpha = _half_angle_of(target)
        out = [bound_sector_calculus(alpha)]
        out.extend(bound_neumann_angle(alpha))
        out.extend(bound_neumann_sector_sharp(alpha))
    out.append(bound_universal())
    return out


def certificate(target, kind: str = "C_cb", include_sharp: bool = False) -> BoundCertificate:
    """Minimum over all applicable bounds valid for ``kind``.

    ``target`` is a :class:`ConvexDomain` or a half-angle in radians.  The
    universal constant always takes part (it bounds ``C`` and ``C_cb`` only).
    For sectors the pooled set is the angle bound, the sector-calculus bound
    and 57; ``include_sharp=True`` adds the exact sector Neumann constant.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown constant kind {kind!r}")
    members = []
    for cert in all_bounds(target):
        if cert.source == "neumann_sector_sharp" and not include_sharp:
            continue
        if cert.source == "universal_57" and kind in ("C_N", "D_N"):
            continue
        if not cert.applicable or cert.constant_kind not in _DOMINATES[kind]:
            continue
        members.append(cert.as_kind(kind))
    inputs = {}
    if isinstance(target, ConvexDomain):
        inputs["domain"] = target.kind
    else:
        inputs["alpha"] = float(target)
    if not members:
        return BoundCertificate(kind, math.inf, "combined_min", inputs, applicable=False,
                                reason=f"no applicable bound for {kind}")
    best = min(members, key=lambda c: c.value)
    inputs["attained_by"] = best.source
    res = {}
    for m in members:
        res.update(m.resolution)
    return BoundCertificate(kind, best.value, "combined_min", inputs, resolution=res, members=tuple(members))


# ---------------------------------------------------------------------------
# representation identities, bounded case


def _inner_rule(levels=8, order=64):
    """Gauss rule on [0, 1] with panels halving toward t = 1."""
    breaks = [0.0] + [1.0 - 2.0 ** (-j) for j in range(1, levels + 1)] + [1.0]
    return composite_gauss(np.array(breaks), order)


def _require_smooth_bounded(domain):
    if not isinstance(domain, (Disk, Ellipse)):
        raise DomainError("the bounded representation needs a smooth bounded boundary (disk or ellipse)")


def _pole_check(r, domain, z):
    if not contains(domain, z, margin=0.0):
        raise DomainError(f"{z} is not an interior point")
    from .geometry import support_function

    for p in getattr(r, "poles", ()):
        if domain.bounded:
            t = np.linspace(0.0, 2 * math.pi, 1440, endpoint=False)
            gap = np.real(np.exp(-1j * t) * p) - support_function(domain, t)
            if gap.max() <= 1e-12:
                raise PoleError(f"pole {p} lies in the closed domain")
        elif contains(domain, p, margin=0.0):
            raise PoleError(f"pole {p} lies in the closed domain")


def jr_values(r, sigma, theta, zc, levels=8, order=64):
    """The inner t-integral ``Jr(sigma, conj(z))`` at boundary points.

    Coordinates are relative to the representation centre: ``sigma`` and
    ``zc`` are already translated and ``r`` must accept translated points.
    """
    t, w = _inner_rule(levels, order)
    e2 = np.exp(2j * theta)[:, None]
    sig = sigma[:, None]
    W = e2 * (np.conj(sig) - np.conj(zc))
    denom = (t[None, :] - 1.0) * sig + W
    vals = r(t[None, :] * sig)
    return (sig * W * vals / denom**2) @ w / math.pi


def representation_residual_bounded(domain: ConvexDomain, r, z, n: int = 512, return_parts: bool = False):
    """``|r(z) - int r mu ds - int Jr d theta|`` on a smooth bounded domain.

    The identity is written around the total-variation centre, which is
    translated to the origin first.  With ``return_parts`` the tuple
    ``(residual, mu_part, jr_part)`` is returned.
    """
    _require_smooth_bounded(domain)
    z = complex(z)
    _pole_check(r, domain, z)
    centre = metrics(domain).tv_center
    smp = sample_boundary(domain, n, omega=centre)
    sigma0 = smp.sigma - centre
    z0 = z - centre

    def r0(x):
        return r(x + centre)

    mu = np.real(smp.nu / (smp.sigma - z)) / math.pi
    mu_part = complex(np.sum(smp.weight * r(smp.sigma) * mu))
    J = jr_values(r0, sigma0, smp.theta, z0)
    jr_part = complex(np.sum(smp.weight * smp.curvature * J))
    residual = abs(complex(r(np.array([z]))[0]) - mu_part - jr_part)
    if return_parts:
        return residual, mu_part, jr_part
    return residual


def jr_estimate_check(domain: ConvexDomain, r, z, n: int = 512, tol: float = 1e-9) -> float:
    """Largest excess of ``|Jr|`` over ``1/2 + |cot(theta - phi)|``.

    ``r`` is normalized to boundary sup 1 first.  Returns
    ``max(|Jr| - 1/2 - |cot(theta - phi)|)``, which must be ``<= tol``.
    """
    _require_smooth_bounded(domain)
    z = complex(z)
    _pole_check(r, domain, z)
    if isinstance(r, RationalFunction):
        sup = boundary_sup(r, domain)
        r = r.scaled(1.0 / sup)
    centre = metrics(domain).tv_center
    smp = sample_boundary(domain, n, omega=centre)
    sigma0 = smp.sigma - centre
    J = jr_values(lambda x: r(x + centre), sigma0, smp.theta, z - centre)
    gap = np.mod(smp.theta - np.angle(sigma0), 2 * math.pi)
    bound = 0.5 + np.abs(1.0 / np.tan(gap))
    return float(np.max(np.abs(J) - bound))


# ---------------------------------------------------------------------------
# representation identities, sector case


def _half_line_rule(n_ray, scale=1.0, order=16):
    """Nodes on [0, inf) resolving scales from 1e-8 * scale to infinity."""
    panels = max(8, n_ray // order)
    breaks = np.concatenate([[0.0], np.geomspace(scale * 1e-8, scale * 1e4, panels)])
    x, w = composite_gauss(breaks, order)
    u, wu = composite_gauss(np.array([0.0, 0.25, 0.5, 1.0]), order)
    R = scale * 1e4
    return np.concatenate([x, R / u]), np.concatenate([w, wu * R / u**2])


def _smoothed_sector(alpha, eps):
    """Arc of radius ``eps`` tangent to both rays of ``|arg z| < alpha``.

    Returns ``(centre, rho0)`` with ``rho0`` the distance from the vertex to
    the tangency points.
    """
    return eps / math.sin(alpha), eps / math.tan(alpha)


def _in_rounded_sector(z, alpha, eps):
    c, rho0 = _smoothed_sector(alpha, eps)
    if abs(np.angle(z)) >= alpha:
        return False
    return z.real > rho0 * math.cos(alpha) or abs(z - c) < eps


def _arc_rule(alpha, eps, n_arc, order=32):
    panels = max(4, n_arc // order)
    th, w = composite_gauss(np.linspace(math.pi + alpha, 2 * math.pi - alpha, panels + 1), order)
    c, _ = _smoothed_sector(alpha, eps)
    sigma = c - 1j * eps * np.exp(1j * th)
    nu = -1j * np.exp(1j * th)
    return th, w, sigma, nu


def kr_values(r, sigma, theta, z, n_inner=1024):
    """``Kr(sigma, conj z) = -(1/pi) int_0^inf r(sigma + t) W / (t + W)^2 dt``.

    ``W = e^{2 i theta} (conj sigma - conj z)``.
    """
    scale = float(np.max(np.abs(sigma - z)))
    t, w = _half_line_rule(n_inner, scale)
    W = (np.exp(2j * theta) * (np.conj(sigma) - np.conj(z)))[:, None]
    vals = r(sigma[:, None] + t[None, :])
    return -(vals * W / (t[None, :] + W) ** 2) @ w / math.pi


def _sector_boundary_mu(r, alpha, z, eps, n_ray):
    """``int r(sigma) mu(sigma, z) ds`` over the smoothed sector boundary."""
    _, rho0 = _smoothed_sector(alpha, eps)
    x, wx = _half_line_rule(n_ray, 1.0)
    rho = rho0 + x
    up, lo = np.exp(1j * alpha), np.exp(-1j * alpha)
    parts = []
    for sigma, nu in ((rho * up, 1j * up), (rho * lo, -1j * lo)):
        mu = np.real(nu / (sigma - z)) / math.pi
        parts.append(np.sum(wx * r(sigma) * mu))
    _, w, sigma, nu = _arc_rule(alpha, eps, n_ray // 2)
    mu = np.real(nu / (sigma - z)) / math.pi
    parts.append(np.sum(eps * w * r(sigma) * mu))
    return complex(sum(parts))


def kr_constant_check(alpha: float, z, eps: float = 1e-3, n: int = 256) -> float:
    """``max |Kr + 1/pi|`` for ``r = 1`` over the smoothing arc."""
    th, _, sigma, _ = _arc_rule(alpha, eps, n)
    K = kr_values(lambda x: np.ones_like(x, dtype=complex), sigma, th, complex(z))
    return float(np.max(np.abs(K + 1.0 / math.pi)))


def representation_residual_sector(alpha: float, r, z, truncation: float = 1e4, eps: float = 1e-3,
                                   n: int = 2048, return_parts: bool = False):
    """Residual of the sector representation ``r(z) = int r mu ds + int Kr d theta``.

    The sector ``|arg z| < alpha`` has its vertex rounded by an arc of radius
    ``eps``; the tangent angle turns only on that arc, so the ``theta``
    integral runs over it alone.  Rays are integrated out to infinity, the
    region beyond ``truncation`` through an inverted variable.  ``r`` must be
    bounded on the sector (finite value at infinity).
    """
    alpha = _check_alpha(alpha)
    z = complex(z)
    if not _in_rounded_sector(z, alpha, eps):
        raise DomainError(f"{z} is not interior to the rounded sector")
    if truncation < 100 * max(1.0, abs(z)):
        raise ValueError("truncation radius too small compared with |z|")
    for p in getattr(r, "poles", ()):
        if abs(np.angle(p)) <= alpha + 1e-12 or abs(p) < 1e-14:
            raise PoleError(f"pole {p} lies in the closed sector")
    if isinstance(r, RationalFunction) and not math.isfinite(abs(r.at_infinity())):
        raise DomainError("r must be finite at infinity")
    mu_part = _sector_boundary_mu(r, alpha, z, eps, n)
    th, w, sigma, _ = _arc_rule(alpha, eps, n // 8)
    kr_part = complex(np.sum(w * kr_values(r, sigma, th, z, n // 2)))
    residual = abs(complex(r(np.array([z]))[0]) - mu_part - kr_part)
    if return_parts:
        return residual, mu_part, kr_part
    return residual
