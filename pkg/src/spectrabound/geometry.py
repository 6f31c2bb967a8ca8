"""Convex planar domains, boundary sampling and shape functionals.

Complex numbers stand for points of the plane throughout. Every domain is an
immutable dataclass; the functions in this module are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import ClassVar

import numpy as np
from scipy.optimize import minimize
from scipy.special import ellipe, ellipeinc

from .quadrature import bisect_roots, composite_gauss, refine_max

__all__ = [
    "DomainError",
    "ConvexDomain",
    "Disk",
    "Ellipse",
    "Polygon",
    "Sector",
    "HalfPlane",
    "BoundarySample",
    "BoundarySamples",
    "DomainMetrics",
    "domain_from_spec",
    "sample_boundary",
    "support_function",
    "contains",
    "metrics",
    "tv_log",
    "optimal_tv_center",
    "flatness_tau",
    "interior_grid",
]

TWO_PI = 2.0 * math.pi


class DomainError(ValueError):
    """Invalid domain, or an operation the domain kind does not support."""


def _as_complex(value) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise DomainError(f"complex numbers are [re, im] pairs, got {value!r}")
        return complex(float(value[0]), float(value[1]))
    return complex(value)


def _pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


@dataclass(frozen=True)
class ConvexDomain:
    """Base class of the supported open convex domains."""

    kind: ClassVar[str] = ""
    bounded: ClassVar[bool] = True

    def support(self, t):
        """Support function ``h(t) = sup Re(exp(-it) z)`` over the domain."""
        raise NotImplementedError

    def transformed(self, lam: complex, beta: complex) -> "ConvexDomain":
        """Image of the domain under ``z -> lam * z + beta``."""
        raise NotImplementedError

    def reference_point(self) -> complex:
        """A fixed interior point used as a default anchor."""
        raise NotImplementedError

    def to_spec(self) -> dict:
        raise NotImplementedError

    @property
    def scale(self) -> float:
        """A length scale of the domain (diameter for bounded kinds)."""
        return 1.0


@dataclass(frozen=True)
class Disk(ConvexDomain):
    center: complex = 0j
    radius: float = 1.0

    kind: ClassVar[str] = "disk"

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not self.radius > 0 or not math.isfinite(self.radius):
            raise DomainError("disk radius must be positive")

    def support(self, t):
        t = np.asarray(t, dtype=float)
        return np.real(np.exp(-1j * t) * self.center) + self.radius

    def transformed(self, lam, beta):
        return Disk(lam * self.center + beta, abs(lam) * self.radius)

    def reference_point(self):
        return self.center

    def to_spec(self):
        return {"kind": "disk", "center": _pair(self.center), "radius": self.radius}

    @property
    def scale(self):
        return 2.0 * self.radius


@dataclass(frozen=True)
class Ellipse(ConvexDomain):
    center: complex = 0j
    a: float = 1.0
    b: float = 1.0
    rotation: float = 0.0

    kind: ClassVar[str] = "ellipse"

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "rotation", float(self.rotation))
        if not (self.a >= self.b > 0) or not math.isfinite(self.a):
            raise DomainError("ellipse needs a >= b > 0")

    @classmethod
    def from_foci(cls, f1: complex, f2: complex, minor_axis: float) -> "Ellipse":
        """Ellipse with the given foci and full minor axis length."""
        if not minor_axis > 0:
            raise DomainError("minor axis must be positive")
        f1, f2 = complex(f1), complex(f2)
        c = abs(f1 - f2) / 2.0
        b = minor_axis / 2.0
        rot = float(np.angle(f1 - f2)) if c > 0 else 0.0
        return cls((f1 + f2) / 2.0, math.hypot(c, b), b, rot)

    def support(self, t):
        t = np.asarray(t, dtype=float)
        u = t - self.rotation
        return np.real(np.exp(-1j * t) * self.center) + np.sqrt(
            (self.a * np.cos(u)) ** 2 + (self.b * np.sin(u)) ** 2
        )

    def transformed(self, lam, beta):
        lam = complex(lam)
        return Ellipse(
            lam * self.center + beta,
            abs(lam) * self.a,
            abs(lam) * self.b,
            self.rotation + float(np.angle(lam)),
        )

    def reference_point(self):
        return self.center

    def to_spec(self):
        return {
            "kind": "ellipse",
            "center": _pair(self.center),
            "a": self.a,
            "b": self.b,
            "rotation": self.rotation,
        }

    @property
    def scale(self):
        return 2.0 * self.a

    @property
    def foci(self) -> tuple[complex, complex]:
        c = math.sqrt(max(self.a**2 - self.b**2, 0.0))
        d = c * np.exp(1j * self.rotation)
        return self.center + d, self.center - d


@dataclass(frozen=True)
class Polygon(ConvexDomain):
    vertices: tuple = field(default_factory=tuple)

    kind: ClassVar[str] = "polygon"

    def __post_init__(self):
        verts = tuple(complex(v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if len(verts) < 3:
            raise DomainError("polygon needs at least 3 vertices")
        v = np.array(verts)
        e = np.roll(v, -1) - v
        cross = np.imag(np.conj(e) * np.roll(e, -1))
        if not np.all(cross > 0):
            raise DomainError("polygon vertices must be strictly convex and counterclockwise")

    @property
    def vertex_array(self) -> np.ndarray:
        return np.array(self.vertices)

    @property
    def edge_normals(self) -> np.ndarray:
        """Outward normal angles of the edges."""
        v = self.vertex_array
        e = np.roll(v, -1) - v
        return np.angle(-1j * e)

    def support(self, t):
        t = np.asarray(t, dtype=float)
        v = self.vertex_array
        vals = np.real(np.exp(-1j * t[..., None]) * v)
        return vals.max(axis=-1)

    def transformed(self, lam, beta):
        return Polygon(tuple(lam * v + beta for v in self.vertices))

    def reference_point(self):
        return complex(self.vertex_array.mean())

    def to_spec(self):
        return {"kind": "polygon", "vertices": [_pair(v) for v in self.vertices]}

    @property
    def scale(self):
        v = self.vertex_array
        return float(np.abs(v[:, None] - v[None, :]).max())


@dataclass(frozen=True)
class Sector(ConvexDomain):
    """Open sector ``{vertex + r e^{i phi}: r > 0, |phi - bisector| < half_angle}``."""

    vertex: complex = 0j
    bisector: float = 0.0
    half_angle: float = math.pi / 4

    kind: ClassVar[str] = "sector"
    bounded: ClassVar[bool] = False

    def __post_init__(self):
        object.__setattr__(self, "vertex", complex(self.vertex))
        object.__setattr__(self, "bisector", float(self.bisector))
        object.__setattr__(self, "half_angle", float(self.half_angle))
        if not (0 < self.half_angle <= math.pi / 2):
            raise DomainError("sector half angle must lie in (0, pi/2]")

    @property
    def edge_normals(self) -> np.ndarray:
        return np.array(
            [
                self.bisector + self.half_angle + math.pi / 2,
                self.bisector - self.half_angle - math.pi / 2,
            ]
        )

    def admissible(self, t, tol=1e-12):
        t = np.asarray(t, dtype=float)
        return np.cos(t - self.bisector) <= -math.sin(self.half_angle) + tol

    def support(self, t):
        t = np.asarray(t, dtype=float)
        if not np.all(self.admissible(t)):
            raise DomainError("direction outside the normal cone of the sector")
        return np.real(np.exp(-1j * t) * self.vertex)

    def transformed(self, lam, beta):
        lam = complex(lam)
        return Sector(lam * self.vertex + beta, self.bisector + float(np.angle(lam)), self.half_angle)

    def reference_point(self):
        return self.vertex + np.exp(1j * self.bisector)

    def to_spec(self):
        return {
            "kind": "sector",
            "vertex": _pair(self.vertex),
            "bisector": self.bisector,
            "half_angle": self.half_angle,
        }


@dataclass(frozen=True)
class HalfPlane(ConvexDomain):
    """Open half plane ``{z: Re(exp(-i normal_angle) (z - point)) > 0}``."""

    point: complex = 0j
    normal_angle: float = 0.0

    kind: ClassVar[str] = "half_plane"
    bounded: ClassVar[bool] = False

    def __post_init__(self):
        object.__setattr__(self, "point", complex(self.point))
        object.__setattr__(self, "normal_angle", float(self.normal_angle))

    def as_sector(self) -> Sector:
        return Sector(self.point, self.normal_angle, math.pi / 2)

    @property
    def half_angle(self) -> float:
        return math.pi / 2

    @property
    def edge_normals(self) -> np.ndarray:
        return np.array([self.normal_angle + math.pi])

    def support(self, t):
        t = np.asarray(t, dtype=float)
        if not np.all(np.cos(t - self.normal_angle) <= -1 + 1e-12):
            raise DomainError("direction outside the normal cone of the half plane")
        return np.real(np.exp(-1j * t) * self.point)

    def transformed(self, lam, beta):
        lam = complex(lam)
        return HalfPlane(lam * self.point + beta, self.normal_angle + float(np.angle(lam)))

    def reference_point(self):
        return self.point + np.exp(1j * self.normal_angle)

    def to_spec(self):
        return {"kind": "half_plane", "point": _pair(self.point), "normal_angle": self.normal_angle}


def domain_from_spec(spec: dict) -> ConvexDomain:
    """Build a domain from its JSON description (angles in radians, points as [re, im])."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise DomainError("domain spec must be an object with a 'kind' field")
    kind = spec["kind"]
    try:
        if kind == "disk":
            return Disk(_as_complex(spec.get("center", [0, 0])), float(spec.get("radius", 1.0)))
        if kind == "ellipse":
            if "foci" in spec:
                f1, f2 = (_as_complex(f) for f in spec["foci"])
                return Ellipse.from_foci(f1, f2, float(spec["minor_axis"]))
            return Ellipse(
                _as_complex(spec.get("center", [0, 0])),
                float(spec["a"]),
                float(spec["b"]),
                float(spec.get("rotation", 0.0)),
            )
        if kind == "polygon":
            return Polygon(tuple(_as_complex(v) for v in spec["vertices"]))
        if kind == "sector":
            return Sector(
                _as_complex(spec.get("vertex", [0, 0])),
                float(spec.get("bisector", 0.0)),
                float(spec["half_angle"]),
            )
        if kind == "half_plane":
            return HalfPlane(_as_complex(spec.get("point", [0, 0])), float(spec.get("normal_angle", 0.0)))
    except KeyError as exc:
        raise DomainError(f"{kind} spec is missing field {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"malformed {kind} spec: {exc}") from None
    raise DomainError(f"unknown domain kind {kind!r}")


# ---------------------------------------------------------------------------
# support and containment


def support_function(domain: ConvexDomain, t):
    return domain.support(t)


def _ellipse_frame(domain):
    if isinstance(domain, Disk):
        return domain.center, domain.radius, domain.radius, 0.0
    if isinstance(domain, Ellipse):
        return domain.center, domain.a, domain.b, domain.rotation
    raise DomainError(f"{domain.kind} is not a smooth closed curve")


def _ellipse_excess(domain, z, ngrid=1440):
    """max_t Re(exp(-it) z) - h(t) for an ellipse, i.e. minus the signed depth."""
    c, a, b, psi = _ellipse_frame(domain)
    w = (z - c) * np.exp(-1j * psi)

    def f(u):
        return np.real(np.exp(-1j * u) * w) - np.sqrt((a * np.cos(u)) ** 2 + (b * np.sin(u)) ** 2)

    grid = np.linspace(0.0, TWO_PI, ngrid, endpoint=False)
    return refine_max(f, grid)[1]


def contains(domain: ConvexDomain, z, margin: float = 0.0) -> bool:
    """Whether ``Re(exp(-it) z) <= h(t) - margin`` for every direction ``t``."""
    z = complex(z)
    if isinstance(domain, Disk):
        return abs(z - domain.center) <= domain.radius - margin
    if isinstance(domain, Ellipse):
        if margin == 0.0:
            c, a, b, psi = _ellipse_frame(domain)
            w = (z - c) * np.exp(-1j * psi)
            return bool((w.real / a) ** 2 + (w.imag / b) ** 2 <= 1.0)
        return bool(_ellipse_excess(domain, z) <= -margin)
    if isinstance(domain, (Polygon, Sector, HalfPlane)):
        t = domain.edge_normals
        lhs = np.real(np.exp(-1j * t) * z)
        return bool(np.all(lhs <= domain.support(t) - margin))
    raise DomainError(f"unsupported domain {domain!r}")


def _check_interior(domain, omega):
    tol = 1e-12 * (domain.scale if domain.bounded else max(1.0, abs(omega - domain.reference_point())))
    if not contains(domain, omega, margin=tol):
        raise DomainError(f"point {omega} is not strictly inside the {domain.kind}")


# ---------------------------------------------------------------------------
# boundary sampling


@dataclass(frozen=True)
class BoundarySample:
    s: float
    sigma: complex
    theta: float
    nu: complex
    phi: float
    weight: float


@dataclass(frozen=True)
class BoundarySamples:
    """Quadrature nodes on the boundary, stored as parallel arrays.

    ``theta`` is the unwrapped tangent angle, ``phi`` the unwrapped polar angle
    of ``sigma - omega`` and ``edge`` the polygon edge index (-1 on smooth
    curves). ``curvature`` is zero on straight pieces.
    """

    s: np.ndarray
    sigma: np.ndarray
    theta: np.ndarray
    nu: np.ndarray
    phi: np.ndarray
    weight: np.ndarray
    curvature: np.ndarray
    edge: np.ndarray
    omega: complex
    rule: str

    def __len__(self):
        return self.sigma.size

    def __getitem__(self, i) -> BoundarySample:
        return BoundarySample(
            float(self.s[i]),
            complex(self.sigma[i]),
            float(self.theta[i]),
            complex(self.nu[i]),
            float(self.phi[i]),
            float(self.weight[i]),
        )

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @property
    def length(self) -> float:
        return float(self.weight.sum())


def _ellipse_arclength(a, b, t):
    m = 1.0 - (b / a) ** 2
    return a * (ellipeinc(t + math.pi / 2, m) - ellipeinc(math.pi / 2, m))


def _sample_smooth(domain, n, omega):
    c, a, b, psi = _ellipse_frame(domain)
    t = TWO_PI * np.arange(n) / n
    rot = np.exp(1j * psi)
    sigma = c + rot * (a * np.cos(t) + 1j * b * np.sin(t))
    d1 = rot * (-a * np.sin(t) + 1j * b * np.cos(t))
    speed = np.abs(d1)
    tangent = d1 / speed
    nu = -1j * tangent
    nu = nu / np.abs(nu)
    theta = np.unwrap(np.angle(tangent))
    return BoundarySamples(
        s=_ellipse_arclength(a, b, t),
        sigma=sigma,
        theta=theta,
        nu=nu,
        phi=np.unwrap(np.angle(sigma - omega)),
        weight=speed * TWO_PI / n,
        curvature=a * b / speed**3,
        edge=np.full(n, -1),
        omega=omega,
        rule="trapezoid",
    )


def _polygon_panels(nodes_on_edge, order):
    # about half the panels form a uniform grid (so refinement reaches the
    # middle of the edge); the rest grade geometrically into both corners
    panels = max(4, math.ceil(nodes_on_edge / order))
    levels = min(40, max(2, math.ceil(panels / 4)))
    uniform = max(2, panels - 2 * (levels - 1))
    h = 1.0 / uniform
    graded = h * 2.0 ** -np.arange(levels - 1, 0, -1.0)
    breaks = np.concatenate([[0.0], graded, np.linspace(h, 1 - h, uniform - 1), 1 - graded[::-1], [1.0]])
    return composite_gauss(breaks, order)


def _sample_polygon(domain, n, omega, order=16):
    v = domain.vertex_array
    e = np.roll(v, -1) - v
    lengths = np.abs(e)
    total = lengths.sum()
    starts = np.concatenate([[0.0], np.cumsum(lengths)[:-1]])
    if n < 32 * v.size:
        order = 8
    pieces = []
    for k in range(v.size):
        x, w = _polygon_panels(n * lengths[k] / total, order)
        pieces.append((k, x, w))
    sigma = np.concatenate([v[k] + x * e[k] for k, x, _ in pieces])
    weight = np.concatenate([w * lengths[k] for k, _, w in pieces])
    s = np.concatenate([starts[k] + x * lengths[k] for k, x, _ in pieces])
    edge = np.concatenate([np.full(x.size, k) for k, x, _ in pieces])
    tangent = e[edge] / lengths[edge]
    edge_theta = np.unwrap(np.angle(e))
    return BoundarySamples(
        s=s,
        sigma=sigma,
        theta=edge_theta[edge],
        nu=-1j * tangent,
        phi=np.unwrap(np.angle(sigma - omega)),
        weight=weight,
        curvature=np.zeros(sigma.size),
        edge=edge,
        omega=omega,
        rule="gauss-legendre panels",
    )


def _ray_rule(n_ray, radius, order=16, levels=None):
    """Gauss nodes on [0, radius], panels halving toward 0."""
    panels = max(1, math.ceil(n_ray / order))
    levels = levels or panels
    breaks = radius * np.concatenate([[0.0], 2.0 ** -np.arange(levels - 1, -1, -1.0)])
    return composite_gauss(breaks, order)


def _sample_sector(sector, n, omega, truncation):
    alpha, beta = sector.half_angle, sector.bisector
    rho, w = _ray_rule(n // 2, truncation)
    up = np.exp(1j * (beta + alpha))
    lo = np.exp(1j * (beta - alpha))
    # upper ray traversed inward, lower ray outward
    sigma = np.concatenate([sector.vertex + rho[::-1] * up, sector.vertex + rho * lo])
    tangent = np.concatenate([np.full(rho.size, -up), np.full(rho.size, lo)])
    theta = np.concatenate(
        [np.full(rho.size, beta + alpha + math.pi), np.full(rho.size, beta - alpha + TWO_PI)]
    )
    s = np.concatenate([truncation - rho[::-1], truncation + rho])
    return BoundarySamples(
        s=s,
        sigma=sigma,
        theta=theta,
        nu=-1j * tangent,
        phi=np.unwrap(np.angle(sigma - omega)),
        weight=np.concatenate([w[::-1], w]),
        curvature=np.zeros(sigma.size),
        edge=np.concatenate([np.zeros(rho.size, int), np.ones(rho.size, int)]),
        omega=omega,
        rule="gauss-legendre rays",
    )


def _sample_halfplane(hp, n, omega, truncation):
    tangent = -1j * np.exp(1j * hp.normal_angle)
    x, w = composite_gauss(np.linspace(-truncation, truncation, max(2, n // 16) + 1), 16)
    sigma = hp.point + x * tangent
    return BoundarySamples(
        s=x + truncation,
        sigma=sigma,
        theta=np.full(x.size, float(np.angle(tangent))),
        nu=np.full(x.size, -1j * tangent),
        phi=np.unwrap(np.angle(sigma - omega)),
        weight=w,
        curvature=np.zeros(x.size),
        edge=np.zeros(x.size, int),
        omega=omega,
        rule="gauss-legendre line",
    )


def sample_boundary(domain: ConvexDomain, n: int = 1024, omega=None, truncation=None) -> BoundarySamples:
    """Sample the counterclockwise boundary with quadrature weights.

    Smooth curves use the periodic trapezoid rule in the natural angle
    parameter; polygons use Gauss-Legendre panels graded toward the corners,
    so the exact node count may differ slightly from ``n``. Sectors and half
    planes need a ``truncation`` radius and return only the boundary inside it.
    """
    if n < 16:
        raise DomainError("need at least 16 boundary samples")
    omega = domain.reference_point() if omega is None else complex(omega)
    _check_interior(domain, omega)
    if isinstance(domain, (Disk, Ellipse)):
        return _sample_smooth(domain, n, omega)
    if isinstance(domain, Polygon):
        return _sample_polygon(domain, n, omega)
    if truncation is None or not truncation > 0:
        raise DomainError(f"sampling a {domain.kind} needs a positive truncation radius")
    if isinstance(domain, Sector):
        return _sample_sector(domain, n, omega, float(truncation))
    return _sample_halfplane(domain, n, omega, float(truncation))


def boundary_curve(domain: ConvexDomain, u):
    """Boundary point at curve parameter ``u`` in [0, 1).

    For sectors and half planes ``u`` is mapped onto the whole boundary line,
    with ``u = 0`` at infinity.
    """
    u = np.asarray(u, dtype=float)
    if isinstance(domain, (Disk, Ellipse)):
        c, a, b, psi = _ellipse_frame(domain)
        t = TWO_PI * u
        return c + np.exp(1j * psi) * (a * np.cos(t) + 1j * b * np.sin(t))
    if isinstance(domain, Polygon):
        v = domain.vertex_array
        m = v.size
        x = np.mod(u, 1.0) * m
        k = np.minimum(np.floor(x).astype(int), m - 1)
        frac = x - k
        return v[k] + frac * (np.roll(v, -1)[k] - v[k])
    if isinstance(domain, HalfPlane):
        domain = domain.as_sector()
    if isinstance(domain, Sector):
        # u in (0, 1/2): upper ray inward; (1/2, 1): lower ray outward
        x = np.mod(u, 1.0)
        with np.errstate(divide="ignore"):
            r_up = np.tan(np.pi * (0.5 - x))
            r_lo = np.tan(np.pi * (x - 0.5))
        up = domain.vertex + r_up * np.exp(1j * (domain.bisector + domain.half_angle))
        lo = domain.vertex + r_lo * np.exp(1j * (domain.bisector - domain.half_angle))
        return np.where(x < 0.5, up, lo)
    raise DomainError(f"unsupported domain {domain!r}")


# ---------------------------------------------------------------------------
# shape functionals


@dataclass(frozen=True)
class DomainMetrics:
    perimeter: float
    diameter: float
    area: float
    r_three_point: float
    tau: float
    phi_tv: float
    tv_center: complex
    tau_center: complex
    resolution: int

    def as_dict(self) -> dict:
        return {
            "perimeter": self.perimeter,
            "diameter": self.diameter,
            "area": self.area,
            "r_three_point": self.r_three_point,
            "tau": self.tau,
            "phi_tv": self.phi_tv,
            "tv_center": _pair(self.tv_center),
            "tau_center": _pair(self.tau_center),
            "resolution": self.resolution,
        }


def _require_bounded(domain):
    if not domain.bounded:
        raise DomainError(f"{domain.kind} is unbounded; only angle data is available")


def _radial_critical(domain, omega, n):
    """Critical points of t -> |sigma(t) - omega| on an ellipse.

    Returns the log-distances at the critical points in cyclic order.
    """
    c, a, b, psi = _ellipse_frame(domain)
    w = (omega - c) * np.exp(-1j * psi)
    x0, y0 = w.real, w.imag

    def g(t):
        dx = a * np.cos(t) - x0
        dy = b * np.sin(t) - y0
        return -a * np.sin(t) * dx + b * np.cos(t) * dy

    def logrho(t):
        return 0.5 * np.log((a * np.cos(t) - x0) ** 2 + (b * np.sin(t) - y0) ** 2)

    t = TWO_PI * np.arange(n) / n
    gv = g(t)
    sg = np.sign(gv)
    nxt = np.roll(sg, -1)
    idx = np.nonzero(sg * nxt < 0)[0]
    roots = bisect_roots(g, t[idx], t[idx] + TWO_PI / n)
    crit = np.sort(np.concatenate([t[sg == 0], np.mod(roots, TWO_PI)]))
    if crit.size == 0:
        return logrho(t[:1])
    return logrho(crit)


def tv_log(domain: ConvexDomain, omega=None, n: int = 1024) -> float:
    """Total variation of ``log|sigma - omega|`` once around the boundary.

    On smooth curves the variation is summed between the critical points of
    the distance, located by bracketing on an ``n``-point grid and bisection;
    ``n`` doubles until two successive values agree to 1e-8. Polygons use the
    exact per-edge formula.
    """
    _require_bounded(domain)
    omega = domain.reference_point() if omega is None else complex(omega)
    _check_interior(domain, omega)
    return _tv_unchecked(domain, omega, n)[0]


def _tv_unchecked(domain, omega, n=1024, converge=True):
    if isinstance(domain, Polygon):
        return _polygon_tv(domain, omega), 0
    prev = None
    while True:
        vals = _radial_critical(domain, omega, n)
        tv = float(np.abs(np.diff(np.append(vals, vals[0]))).sum())
        if not converge or (prev is not None and abs(tv - prev) < 1e-8) or n >= 1 << 16:
            return tv, n
        prev = tv
        n *= 2


def _polygon_tv(domain, omega):
    p = domain.vertex_array - omega
    q = np.roll(p, -1)
    e = q - p
    tau = -np.real(np.conj(e) * p) / np.abs(e) ** 2
    foot = p + np.clip(tau, 0.0, 1.0) * e
    lp, lq, lf = np.log(np.abs(p)), np.log(np.abs(q)), np.log(np.abs(foot))
    inside = (tau > 0) & (tau < 1)
    return float(np.where(inside, np.abs(lq - lf) + np.abs(lf - lp), np.abs(lq - lp)).sum())


def _distance_ratio(domain, omega, n=1024):
    if isinstance(domain, Polygon):
        p = domain.vertex_array - omega
        e = np.roll(p, -1) - p
        tau = np.clip(-np.real(np.conj(e) * p) / np.abs(e) ** 2, 0.0, 1.0)
        return float(np.abs(p).max() / np.abs(p + tau * e).min())
    vals = _radial_critical(domain, omega, n)
    return float(np.exp(vals.max() - vals.min()))


def _normal_frame(domain):
    """Return (normalized domain, lam, beta) with domain = lam * normalized + beta."""
    if isinstance(domain, Disk):
        return Disk(0j, domain.radius), 1.0 + 0j, domain.center
    if isinstance(domain, Ellipse):
        return Ellipse(0j, domain.a, domain.b, 0.0), np.exp(1j * domain.rotation), domain.center
    if isinstance(domain, Polygon):
        beta = domain.reference_point()
        return domain.transformed(1.0, -beta), 1.0 + 0j, beta
    raise DomainError(f"{domain.kind} has no interior optimizer")


def interior_grid(domain: ConvexDomain, size: int = 21) -> np.ndarray:
    """Deterministic seed grid inside a 0.9-shrunk copy of the domain."""
    _require_bounded(domain)
    nd, lam, beta = _normal_frame(domain)
    if isinstance(nd, Polygon):
        v = nd.vertex_array
        xs = np.linspace(v.real.min(), v.real.max(), size)
        ys = np.linspace(v.imag.min(), v.imag.max(), size)
    else:
        _, a, b, _ = _ellipse_frame(nd)
        xs = np.linspace(-1.0, 1.0, size) * a
        ys = np.linspace(-1.0, 1.0, size) * b
    pts = (xs[None, :] + 1j * ys[:, None]).ravel()
    shrunk = nd.transformed(0.9, 0.0)
    keep = [z for z in pts if contains(shrunk, z)]
    return lam * np.array(keep) + beta


def _minimize_interior(domain, objective):
    nd, lam, beta = _normal_frame(domain)
    delta = nd.scale
    seeds = (interior_grid(domain) - beta) / lam
    values = np.array([objective(nd, z) for z in seeds])
    order = sorted(range(seeds.size), key=lambda i: (values[i], seeds[i].real, seeds[i].imag))
    best = seeds[order[0]]
    best_val = float(values[order[0]])
    step = 0.5 * delta / 21
    margin = 1e-12 * delta

    def f(x):
        z = complex(x[0], x[1])
        if not contains(nd, z, margin):
            return 1e10
        return objective(nd, z)

    start = np.array([best.real, best.imag])
    simplex = np.array([start, start + [step, 0.0], start + [0.0, step]])
    res = minimize(
        f,
        start,
        method="Nelder-Mead",
        options={
            "initial_simplex": simplex,
            "xatol": 1e-9 * delta,
            "fatol": 1e-15,
            "maxiter": 4000,
            "maxfev": 8000,
        },
    )
    if res.fun <= best_val:
        best = complex(res.x[0], res.x[1])
    return lam * best + beta, seeds.size


def optimal_tv_center(domain: ConvexDomain):
    """Interior point minimizing ``tv_log`` and the minimum value ``phi``.

    A 21x21 seed grid is followed by Nelder-Mead refinement, so the result is a
    local minimizer no worse than any grid seed.
    """
    _require_bounded(domain)
    omega, _ = _minimize_interior(domain, lambda d, z: _tv_unchecked(d, z, converge=False)[0])
    return omega, _tv_unchecked(domain, omega)[0]


def flatness_tau(domain: ConvexDomain):
    """Minimum over interior points of max/min boundary distance.

    Returns ``(tau, minimizer)``.
    """
    _require_bounded(domain)
    omega, _ = _minimize_interior(domain, _distance_ratio)
    return _distance_ratio(domain, omega, n=4096), omega


@lru_cache(maxsize=256)
def metrics(domain: ConvexDomain) -> DomainMetrics:
    _require_bounded(domain)
    if isinstance(domain, Disk):
        r = domain.radius
        perimeter, diameter, area, r3 = TWO_PI * r, 2 * r, math.pi * r * r, r
    elif isinstance(domain, Ellipse):
        a, b = domain.a, domain.b
        perimeter = 4 * a * ellipe(1 - (b / a) ** 2)
        diameter, area, r3 = 2 * a, math.pi * a * b, a * a / b
    else:
        v = domain.vertex_array
        e = np.roll(v, -1) - v
        perimeter = float(np.abs(e).sum())
        diameter = domain.scale
        area = 0.5 * float(np.imag(np.conj(v) * np.roll(v, -1)).sum())
        r3 = math.inf
    omega, _ = _minimize_interior(domain, lambda d, z: _tv_unchecked(d, z, converge=False)[0])
    phi, res = _tv_unchecked(domain, omega)
    tau, tau_center = flatness_tau(domain)
    return DomainMetrics(
        perimeter=float(perimeter),
        diameter=float(diameter),
        area=float(area),
        r_three_point=float(r3),
        tau=float(tau),
        phi_tv=float(phi),
        tv_center=complex(omega),
        tau_center=complex(tau_center),
        resolution=int(res),
    )
