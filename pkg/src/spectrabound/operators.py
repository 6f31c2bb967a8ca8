"""Dense complex matrices: numerical range, the double-layer kernel and rational calculus."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.polynomial import polynomial as npoly

from .geometry import (
    ConvexDomain,
    DomainError,
    HalfPlane,
    Polygon,
    Sector,
    boundary_curve,
    metrics,
    sample_boundary,
)
from .quadrature import composite_gauss, refine_max

__all__ = [
    "NumericalError",
    "PoleError",
    "RationalFunction",
    "MatrixRational",
    "trial_rng",
    "numerical_range_support",
    "numerical_radius",
    "numerical_range_boundary",
    "wa_contained",
    "random_matrix_in_domain",
    "mu_matrix",
    "mu_integral",
    "mu_boundary_integral",
    "operator_norm",
    "apply_rational",
    "boundary_sup",
    "matrix_from_json",
    "matrix_to_json",
]

DEFAULT_ANGLES = 720


class NumericalError(RuntimeError):
    """Ill-conditioned solve, singular resolvent or eigensolver failure."""


class PoleError(ValueError):
    """A pole of a rational function lies in the closed numerical range."""


def trial_rng(*keys: int) -> np.random.Generator:
    """Counter-based generator keyed by integers, independent of call order."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(k) for k in keys])))


def matrix_to_json(A) -> list:
    A = np.asarray(A, dtype=complex)
    return [[[float(x.real), float(x.imag)] for x in row] for row in A]


def matrix_from_json(rows) -> np.ndarray:
    A = np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    return A


# ---------------------------------------------------------------------------
# rational functions


@dataclass(frozen=True)
class RationalFunction:
    """``num(z) / den(z)`` with coefficient lists in ascending degree order."""

    num: tuple
    den: tuple = (1.0,)
    sup_on_domain: float | None = field(default=None, compare=False)

    def __post_init__(self):
        num = np.trim_zeros(np.asarray(self.num, dtype=complex), "b")
        den = np.trim_zeros(np.asarray(self.den, dtype=complex), "b")
        if den.size == 0:
            raise ValueError("denominator is identically zero")
        if num.size == 0:
            num = np.zeros(1, dtype=complex)
        object.__setattr__(self, "num", tuple(num))
        object.__setattr__(self, "den", tuple(den))

    @classmethod
    def from_roots(cls, zeros=(), poles=(), gain=1.0) -> "RationalFunction":
        num = gain * npoly.polyfromroots(list(zeros)) if len(zeros) else np.array([gain])
        den = npoly.polyfromroots(list(poles)) if len(poles) else np.array([1.0])
        return cls(tuple(num), tuple(den))

    @classmethod
    def constant(cls, c) -> "RationalFunction":
        return cls((complex(c),))

    @classmethod
    def identity(cls) -> "RationalFunction":
        return cls((0.0, 1.0))

    @cached_property
    def poles(self) -> np.ndarray:
        if len(self.den) == 1:
            return np.zeros(0, dtype=complex)
        return npoly.polyroots(np.array(self.den))

    @property
    def degree(self) -> int:
        return max(len(self.num), len(self.den)) - 1

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return npoly.polyval(z, np.array(self.num)) / npoly.polyval(z, np.array(self.den))

    def at_infinity(self) -> complex:
        if len(self.num) > len(self.den):
            return complex(np.inf)
        if len(self.num) < len(self.den):
            return 0j
        return complex(self.num[-1] / self.den[-1])

    def scaled(self, c) -> "RationalFunction":
        return RationalFunction(tuple(np.array(self.num) * c), self.den)

    def __add__(self, other):
        n1, d1, n2, d2 = map(np.array, (self.num, self.den, other.num, other.den))
        return RationalFunction(
            tuple(npoly.polyadd(npoly.polymul(n1, d2), npoly.polymul(n2, d1))),
            tuple(npoly.polymul(d1, d2)),
        )

    def __mul__(self, other):
        return RationalFunction(
            tuple(npoly.polymul(np.array(self.num), np.array(other.num))),
            tuple(npoly.polymul(np.array(self.den), np.array(other.den))),
        )

    def compose_affine(self, a, b) -> "RationalFunction":
        """``z -> r(a z + b)``."""
        lin = np.array([complex(b), complex(a)])

        def comp(coeffs):
            out = np.zeros(1, dtype=complex)
            for c in reversed(coeffs):
                out = npoly.polyadd(npoly.polymul(out, lin), [c])
            return tuple(out)

        return RationalFunction(comp(self.num), comp(self.den))

    def normalized(self, domain: ConvexDomain, n: int = 8192) -> "RationalFunction":
        """Copy scaled so that its boundary supremum over ``domain`` is 1."""
        sup = boundary_sup(self, domain, n)
        if sup == 0:
            raise ValueError("cannot normalize the zero function")
        out = self.scaled(1.0 / sup)
        object.__setattr__(out, "sup_on_domain", 1.0)
        return out

    def to_json(self) -> dict:
        return {
            "num": [[float(c.real), float(c.imag)] for c in self.num],
            "den": [[float(c.real), float(c.imag)] for c in self.den],
        }

    @classmethod
    def from_json(cls, obj) -> "RationalFunction":
        def coeffs(seq):
            return tuple(complex(*c) if isinstance(c, (list, tuple)) else complex(c) for c in seq)

        return cls(coeffs(obj["num"]), coeffs(obj.get("den", [1.0])))


@dataclass(frozen=True)
class MatrixRational:
    """Matrix-valued rational function with scalar rational entries."""

    entries: tuple  # tuple of rows of RationalFunction

    @property
    def shape(self):
        return len(self.entries), len(self.entries[0])

    @property
    def poles(self) -> np.ndarray:
        ps = [r.poles for row in self.entries for r in row]
        return np.concatenate(ps) if ps else np.zeros(0, dtype=complex)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        m, n = self.shape
        out = np.empty(z.shape + (m, n), dtype=complex)
        for i, row in enumerate(self.entries):
            for j, r in enumerate(row):
                out[..., i, j] = r(z)
        return out

    def scaled(self, c) -> "MatrixRational":
        return MatrixRational(tuple(tuple(r.scaled(c) for r in row) for row in self.entries))

    def normalized(self, domain, n=8192) -> "MatrixRational":
        return self.scaled(1.0 / boundary_sup(self, domain, n))


def _value_norm(f, z):
    vals = f(z)
    if vals.ndim > np.ndim(z):
        return np.linalg.norm(vals, ord=2, axis=(-2, -1))
    return np.abs(vals)


def boundary_sup(f, domain: ConvexDomain, n: int = 8192, tol: float = 1e-8) -> float:
    """Supremum of ``|f|`` (spectral norm for matrix values) over the boundary.

    By the maximum principle this is the supremum over the closed domain for
    functions holomorphic there. Grid maxima are polished locally and the grid
    is doubled until the value changes by less than ``tol`` (relative).
    """

    def g(u):
        # a pole on the boundary shows up as inf/nan and is reported below
        with np.errstate(divide="ignore", invalid="ignore"):
            return _value_norm(f, boundary_curve(domain, u))

    extra = 0.0
    if not domain.bounded:
        inf_val = f.at_infinity() if isinstance(f, RationalFunction) else None
        if inf_val is not None:
            extra = abs(inf_val)

    def one(m):
        # the u=0 node of unbounded boundaries is the point at infinity
        grid = (np.arange(m) + (0.0 if domain.bounded else 0.5)) / m
        return max(refine_max(g, grid)[1], extra)

    prev = one(n)
    if not math.isfinite(prev):
        raise PoleError("function is unbounded on the boundary")
    for _ in range(4):
        cur = one(2 * n)
        if abs(cur - prev) <= tol * max(abs(cur), 1e-300):
            return float(max(cur, prev))
        prev, n = cur, 2 * n
    return float(prev)


# ---------------------------------------------------------------------------
# numerical range


def numerical_range_support(A, angles) -> np.ndarray:
    """``lambda_max`` of the Hermitian part of ``exp(-it) A`` for each angle."""
    A = np.asarray(A, dtype=complex)
    t = np.atleast_1d(np.asarray(angles, dtype=float))
    rot = np.exp(-1j * t)[:, None, None] * A[None]
    herm = 0.5 * (rot + np.conj(np.swapaxes(rot, -1, -2)))
    try:
        lam = np.linalg.eigvalsh(herm)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"Hermitian eigensolver failed: {exc}") from exc
    out = lam[:, -1]
    return out if np.ndim(angles) else out[0]


def numerical_radius(A, n_angles: int = DEFAULT_ANGLES) -> float:
    """``max |z|`` over the numerical range, i.e. ``max_t h_A(t)``."""
    grid = 2 * math.pi * np.arange(n_angles) / n_angles
    return float(refine_max(lambda t: numerical_range_support(A, t), grid)[1])


def numerical_range_boundary(A, n: int = 512) -> np.ndarray:
    """Boundary points ``x* A x`` for top eigenvectors of the rotated Hermitian parts."""
    A = np.asarray(A, dtype=complex)
    t = 2 * math.pi * np.arange(n) / n
    rot = np.exp(-1j * t)[:, None, None] * A[None]
    herm = 0.5 * (rot + np.conj(np.swapaxes(rot, -1, -2)))
    _, vecs = np.linalg.eigh(herm)
    x = vecs[:, :, -1]
    return np.einsum("ki,ij,kj->k", np.conj(x), A, x)


def _constraint_angles(domain, n_angles):
    if isinstance(domain, (Polygon, Sector, HalfPlane)):
        return np.asarray(domain.edge_normals, dtype=float), True
    return 2 * math.pi * np.arange(n_angles) / n_angles, False


def _slack(A, domain, t, margin):
    return domain.support(t) - margin - numerical_range_support(A, t)


def wa_contained(A, domain: ConvexDomain, margin: float = 0.0, n_angles: int = DEFAULT_ANGLES) -> bool:
    """Whether ``h_A(t) <= h_domain(t) - margin`` in every direction.

    Polygons, sectors and half planes are decided exactly from the edge normals.
    Smooth domains use an angle grid that is doubled while the slack is within
    ten margins of failing, then polished at the worst angle.
    """
    A = np.asarray(A, dtype=complex)
    atol = 1e-12 * max(1.0, domain.scale, float(np.abs(A).max(initial=0.0)))
    t, exact = _constraint_angles(domain, n_angles)
    slack = _slack(A, domain, t, margin)
    if exact:
        return bool(slack.min() >= -atol)
    for _ in range(3):
        if slack.min() > 10 * abs(margin) + atol:
            break
        n_angles *= 2
        t = 2 * math.pi * np.arange(n_angles) / n_angles
        slack = _slack(A, domain, t, margin)
    worst = refine_max(lambda u: -_slack(A, domain, u, margin), t)[1]
    return bool(-worst >= -atol and slack.min() >= -atol)


def _anchor(domain):
    # disks and ellipses are centrally symmetric: their centre is the TV centre
    if isinstance(domain, Polygon):
        return metrics(domain).tv_center
    return domain.reference_point()


def random_matrix_in_domain(
    domain: ConvexDomain, dim: int, seed, margin: float = 1e-3, fill: float = 1.0
) -> np.ndarray:
    """Random matrix whose numerical range lies in ``domain`` shrunk by ``margin``.

    A complex Gaussian matrix is centred at its trace mean, then scaled about
    the anchor point (optimal TV centre, or a point on the sector bisector) as
    far as the margin-deflated domain allows; ``fill`` < 1 shrinks it further.
    ``seed`` is an int or a tuple of ints fed to :func:`trial_rng`.
    """
    if not margin > 0:
        raise ValueError("margin must be positive")
    keys = seed if isinstance(seed, tuple) else (seed,)
    rng = trial_rng(*keys)
    G = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    G0 = G - (np.trace(G) / dim) * np.eye(dim)
    anchor = _anchor(domain)
    t, _ = _constraint_angles(domain, DEFAULT_ANGLES)
    room = domain.support(t) - margin - np.real(np.exp(-1j * t) * anchor)
    if np.any(room <= 0):
        raise DomainError("margin leaves no room around the anchor point")
    h = numerical_range_support(G0, t)
    pos = h > 1e-14 * max(1.0, float(np.abs(G0).max(initial=0.0)))
    scale = fill * float((room[pos] / h[pos]).min()) if np.any(pos) else 0.0
    eye = np.eye(dim)
    A = anchor * eye + scale * G0
    for _ in range(200):
        if wa_contained(A, domain, margin):
            return A
        scale *= 0.995
        A = anchor * eye + scale * G0
    raise NumericalError("could not place the numerical range inside the domain")


# ---------------------------------------------------------------------------
# double-layer kernel


def mu_matrix(sample, A) -> np.ndarray:
    """``(nu (sigma - A)^-1 + conj(nu) (conj(sigma) - A*)^-1) / (2 pi)``.

    ``sample`` is a :class:`~spectrabound.geometry.BoundarySample` or a
    ``(sigma, nu)`` pair.
    """
    sigma, nu = (sample.sigma, sample.nu) if hasattr(sample, "sigma") else sample
    return _mu_batch(np.array([sigma]), np.array([nu]), A)[0]


def _mu_batch(sigma, nu, A):
    A = np.asarray(A, dtype=complex)
    d = A.shape[0]
    eye = np.eye(d)
    shifted = sigma[:, None, None] * eye[None] - A[None]
    try:
        res = np.linalg.inv(shifted)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("boundary point lies in the spectrum") from exc
    M = nu[:, None, None] * res
    return (M + np.conj(np.swapaxes(M, -1, -2))) / (2 * math.pi)


def _ray_nodes(truncation, n_ray, order=16):
    """Gauss nodes on [0, inf): geometric panels on [0, R] plus the inverted tail."""
    panels = max(8, n_ray // order)
    breaks = np.concatenate([[0.0], np.geomspace(truncation * 1e-10, truncation, panels)])
    x, w = composite_gauss(breaks, order)
    # tail rho = R / u, u in (0, 1]; the integrand is O(1/R) there
    u, wu = composite_gauss(np.array([0.0, 0.5, 1.0]), order)
    return np.concatenate([x, truncation / u]), np.concatenate([w, wu * truncation / u**2])


def sector_rays(sector: Sector, truncation: float = 1e4, n: int = 1024):
    """Quadrature on both rays of a sector out to infinity.

    Returns ``(sigma, nu, weight)``; the far tail beyond ``truncation`` is
    integrated exactly through the substitution ``rho = truncation / u``.
    """
    if isinstance(sector, HalfPlane):
        sector = sector.as_sector()
    rho, w = _ray_nodes(truncation, n // 2)
    up = np.exp(1j * (sector.bisector + sector.half_angle))
    lo = np.exp(1j * (sector.bisector - sector.half_angle))
    sigma = np.concatenate([sector.vertex + rho * up, sector.vertex + rho * lo])
    nu = np.concatenate([np.full(rho.size, 1j * up), np.full(rho.size, -1j * lo)])
    return sigma, nu, np.concatenate([w, w])


def _mu_fixed(A, domain, n, truncation):
    if domain.bounded:
        smp = sample_boundary(domain, n)
        sigma, nu, w = smp.sigma, smp.nu, smp.weight
    else:
        sigma, nu, w = sector_rays(domain, truncation, n)
    mu = _mu_batch(sigma, nu, A)
    return np.einsum("k,kij->ij", w, mu)


def mu_integral(A, domain: ConvexDomain, n: int | None = None, truncation: float = 1e4,
                tol: float = 1e-12, max_nodes: int = 1 << 18) -> np.ndarray:
    """Quadrature of ``mu(sigma, A) ds`` over the whole boundary.

    With ``n`` given the rule is fixed.  Otherwise the node count starts at
    1024 (bounded) or 4096 (sector rays) and doubles until two successive
    results agree to ``tol``: the kernel is resolved only once the node
    spacing is small compared with the gap between ``W(A)`` and the boundary.
    """
    A = np.asarray(A, dtype=complex)
    if n is not None:
        return _mu_fixed(A, domain, n, truncation)
    n = 1024 if domain.bounded else 4096
    prev = _mu_fixed(A, domain, n, truncation)
    while n < max_nodes:
        n *= 2
        cur = _mu_fixed(A, domain, n, truncation)
        if np.linalg.norm(cur - prev, 2) < tol:
            return cur
        prev = cur
    return prev


def mu_boundary_integral(A, domain: ConvexDomain, n: int | None = None, truncation: float = 1e4, check: bool = True) -> float:
    """Distance ``||int mu(sigma, A) ds - c I||`` with ``c = 2`` or ``2 - 2 alpha / pi``."""
    A = np.asarray(A, dtype=complex)
    if check and not wa_contained(A, domain, 0.0):
        raise DomainError("numerical range is not contained in the domain")
    target = 2.0 if domain.bounded else 2.0 - 2.0 * domain.half_angle / math.pi
    total = mu_integral(A, domain, n, truncation)
    return float(np.linalg.norm(total - target * np.eye(A.shape[0]), 2))


# ---------------------------------------------------------------------------
# norms and functional calculus


def operator_norm(A) -> float:
    """Largest singular value."""
    return float(np.linalg.norm(np.asarray(A, dtype=complex), 2))


def _horner(coeffs, A):
    d = A.shape[0]
    out = np.zeros((d, d), dtype=complex)
    eye = np.eye(d)
    for c in reversed(coeffs):
        out = out @ A + c * eye
    return out


def _poles_outside_range(poles, A, n_angles=DEFAULT_ANGLES):
    if len(poles) == 0:
        return True
    t = 2 * math.pi * np.arange(n_angles) / n_angles
    h = numerical_range_support(A, t)
    for p in poles:
        gap = np.real(np.exp(-1j * t) * p) - h
        if gap.max() <= 1e-12 * max(1.0, abs(p)):
            return False
    return True


def apply_rational(r, A, cond_limit: float = 1e12, check_poles: bool = True) -> np.ndarray:
    """Evaluate ``r(A) = p(A) q(A)^-1`` (block matrix for matrix-valued ``r``)."""
    A = np.asarray(A, dtype=complex)
    if isinstance(r, MatrixRational):
        if check_poles and not _poles_outside_range(r.poles, A):
            raise PoleError("a pole lies in the closed numerical range")
        return np.block([[apply_rational(e, A, cond_limit, False) for e in row] for row in r.entries])
    if check_poles and not _poles_outside_range(r.poles, A):
        raise PoleError("a pole lies in the closed numerical range")
    P = _horner(r.num, A)
    if len(r.den) == 1:
        return P / r.den[0]
    Q = _horner(r.den, A)
    cond = np.linalg.cond(Q)
    if not cond < cond_limit:
        raise NumericalError(f"denominator matrix condition number {cond:.3e} exceeds {cond_limit:.0e}")
    return np.linalg.solve(Q, P)
