"""Randomized checks of ``||r(A)|| <= K sup |r|`` against the computed certificates."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .bounds import BoundCertificate, certificate
from .geometry import ConvexDomain, Disk, HalfPlane, boundary_curve, domain_from_spec
from .operators import (
    RationalFunction,
    apply_rational,
    matrix_to_json,
    numerical_radius,
    operator_norm,
    random_matrix_in_domain,
    trial_rng,
)

__all__ = [
    "TrialConfig",
    "TrialRecord",
    "TrialReport",
    "random_rational",
    "run_trials",
    "disk_attainment",
    "PowerReport",
    "power_inequality_trials",
    "VIOLATION_RTOL",
]

VIOLATION_RTOL = 1e-6


@dataclass(frozen=True)
class TrialConfig:
    """Parameters of a randomized certificate check.

    ``trials`` is the number of trials per matrix dimension; ``margin`` is
    relative to the domain scale.
    """

    domain: object
    dims: tuple = (2, 3, 4, 5, 6, 7, 8)
    trials: int = 30
    degrees: tuple = (1, 2, 3)
    seed: int = 0
    margin: float = 1e-3
    density: int = 8192
    inject_attainment: bool = True
    constant_kind: str = "C_cb"

    def __post_init__(self):
        if isinstance(self.domain, dict):
            object.__setattr__(self, "domain", domain_from_spec(self.domain))
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "degrees", tuple(int(d) for d in self.degrees))
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.margin > 0:
            raise ValueError("margin must be positive")
        if not self.dims or min(self.dims) < 1:
            raise ValueError("dimensions must be positive")
        if not self.degrees or min(self.degrees) < 0:
            raise ValueError("degrees must be nonnegative")

    def as_dict(self) -> dict:
        d = asdict(self)
        d["domain"] = self.domain.to_spec()
        d["dims"] = list(self.dims)
        d["degrees"] = list(self.degrees)
        return d


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    dim: int
    degree: int
    seed: tuple
    ratio: float
    function: dict = field(default_factory=dict, compare=False)


@dataclass
class TrialReport:
    """Outcome of :func:`run_trials`. ``max_ratio`` is a lower estimate of the constant."""

    config: TrialConfig
    certificate: BoundCertificate
    records: list
    max_ratio: float
    argmax: dict
    violations: list
    runtime_s: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self, include_records: bool = False) -> dict:
        out = {
            "config": self.config.as_dict(),
            "certificate": self.certificate.as_dict(),
            "n_trials": len(self.records),
            "max_ratio": self.max_ratio,
            "argmax": self.argmax,
            "violations": self.violations,
            "runtime_s": self.runtime_s,
        }
        if include_records:
            out["records"] = [
                {"trial": r.trial, "dim": r.dim, "degree": r.degree, "seed": list(r.seed), "ratio": r.ratio}
                for r in self.records
            ]
        return out

    def to_json(self, **kw) -> str:
        return json.dumps(self.as_dict(**kw), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "dim", "degree", "seed", "ratio", "certificate"])
        for r in self.records:
            w.writerow([r.trial, r.dim, r.degree, "-".join(map(str, r.seed)), repr(r.ratio), repr(self.certificate.value)])
        return buf.getvalue()


# ---------------------------------------------------------------------------
# test functions


def _random_poles(domain, count, rng):
    if domain.bounded:
        # beyond twice the distance to the boundary along a random ray:
        # outside the 2x dilation of the domain about its reference point
        c = domain.reference_point()
        u = rng.uniform(0.0, 1.0, count)
        t = rng.uniform(2.0, 4.0, count)
        return c + t * (boundary_curve(domain, u) - c)
    sec = domain.as_sector() if isinstance(domain, HalfPlane) else domain
    gap = math.pi - sec.half_angle
    # directions in the complementary cone, kept away from its edges
    phi = sec.bisector + sec.half_angle + gap * rng.uniform(0.25, 1.75, count)
    rad = rng.uniform(0.5, 3.0, count)
    return sec.vertex + rad * np.exp(1j * phi)


def random_rational(domain: ConvexDomain, degree: int, seed, density: int = 8192) -> RationalFunction:
    """Random ``p/q`` of equal degrees with poles well outside ``domain``, scaled to boundary sup 1."""
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    keys = seed if isinstance(seed, tuple) else (seed,)
    rng = trial_rng(*keys)
    num = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
    if degree == 0:
        r = RationalFunction((complex(num[0]),))
    else:
        poles = _random_poles(domain, degree, rng)
        r = RationalFunction(tuple(num), tuple(np.polynomial.polynomial.polyfromroots(poles)))
    return r.normalized(domain, density)


# ---------------------------------------------------------------------------
# trials


def _one_trial(args):
    domain, dim, idx, seed, degrees, margin, density = args
    rng = trial_rng(seed, dim, idx)
    degree = int(degrees[rng.integers(len(degrees))])
    A = random_matrix_in_domain(domain, dim, (seed, dim, idx, 1), margin=margin * _scale(domain))
    r = random_rational(domain, degree, (seed, dim, idx, 2), density)
    ratio = operator_norm(apply_rational(r, A))
    return TrialRecord(idx, dim, degree, (seed, dim, idx), ratio, r.to_json())


def _scale(domain):
    return domain.scale if domain.bounded else 1.0


def _attainment_record(domain: Disk, dim):
    d = max(dim, 2)
    A = domain.center * np.eye(d, dtype=complex)
    A[0, 1] += 2.0 * domain.radius
    r = RationalFunction((-domain.center / domain.radius, 1.0 / domain.radius))
    ratio = operator_norm(apply_rational(r, A, check_poles=False))
    return TrialRecord(-1, d, 1, (-1, d, -1), ratio, {"attainment": True, **r.to_json()})


def run_trials(config: TrialConfig, workers: int = 1) -> TrialReport:
    """Random matrices in the domain against random normalized rationals.

    Each trial draws its own generator from ``(seed, dim, index)`` so results
    do not depend on ordering or on ``workers``.  A ratio exceeding the
    certificate by more than ``VIOLATION_RTOL`` (relative) is a violation.
    """
    start = time.perf_counter()
    domain = config.domain
    cert = certificate(domain, config.constant_kind)
    jobs = [
        (domain, dim, idx, config.seed, config.degrees, config.margin, config.density)
        for dim in config.dims
        for idx in range(config.trials)
    ]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            records = list(pool.map(_one_trial, jobs, chunksize=8))
    else:
        records = [_one_trial(j) for j in jobs]
    if config.inject_attainment and isinstance(domain, Disk):
        records.append(_attainment_record(domain, max(config.dims)))
    limit = cert.value * (1.0 + VIOLATION_RTOL)
    violations = [
        {"trial": r.trial, "dim": r.dim, "degree": r.degree, "seed": list(r.seed), "ratio": r.ratio,
         "function": r.function}
        for r in records
        if not r.ratio <= limit
    ]
    best = max(records, key=lambda r: r.ratio)
    argmax = {"trial": best.trial, "dim": best.dim, "degree": best.degree, "seed": list(best.seed),
              "function": best.function}
    return TrialReport(config, cert, records, float(best.ratio), argmax, violations,
                       time.perf_counter() - start)


def disk_attainment(c: float = 2.0, power: int = 1) -> float:
    """``||A^power|| / sup_{|z| <= c/2} |z|^power`` for ``A = [[0, c], [0, 0]]``.

    With the defaults the ratio is exactly 2, the disk constant.
    """
    A = np.array([[0.0, c], [0.0, 0.0]], dtype=complex)
    radius = c / 2.0
    r = RationalFunction(tuple([0.0] * power + [1.0]))
    return operator_norm(apply_rational(r, A, check_poles=False)) / radius**power


@dataclass
class PowerReport:
    trials: int
    k_max: int
    max_numerical_radius: float
    max_norm: float
    violations: list
    runtime_s: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return asdict(self)


def power_inequality_trials(dims=tuple(range(1, 9)), k_max: int = 5, trials: int = 500, seed: int = 0,
                            margin: float = 1e-6, tol: float = 1e-8) -> PowerReport:
    """Powers of random matrices with numerical range in the closed unit disk.

    Checks ``w(A^k) <= 1`` and ``||A^k|| <= 2`` for ``k <= k_max``.
    """
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    start = time.perf_counter()
    dims = tuple(dims)
    disk = Disk(0.0, 1.0)
    w_max = n_max = 0.0
    violations = []
    for t in range(trials):
        dim = dims[t % len(dims)]
        A = random_matrix_in_domain(disk, dim, (seed, 41, t), margin=margin)
        Ak = np.eye(dim, dtype=complex)
        for k in range(1, k_max + 1):
            Ak = Ak @ A
            w = numerical_radius(Ak)
            nrm = operator_norm(Ak)
            w_max, n_max = max(w_max, w), max(n_max, nrm)
            if w > 1 + tol or nrm > 2 + tol:
                violations.append({"trial": t, "dim": dim, "k": k, "numerical_radius": w, "norm": nrm,
                                   "matrix": matrix_to_json(A)})
    return PowerReport(trials, k_max, w_max, n_max, violations, time.perf_counter() - start)
