"""Certified upper bounds and randomized checks for K-spectral constants of convex domains."""

from .bounds import BoundCertificate, all_bounds, certificate
from .geometry import (
    ConvexDomain,
    Disk,
    DomainError,
    Ellipse,
    HalfPlane,
    Polygon,
    Sector,
    domain_from_spec,
    metrics,
    optimal_tv_center,
    sample_boundary,
    tv_log,
)
from .harness import TrialConfig, run_trials
from .operators import (
    RationalFunction,
    apply_rational,
    random_matrix_in_domain,
    wa_contained,
)

__version__ = "0.1.0"

__all__ = [
    "BoundCertificate",
    "ConvexDomain",
    "Disk",
    "DomainError",
    "Ellipse",
    "HalfPlane",
    "Polygon",
    "RationalFunction",
    "Sector",
    "TrialConfig",
    "all_bounds",
    "apply_rational",
    "certificate",
    "domain_from_spec",
    "metrics",
    "optimal_tv_center",
    "random_matrix_in_domain",
    "run_trials",
    "sample_boundary",
    "tv_log",
    "wa_contained",
]
