"""Explicit two-dimensional constructions: ellipse conformal map and similarities.

A 2x2 matrix with distinct eigenvalues is unitarily and affinely equivalent to
``[[1, gamma], [0, -1]]``, whose numerical range is the ellipse with foci
``+-1`` and minor axis ``gamma``.  The conformal map ``a`` of that ellipse
onto the unit disk satisfies ``a(A) = a(1) A`` and an explicit triangular
``S`` turns ``a(A)`` into a contraction with ``cond(S) < 2``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.linalg import expm, schur

from .geometry import ConvexDomain, Disk, DomainError, Ellipse
from .operators import (
    NumericalError,
    apply_rational,
    boundary_sup,
    operator_norm,
    random_matrix_in_domain,
    trial_rng,
    wa_contained,
)

__all__ = [
    "rho_from_gamma",
    "series_terms",
    "conformal_a",
    "conformal_a_matrix",
    "EllipseSimilarity",
    "build_similarity",
    "TwoByTwoCanonicalForm",
    "canonicalize",
    "numerical_range_2x2",
    "disk_similarity_jordan",
    "verify_c2_bound",
    "ellipse_dilation_verify",
    "random_dilation",
    "rotation_identity_residual",
    "degree_one_bound_check",
    "degree_one_trials",
]


def rho_from_gamma(gamma: float) -> float:
    """Positive root of ``rho - 1/rho = gamma``."""
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    return 0.5 * (gamma + math.sqrt(gamma * gamma + 4.0))


def series_terms(rho: float, tol: float = 1e-15, minimum: int = 8) -> int:
    """Smallest ``N >= minimum`` whose series tail is below ``tol``.

    On the closed ellipse ``|t_2n(z)| <= (rho^2n + rho^-2n) / 2``, so the
    ``n``-th term is at most ``rho^-2n / n`` and the tail after ``N`` terms is
    at most ``rho^-2(N+1) / ((N+1) (1 - rho^-2))``.
    """
    if not rho > 1:
        raise ValueError("rho must exceed 1")
    q = rho**-2
    log_q = math.log(q)
    N = minimum
    while True:
        tail = math.exp((N + 1) * log_q) / ((N + 1) * (1.0 - q))
        if tail < tol:
            return N
        N = N + max(1, N // 4)
        if N > 10_000_000:
            raise NumericalError("conformal series does not converge at the requested tolerance")


def _series_coefficients(rho, N):
    n = np.arange(1, N + 1, dtype=float)
    # 2 / (1 + rho^4n) written without overflow
    r4 = np.exp(-4.0 * n * math.log(rho))
    return (-1.0) ** (n + 1) / n * 2.0 * r4 / (1.0 + r4)


def _in_closed_ellipse(z, rho, slack=1e-9):
    a = 0.5 * (rho + 1.0 / rho)
    b = 0.5 * (rho - 1.0 / rho)
    return (z.real / a) ** 2 + (z.imag / b) ** 2 <= 1.0 + slack


def conformal_a(z, rho: float, tol: float = 1e-15):
    """Conformal map of the ellipse with foci ``+-1`` and semi-axes ``(rho +- 1/rho)/2`` onto the disk.

    ``a(z) = (2z/rho) exp(-sum_n (-1)^(n+1)/n * 2 t_2n(z) / (1 + rho^4n))``,
    with Chebyshev values from the three-term recurrence.
    """
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if not np.all(_in_closed_ellipse(z, rho)):
        raise DomainError("point outside the closed ellipse")
    N = series_terms(rho, tol)
    coef = _series_coefficients(rho, N)
    t_prev, t_cur = np.ones_like(z), z.copy()  # t_0, t_1
    expo = np.zeros_like(z)
    for k in range(2, 2 * N + 1):
        t_prev, t_cur = t_cur, 2.0 * z * t_cur - t_prev
        if k % 2 == 0:
            expo += coef[k // 2 - 1] * t_cur
    out = 2.0 * z / rho * np.exp(-expo)
    return complex(out[0]) if scalar else out


def conformal_a_matrix(A, rho: float, tol: float = 1e-15) -> np.ndarray:
    """The same series evaluated at a matrix (Chebyshev recurrence plus ``expm``)."""
    A = np.asarray(A, dtype=complex)
    N = series_terms(rho, tol)
    coef = _series_coefficients(rho, N)
    eye = np.eye(A.shape[0])
    t_prev, t_cur = eye.astype(complex), A.copy()
    expo = np.zeros_like(A)
    for k in range(2, 2 * N + 1):
        t_prev, t_cur = t_cur, 2.0 * A @ t_cur - t_prev
        if k % 2 == 0:
            expo += coef[k // 2 - 1] * t_cur
    return 2.0 / rho * A @ expm(-expo)


@dataclass(frozen=True)
class EllipseSimilarity:
    """Similarity data for ``A = [[1, gamma], [0, -1]]``.

    ``X = rho a(1)`` equals ``||S|| ||S^-1||``; the residual fields record how
    well each identity holds numerically.
    """

    gamma: float
    rho: float
    a1: float
    S: np.ndarray
    B: np.ndarray
    X: float
    cond_S: float
    b_norm_error: float
    quadratic_residual: float
    conjugation_residual: float
    a_matrix_residual: float
    series_terms: int

    def as_dict(self) -> dict:
        d = asdict(self)
        for key in ("S", "B"):
            d[key] = [[[complex(v).real, complex(v).imag] for v in row] for row in np.asarray(d[key])]
        return d


def build_similarity(gamma: float, tol: float = 1e-15) -> EllipseSimilarity:
    """Construct ``S`` with ``S a(A) S^-1 = B`` a contraction and ``cond(S) = X < 2``."""
    rho = rho_from_gamma(gamma)
    a1 = conformal_a(1.0, rho, tol).real
    S = np.array([[1 + a1 * a1, a1 * a1 * rho - 1 / rho], [0.0, a1 * (rho + 1 / rho)]], dtype=complex)
    B = np.array([[a1, 1 - a1 * a1], [0.0, -a1]], dtype=complex)
    A = np.array([[1.0, gamma], [0.0, -1.0]], dtype=complex)
    X = rho * a1
    cond_S = operator_norm(S) * operator_norm(np.linalg.inv(S))
    quad = X * X - (1 + rho * rho * a1 * a1) / (rho * a1) * X + 1.0
    conj = operator_norm(S @ (a1 * A) @ np.linalg.inv(S) - B)
    a_mat = operator_norm(conformal_a_matrix(A, rho, tol) - a1 * A)
    return EllipseSimilarity(
        gamma=float(gamma),
        rho=rho,
        a1=float(a1),
        S=S,
        B=B,
        X=float(X),
        cond_S=float(cond_S),
        b_norm_error=abs(operator_norm(B) - 1.0),
        quadratic_residual=abs(quad),
        conjugation_residual=conj,
        a_matrix_residual=a_mat,
        series_terms=series_terms(rho, tol),
    )


# ---------------------------------------------------------------------------
# canonical forms


@dataclass(frozen=True)
class TwoByTwoCanonicalForm:
    """``A = U (lam * A_can + beta I) U*`` with ``A_can`` one of two shapes.

    ``case`` is ``"distinct_eigenvalues"`` (``A_can = [[1, param], [0, -1]]``,
    ``param = gamma >= 0``) or ``"equal_eigenvalues"``
    (``A_can = [[0, param], [0, 0]]``, ``param = c >= 0``).
    """

    case: str
    param: float
    lam: complex
    beta: complex
    unitary: np.ndarray

    @property
    def canonical(self) -> np.ndarray:
        if self.case == "distinct_eigenvalues":
            return np.array([[1.0, self.param], [0.0, -1.0]], dtype=complex)
        return np.array([[0.0, self.param], [0.0, 0.0]], dtype=complex)

    def reconstruct(self) -> np.ndarray:
        U = self.unitary
        return U @ (self.lam * self.canonical + self.beta * np.eye(2)) @ U.conj().T

    @classmethod
    def from_matrix(cls, A, tol: float = 1e-12) -> "TwoByTwoCanonicalForm":
        return canonicalize(A, tol)


def canonicalize(A, tol: float = 1e-12) -> TwoByTwoCanonicalForm:
    """Complex Schur form followed by a diagonal phase making the corner real."""
    A = np.asarray(A, dtype=complex)
    if A.shape != (2, 2):
        raise ValueError("expected a 2x2 matrix")
    T, U = schur(A, output="complex")
    l1, l2, b = T[0, 0], T[1, 1], T[0, 1]
    scale = max(1.0, float(np.abs(A).max()))
    if abs(l1 - l2) > tol * scale:
        lam, beta = (l1 - l2) / 2.0, (l1 + l2) / 2.0
        corner = b / lam
        case = "distinct_eigenvalues"
    else:
        lam, beta = 1.0 + 0j, (l1 + l2) / 2.0
        corner = b
        case = "equal_eigenvalues"
    # conjugating by diag(1, e^{i psi}) multiplies the corner by e^{i psi}
    psi = -np.angle(corner) if abs(corner) > 0 else 0.0
    U = U @ np.diag([1.0, np.exp(1j * psi)])
    return TwoByTwoCanonicalForm(case, float(abs(corner)), complex(lam), complex(beta), U)


def numerical_range_2x2(A) -> ConvexDomain:
    """Closed-form numerical range of a 2x2 matrix.

    It is the ellipse with foci at the eigenvalues and minor axis
    ``sqrt(||A||_F^2 - |l1|^2 - |l2|^2)``; a disk when the eigenvalues agree.
    Normal matrices (segment ranges) raise :class:`DomainError`.
    """
    A = np.asarray(A, dtype=complex)
    l1, l2 = np.linalg.eigvals(A)
    minor2 = float(np.sum(np.abs(A) ** 2) - abs(l1) ** 2 - abs(l2) ** 2)
    scale = max(1.0, float(np.abs(A).max()))
    if minor2 <= (1e-12 * scale) ** 2:
        raise DomainError("normal matrix: numerical range is a segment")
    minor = math.sqrt(minor2)
    if abs(l1 - l2) <= 1e-12 * scale:
        return Disk((l1 + l2) / 2.0, minor / 2.0)
    return Ellipse.from_foci(l1, l2, minor)


def disk_similarity_jordan(c: float):
    """Diagonal similarity for ``A = [[0, c], [0, 0]]``, ``0 < c <= 2``.

    Returns ``(S, kappa)`` with ``S = diag(t, 1/t)``, ``t^2 = min(1, 1/c)``,
    so that ``||S A S^-1|| = c t^2 <= 1`` and ``kappa = max(1, c) <= 2``.
    """
    c = float(c)
    if not (0.0 < c <= 2.0):
        raise ValueError("c must lie in (0, 2]")
    t = math.sqrt(min(1.0, 1.0 / c))
    S = np.diag([t, 1.0 / t]).astype(complex)
    kappa = operator_norm(S) * operator_norm(np.linalg.inv(S))
    return S, kappa


def verify_c2_bound(A, r, tol: float = 1e-6, check: bool = True) -> float:
    """``||r(A)|| / sup_{W(A)} |r|`` for a non-normal 2x2 matrix.

    The supremum is taken over the closed-form boundary of ``W(A)`` with local
    refinement, so the ratio is not underestimated by coarse sampling.
    """
    W = numerical_range_2x2(A)
    ratio = operator_norm(apply_rational(r, A)) / boundary_sup(r, W)
    if check and ratio > 2.0 + tol:
        raise AssertionError(f"2x2 ratio {ratio} exceeds 2")
    return ratio


# ---------------------------------------------------------------------------
# ellipse dilation


def _ellipse_of(params) -> ConvexDomain:
    mu1, mu2, gamma = params
    if gamma <= 0:
        raise DomainError("minor axis must be positive")
    if abs(complex(mu1) - complex(mu2)) == 0:
        return Disk(complex(mu1), gamma / 2.0)
    return Ellipse.from_foci(mu1, mu2, gamma)


def ellipse_dilation_verify(V, E_params, A, atol: float = 1e-8) -> bool:
    """Check ``A = V*(E (x) I)V`` with ``E = [[mu1, gamma], [0, mu2]]`` and ``W(A)`` in the ellipse.

    ``V`` is ``2n x n`` with orthonormal columns; the ellipse has foci
    ``mu1, mu2`` and minor axis ``gamma``.
    """
    V = np.asarray(V, dtype=complex)
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    n = A.shape[0]
    if V.shape != (2 * n, n):
        raise ValueError("V must be 2n x n")
    if np.linalg.norm(V.conj().T @ V - np.eye(n), 2) > 1e-10:
        raise ValueError("V is not an isometry")
    mu1, mu2, gamma = E_params
    E = np.array([[mu1, gamma], [0.0, mu2]], dtype=complex)
    D = V.conj().T @ np.kron(E, np.eye(n)) @ V
    if np.linalg.norm(D - A, 2) > atol:
        return False
    return wa_contained(A, _ellipse_of(E_params), margin=-atol)


def random_dilation(n: int, E_params, seed) -> tuple[np.ndarray, np.ndarray]:
    """Random isometry ``V`` (QR of a Gaussian) and ``A = V*(E (x) I)V``."""
    rng = trial_rng(*np.atleast_1d(seed))
    G = rng.normal(size=(2 * n, n)) + 1j * rng.normal(size=(2 * n, n))
    V, _ = np.linalg.qr(G)
    mu1, mu2, gamma = E_params
    E = np.array([[mu1, gamma], [0.0, mu2]], dtype=complex)
    return V, V.conj().T @ np.kron(E, np.eye(n)) @ V


def _rot(x):
    return np.array([[math.cos(x), -math.sin(x)], [math.sin(x), math.cos(x)]])


def rotation_identity_residual(theta: float) -> float:
    """Spectral-norm residual of the rotation factorization of ``[[0, 1+cos], [1-cos, 0]]``."""
    lhs = np.array([[0.0, 1 + math.cos(theta)], [1 - math.cos(theta), 0.0]])
    mid = np.array([[math.sin(theta), 2 * math.cos(theta)], [0.0, -math.sin(theta)]])
    return float(np.linalg.norm(lhs - _rot(theta / 2) @ mid @ _rot(-theta / 2), 2))


# ---------------------------------------------------------------------------
# degree-one matrix polynomials


def degree_one_bound_check(A, P0, P1, ellipse: ConvexDomain, tol: float = 1e-6, check: bool = True) -> float:
    """``||P0 (x) I + P1 (x) A|| / max_{z on boundary} ||P0 + z P1||``."""
    A = np.asarray(A, dtype=complex)
    P0 = np.atleast_2d(np.asarray(P0, dtype=complex))
    P1 = np.atleast_2d(np.asarray(P1, dtype=complex))
    if not wa_contained(A, ellipse, margin=-1e-10):
        raise DomainError("numerical range is not inside the ellipse")
    n = A.shape[0]
    num = operator_norm(np.kron(P0, np.eye(n)) + np.kron(P1, A))
    den = boundary_sup(lambda z: P0 + np.asarray(z)[..., None, None] * P1, ellipse)
    ratio = num / den
    if check and ratio > 2.0 + tol:
        raise AssertionError(f"degree-one ratio {ratio} exceeds 2")
    return ratio


def degree_one_trials(trials: int = 200, seed: int = 0, max_dim: int = 6, max_m: int = 3) -> np.ndarray:
    """Ratios of :func:`degree_one_bound_check` over random ellipses, matrices and coefficients."""
    out = np.empty(trials)
    for k in range(trials):
        rng = trial_rng(seed, 51, k)
        f1 = complex(*rng.normal(size=2))
        f2 = complex(*rng.normal(size=2))
        ellipse = Ellipse.from_foci(f1, f2, float(rng.uniform(0.1, 3.0)))
        dim = int(rng.integers(1, max_dim + 1))
        m = int(rng.integers(1, max_m + 1))
        A = random_matrix_in_domain(ellipse, dim, (seed, 52, k), margin=1e-9 * ellipse.scale)
        P0 = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
        P1 = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
        out[k] = degree_one_bound_check(A, P0, P1, ellipse, check=False)
    return out
