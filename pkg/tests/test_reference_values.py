"""Small worked examples with closed-form or independently computed answers."""

import json
import math

import numpy as np
import pytest

from spectrabound.bounds import (
    bound_neumann_sector_sharp,
    certificate,
    q_kernel_l1,
    representation_residual_bounded,
    representation_residual_sector,
)
from spectrabound.cli import main
from spectrabound.geometry import Disk, Ellipse, Sector, sample_boundary
from spectrabound.harness import random_rational
from spectrabound.neumann import assemble_p, estimate_cn, mobius
from spectrabound.operators import (
    RationalFunction,
    boundary_sup,
    mu_boundary_integral,
    mu_matrix,
    numerical_radius,
    numerical_range_support,
    operator_norm,
    random_matrix_in_domain,
    wa_contained,
)
from spectrabound.similarity import (
    canonicalize,
    degree_one_bound_check,
    disk_similarity_jordan,
    numerical_range_2x2,
    verify_c2_bound,
)

from .conftest import SQUARE

JORDAN2 = np.array([[0, 2], [0, 0]], dtype=complex)
ELLIPSE_15 = Ellipse.from_foci(1.0, -1.0, 1.5)
A_15 = np.array([[1, 1.5], [0, -1]], dtype=complex)


def test_unit_disk_samples():
    smp = sample_boundary(Disk(0, 1), 256, omega=0)
    s = smp.s
    np.testing.assert_allclose(smp.sigma, np.exp(1j * s), atol=1e-15)
    np.testing.assert_allclose(smp.nu, np.exp(1j * s), atol=1e-15)
    np.testing.assert_allclose(np.exp(1j * smp.theta), np.exp(1j * (s + math.pi / 2)), atol=1e-14)
    assert smp.weight.sum() == pytest.approx(2 * math.pi, abs=1e-13)
    assert sample_boundary(SQUARE, 400).weight.sum() == pytest.approx(8.0, abs=1e-13)


def test_support_examples():
    assert numerical_range_support(np.diag([1.0, -1.0]), 0.0) == pytest.approx(1.0)
    t = np.linspace(0, 2 * math.pi, 9)
    np.testing.assert_allclose(numerical_range_support(A_15, t), ELLIPSE_15.support(t), atol=1e-12)
    assert wa_contained(np.diag([0.5]), Disk(0, 1))


@pytest.mark.parametrize("domain,dim,seed", [(Disk(0, 1), 4, 1), (Ellipse(0, 2, 1), 6, 7),
                                             (Sector(0, 0, math.pi / 6), 3, 2)])
def test_generator_examples(domain, dim, seed):
    assert wa_contained(random_matrix_in_domain(domain, dim, seed, margin=1e-3), domain, margin=1e-3)


def test_mu_matrix_examples():
    assert mu_matrix((1.0, 1.0), np.zeros((1, 1)))[0, 0] == pytest.approx(1 / math.pi)
    sigma = 1.5 * np.exp(1j * np.linspace(0, 2 * math.pi, 12, endpoint=False))
    assert min(np.linalg.eigvalsh(mu_matrix((s, s / 1.5), JORDAN2)).min() for s in sigma) > 0
    assert mu_matrix((1.0, 1.0), np.diag([2.0]))[0, 0] < 0


def test_mu_integral_examples():
    assert mu_boundary_integral(np.array([[0, 1], [0, 0]]), Disk(0, 1), n=1024) < 1e-8
    assert mu_boundary_integral(np.array([[0.3]]), Disk(0, 1)) < 1e-10


def test_operator_norm_examples():
    assert operator_norm(JORDAN2) == pytest.approx(2.0)
    assert operator_norm(np.eye(3)) == pytest.approx(1.0)
    assert operator_norm([[1, 1], [0, 1]]) == pytest.approx((1 + math.sqrt(5)) / 2)


def test_jordan_power_and_unitary_powers():
    assert numerical_radius(JORDAN2 @ JORDAN2) == 0.0
    U = np.diag(np.exp(1j * np.array([0.4, 1.9, -2.5])))
    for k in range(1, 6):
        assert numerical_radius(np.linalg.matrix_power(U, k)) == pytest.approx(1.0, abs=1e-12)


# --- representation and sector constants ------------------------------------


def test_representation_examples():
    assert representation_residual_bounded(Disk(0, 1), RationalFunction.constant(1.0), 0.0) < 1e-8
    assert representation_residual_bounded(Disk(0, 1), RationalFunction.identity(), 0.3 + 0.1j) < 1e-6
    r = RationalFunction((1,), (-5, 1))
    assert representation_residual_bounded(Ellipse(0, 2, 1), r, 0.5j) < 1e-6
    assert representation_residual_sector(math.pi / 4, RationalFunction((1,), (1, 1)), 1.0) < 1e-5
    assert representation_residual_sector(math.pi / 3, RationalFunction((-1, 1), (1, 1)), 2.0) < 1e-5


def test_sector_identity_parts_for_constant():
    alpha = math.pi / 4
    _, mu_part, kr_part = representation_residual_sector(alpha, RationalFunction.constant(1.0), 1.0,
                                                         return_parts=True)
    assert kr_part == pytest.approx(-(math.pi - 2 * alpha) / math.pi, abs=1e-8)
    assert mu_part == pytest.approx(2 - 2 * alpha / math.pi, abs=1e-8)


def test_sharp_constant_small_angle_trend():
    ratios = [bound_neumann_sector_sharp(a)[0].value / (2 / math.pi * math.log(1 / a))
              for a in (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)]
    assert all(a > b for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] - 1 < ratios[0] - 1
    # the kernel norm shrinks to 0 as alpha -> pi/2
    assert q_kernel_l1(1.5) == pytest.approx(bound_neumann_sector_sharp(1.5)[0].value - 2, abs=1e-8)
    assert q_kernel_l1(1.55) < q_kernel_l1(1.5) < 0.1


def test_combined_examples():
    assert certificate(Disk(0, 1)).value == 2.0
    e = certificate(Ellipse(0, 2, 1))
    assert e.value == min(m.value for m in e.members)
    assert certificate(0.4 * math.pi).value == pytest.approx(1.5)
    assert certificate(0.1 * math.pi).inputs["attained_by"] == "sector_calculus"


# --- Neumann ---------------------------------------------------------------


def test_disk_mean_value():
    system = assemble_p(Disk(0, 1), 256)
    np.testing.assert_allclose(system.apply(system.nodes.sigma.real), 0.0, atol=1e-14)


def test_neumann_constant_family():
    c_n, d_n = estimate_cn(Disk(0, 1), [RationalFunction.constant(1.0)], n=256)
    assert c_n == pytest.approx(1.0, abs=1e-12)
    assert d_n == pytest.approx(0.0, abs=1e-12)
    fam = [mobius(0.99 * np.exp(2j * math.pi * k / 8)) for k in range(8)]
    assert estimate_cn(Disk(0, 1), fam, n=2048)[0] >= 2.9


def test_square_estimates_below_certificate():
    fam = [random_rational(SQUARE, 1 + k % 3, (0, 71, k)) for k in range(6)]
    c_n, d_n = estimate_cn(SQUARE, fam, n=1024)
    assert c_n <= certificate(SQUARE, "C_N").value
    assert not certificate(SQUARE, "D_N").applicable  # no curvature bound with corners


# --- similarity ------------------------------------------------------------


@pytest.mark.parametrize("c,kappa", [(2.0, 2.0), (1.0, 1.0), (1.5, 1.5)])
def test_jordan_similarity_examples(c, kappa):
    S, k = disk_similarity_jordan(c)
    assert k == pytest.approx(kappa)
    A = np.array([[0, c], [0, 0]], dtype=complex)
    assert operator_norm(S @ A @ np.linalg.inv(S)) <= 1 + 1e-14
    if c == 1.0:
        np.testing.assert_allclose(S, np.eye(2))
    if c == 2.0:
        assert operator_norm(S @ A @ np.linalg.inv(S)) == pytest.approx(1.0)


def test_c2_examples():
    assert verify_c2_bound(JORDAN2, RationalFunction.identity()) == pytest.approx(2.0, abs=1e-12)
    assert verify_c2_bound(A_15, RationalFunction.constant(1.0)) == pytest.approx(1.0)


def test_c2_random_sweep():
    rng = np.random.default_rng(495)
    worst = 0.0
    for _ in range(500):
        A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        W = numerical_range_2x2(A)
        c = complex(np.trace(A)) / 2
        R = W.scale
        poles = c + R * rng.uniform(2.0, 4.0, 3) * np.exp(2j * math.pi * rng.uniform(size=3))
        r = RationalFunction.from_roots(c + R * (rng.normal(size=3) + 1j * rng.normal(size=3)), poles)
        worst = max(worst, verify_c2_bound(A, r, check=False))
    assert worst <= 2 + 1e-6


def test_canonical_round_trips():
    rng = np.random.default_rng(516)
    for _ in range(500):
        A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        assert np.max(np.abs(canonicalize(A).reconstruct() - A)) < 1e-10


def test_degree_one_examples():
    ratio = degree_one_bound_check(A_15, [[0.0]], [[1.0]], ELLIPSE_15)
    assert ratio == pytest.approx(operator_norm(A_15) / ELLIPSE_15.a, rel=1e-10)
    assert ratio <= 2
    assert degree_one_bound_check(A_15, [[1.0, 2.0], [0.0, 1j]], np.zeros((2, 2)), ELLIPSE_15) == pytest.approx(1.0)


# --- harness ---------------------------------------------------------------


def test_random_rational_examples():
    r0 = random_rational(Disk(0, 1), 0, 123)
    assert abs(r0(0.3)) == pytest.approx(1.0)
    r3 = random_rational(Disk(0, 1), 3, 5)
    assert np.all(np.abs(np.roots(r3.den[::-1])) > 2)
    r2 = random_rational(Ellipse(0, 2, 1), 2, 9)
    dense = sample_boundary(Ellipse(0, 2, 1), 200_000).sigma
    assert np.max(np.abs(r2(dense))) == pytest.approx(1.0, abs=1e-10)
    assert boundary_sup(r2, Ellipse(0, 2, 1)) == pytest.approx(1.0, abs=1e-10)


# --- CLI -------------------------------------------------------------------


def test_cli_two_vertex_polygon(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"domain": {"kind": "polygon", "vertices": [[0, 0], [1, 0]]}}))
    assert main(["verify", str(cfg)]) == 2
    assert "config error" in capsys.readouterr().err
