import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from spectrabound.bounds import (
    BoundCertificate,
    all_bounds,
    bound_area,
    bound_curvature,
    bound_disk_exact,
    bound_neumann_angle,
    bound_neumann_sector_sharp,
    bound_sector_calculus,
    bound_tv,
    bound_tv_flatness,
    bound_universal,
    certificate,
    jr_estimate_check,
    kr_constant_check,
    q_kernel_l1,
    representation_residual_bounded,
    representation_residual_sector,
)
from spectrabound.geometry import Disk, DomainError, Ellipse, HalfPlane, Polygon, Sector
from spectrabound.operators import PoleError, RationalFunction

from .conftest import SQUARE

# 30-digit mpmath evaluations of 1 + (2/pi) int_alpha^{pi/2} (pi - x + sin x)/sin x dx
SECTOR_ORACLE = {
    math.pi / 20: 5.9180745710357943518,
    1e-8: 39.061412232901346426,
    math.pi / 10: 4.5203207090164584105,
    math.pi / 4: 2.6144143109665164482,
    1.3e-12: 56.957364447918729811,
}
# closed-form sector Neumann constants, same precision
SHARP_ORACLE = {
    math.pi / 6: 3.1731183752263278465,
    math.pi / 4: 2.8384014365579654667,
    math.pi / 3: 2.5610998523391801271,
}
CROSSOVER = 0.34549842039296106995 * math.pi
ELLIPSE_PERIMETER = 9.6884482205476761984


@pytest.mark.parametrize("alpha,expected", sorted(SECTOR_ORACLE.items()))
def test_sector_calculus_oracle(alpha, expected):
    assert bound_sector_calculus(alpha).value == pytest.approx(expected, abs=1e-8)


def test_sector_calculus_live_mpmath():
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 25
    for alpha in (0.05, 0.7, 1.4):
        f = lambda x: (mpmath.pi - x + mpmath.sin(x)) / mpmath.sin(x)
        ref = 1 + 2 / mpmath.pi * mpmath.quad(f, [alpha, mpmath.pi / 2])
        assert bound_sector_calculus(alpha).value == pytest.approx(float(ref), abs=1e-9)


def test_sector_calculus_half_plane_and_checkpoints():
    assert bound_sector_calculus(math.pi / 2).value == 1.0
    assert bound_sector_calculus(math.pi / 20).value <= 6
    assert bound_sector_calculus(1e-8).value <= 40
    # the universal constant takes over for extremely thin sectors
    assert bound_sector_calculus(1e-13).value > 57


@given(a=st.floats(1e-6, 1.5), b=st.floats(1e-6, 1.5))
def test_sector_calculus_decreasing(a, b):
    a, b = sorted((a, b))
    assert bound_sector_calculus(a).value >= bound_sector_calculus(b).value - 1e-12


def test_sector_calculus_small_angle_behaviour():
    # ~ 2 log(1/alpha) growth: ratio of value to log(1/alpha) tends to 2
    ratios = [bound_sector_calculus(a).value / math.log(1 / a) for a in (1e-4, 1e-8, 1e-12)]
    assert ratios[0] > ratios[1] > ratios[2] > 2
    assert ratios[2] < 2.1


def test_invalid_angles():
    for bad in (0.0, -0.1, 2.0):
        with pytest.raises(DomainError):
            bound_sector_calculus(bad)
    with pytest.raises(DomainError):
        q_kernel_l1(math.pi / 2)


@pytest.mark.parametrize("alpha,expected", sorted(SHARP_ORACLE.items()))
def test_sharp_sector_constant(alpha, expected):
    cn, ccb = bound_neumann_sector_sharp(alpha)
    assert cn.value == pytest.approx(expected, abs=1e-12)
    assert ccb.value == pytest.approx((math.pi - alpha) / math.pi * expected, abs=1e-12)
    assert q_kernel_l1(alpha) == pytest.approx(expected - 2, abs=1e-10)


def test_q_kernel_truncation_guard():
    with pytest.raises(ValueError):
        q_kernel_l1(math.pi / 4, truncation=2.0)


def test_neumann_angle_values():
    cn, ccb = bound_neumann_angle(math.pi / 2)
    assert cn.value == 2.0 and ccb.value == 1.0
    cn, ccb = bound_neumann_angle(math.pi / 4)
    assert cn.value == pytest.approx(4.0) and ccb.value == pytest.approx(3.0)


def test_regime_crossover():
    from scipy.optimize import brentq

    def gap(a):
        return bound_neumann_angle(a)[1].value - bound_sector_calculus(a).value

    root = brentq(gap, 0.2 * math.pi, 0.45 * math.pi, xtol=1e-14)
    assert root == pytest.approx(CROSSOVER, abs=1e-9)
    assert 0.34 * math.pi < root < 0.35 * math.pi
    assert certificate(0.3 * math.pi).inputs["attained_by"] == "sector_calculus"
    assert certificate(0.4 * math.pi).inputs["attained_by"] == "neumann_angle"


@pytest.mark.parametrize("alpha", [0.05, 0.3, 0.7, 1.2, math.pi / 2])
def test_sector_chain(alpha):
    # C_cb <= C_N holds between the sharp pair, and the sharp C_cb lies below
    # every pooled C_cb certificate
    cn, ccb = bound_neumann_sector_sharp(alpha)
    assert ccb.value <= cn.value
    assert ccb.value <= certificate(alpha).value + 1e-12


# --- bounded domains -------------------------------------------------------


def test_disk_bounds():
    d = Disk(1 + 1j, 3.0)
    assert bound_disk_exact(d).value == 2.0
    assert bound_tv(d).value == pytest.approx(2 + math.pi, abs=1e-8)
    dn, ccb = bound_curvature(d)
    assert dn.value == pytest.approx(2.0) and ccb.value == pytest.approx(3.0)
    assert bound_area(d).value == pytest.approx(3 + 8**3)
    assert not bound_tv_flatness(d).applicable
    assert certificate(d).value == 2.0


def test_ellipse_bounds():
    e = Ellipse(0, 2.0, 1.0)
    assert bound_tv(e).value == pytest.approx(2 + math.pi + 4 * math.log(2), abs=1e-6)
    dn, ccb = bound_curvature(e)
    assert dn.inputs["R"] == pytest.approx(4.0, abs=1e-8)
    assert dn.value == pytest.approx(16 * math.pi / ELLIPSE_PERIMETER, rel=1e-9)
    assert ccb.value == pytest.approx(1 + dn.value)
    flat = bound_tv_flatness(e)
    assert flat.applicable and flat.value == pytest.approx(9.300475736949465095, abs=1e-4)
    assert bound_area(e).value == pytest.approx(3 + (2 * math.pi * 16 / (2 * math.pi)) ** 3)
    cert = certificate(e)
    assert cert.source == "combined_min"
    assert cert.inputs["attained_by"] == "curvature"
    assert cert.value == pytest.approx(1 + dn.value)


def test_square_bounds():
    cert = certificate(SQUARE)
    assert cert.value == pytest.approx(2 + math.pi + 4 * math.log(2), abs=1e-6)
    dn, ccb = bound_curvature(SQUARE)
    assert not dn.applicable and not ccb.applicable
    assert math.isinf(dn.value)


def test_certificate_kinds_and_chain():
    e = Ellipse(0, 2.0, 1.0)
    c_cb = certificate(e, "C_cb").value
    c = certificate(e, "C").value
    c_n = certificate(e, "C_N").value
    d_n = certificate(e, "D_N").value
    assert c <= c_cb <= c_n + 1e-12 <= 1 + d_n + 1e-12
    for alpha in (0.2, 1.0):
        assert certificate(alpha, "C").value <= certificate(alpha, "C_cb").value <= certificate(alpha, "C_N").value
    with pytest.raises(ValueError):
        certificate(e, "K")


def test_sharp_sector_excluded_unless_requested():
    alpha = math.pi / 4
    plain = certificate(alpha, "C_N")
    sharp = certificate(alpha, "C_N", include_sharp=True)
    assert plain.value == pytest.approx(4.0)
    assert sharp.value == pytest.approx(SHARP_ORACLE[alpha])
    assert all(m.source != "neumann_sector_sharp" for m in plain.members)


def test_universal_constant():
    assert bound_universal().value == 57
    assert bound_universal("C").constant_kind == "C"
    with pytest.raises(ValueError):
        bound_universal("C_N")
    # only C and C_cb pool the universal constant
    assert all(m.source != "universal_57" for m in certificate(1e-13, "C_N").members)
    assert certificate(1e-13).value == 57


def test_sector_and_half_plane_targets_agree():
    s = certificate(Sector(2.0, 1.0, 0.5))
    assert s.value == certificate(0.5).value
    assert certificate(HalfPlane(0, 0.3)).value == 1.0


@given(scale=st.floats(0.05, 20.0), shift=st.complex_numbers(max_magnitude=10), angle=st.floats(0, 6.28))
def test_bounds_similarity_invariant(scale, shift, angle):
    base = certificate(Ellipse(0, 2.0, 1.0)).value
    moved = certificate(Ellipse(shift, 2.0 * scale, 1.0 * scale, angle)).value
    assert moved == pytest.approx(base, rel=1e-6)


def test_certificate_json_round_trip():
    cert = certificate(Ellipse(0, 2.0, 1.0))
    doc = json.loads(cert.to_json())
    assert doc["value"] == cert.value
    assert doc["constant_kind"] == "C_cb"
    assert len(doc["members"]) == len(cert.members)
    assert isinstance(cert, BoundCertificate)


def test_all_bounds_lists():
    names = {c.source for c in all_bounds(Ellipse(0, 2, 1))}
    assert {"tv_bound", "flatness_tv_bound", "curvature", "area", "disk_exact", "universal_57"} <= names
    names = {c.source for c in all_bounds(0.4)}
    assert {"sector_calculus", "neumann_angle", "neumann_sector_sharp", "universal_57"} <= names


def test_nonconvex_polygon_rejected():
    with pytest.raises(DomainError):
        Polygon([0, 2, 1 + 0.2j, 2 + 2j, 2j])


# --- representation identities ---------------------------------------------

CASES = [
    (Disk(0, 1), RationalFunction.constant(1.0), 0.3j),
    (Disk(0, 1), RationalFunction.identity(), 0.5),
    (Disk(1j, 2), RationalFunction.from_roots([0.3], [5.0]), 0.2 + 1.5j),
    (Ellipse(0, 2, 1), RationalFunction((1, 0, 1)), 0.9 - 0.4j),
    (Ellipse(0, 2, 1), RationalFunction.from_roots([1j], [3.0 + 1j, -4.0]), -1.2 + 0.3j),
    (Ellipse(1 - 1j, 3, 0.5, 0.7), RationalFunction.from_roots([0.0, 1.0], [6.0j, -5.0]), 1 - 1j),
]


@pytest.mark.parametrize("domain,r,z", CASES)
def test_bounded_representation(domain, r, z):
    assert representation_residual_bounded(domain, r, z) < 1e-10


def test_bounded_representation_parts_for_constant():
    _, mu_part, jr_part = representation_residual_bounded(Disk(0, 1), RationalFunction.constant(1.0), 0.1,
                                                          return_parts=True)
    assert mu_part == pytest.approx(2.0)
    assert jr_part == pytest.approx(-1.0)


def test_bounded_representation_rejects_bad_input():
    with pytest.raises(DomainError):
        representation_residual_bounded(SQUARE, RationalFunction.identity(), 0.0)
    with pytest.raises(DomainError):
        representation_residual_bounded(Disk(0, 1), RationalFunction.identity(), 1.5)
    with pytest.raises((PoleError, DomainError)):
        representation_residual_bounded(Disk(0, 1), RationalFunction((1,), (-0.5, 1)), 0.0)


@pytest.mark.parametrize("domain,r,z", CASES)
def test_jr_pointwise_estimate(domain, r, z):
    assert jr_estimate_check(domain, r, z) <= 1e-9


@pytest.mark.parametrize("alpha", [0.3, math.pi / 4, 1.2])
def test_kr_constant(alpha):
    assert kr_constant_check(alpha, 2.0) < 1e-8


@pytest.mark.parametrize(
    "alpha,r,z",
    [
        (math.pi / 4, RationalFunction.constant(1.0), 1.0 + 0.2j),
        (math.pi / 4, RationalFunction((1,), (1, 1)), 0.5),
        (0.4, RationalFunction.from_roots([2.0], [-1.0 + 0.5j]), 2.0 - 0.3j),
        (1.3, RationalFunction.from_roots([1j], [-2.0]), 0.7 + 1.1j),
    ],
)
def test_sector_representation(alpha, r, z):
    assert representation_residual_sector(alpha, r, z) < 1e-8


def test_sector_representation_rejects_bad_input():
    with pytest.raises(PoleError):
        representation_residual_sector(math.pi / 4, RationalFunction((1,), (-2, 1)), 1.0)
    with pytest.raises(DomainError):
        representation_residual_sector(math.pi / 4, RationalFunction.constant(1.0), -1.0)
    with pytest.raises(ValueError):
        representation_residual_sector(math.pi / 4, RationalFunction.constant(1.0), 1.0, truncation=10.0)
