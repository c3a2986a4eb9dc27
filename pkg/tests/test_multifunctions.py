import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpcg.mesh import FESpace, interval_mesh, rectangle_mesh
from dpcg.modular import ExponentConfig
from dpcg.multifunctions import (
    CertificateViolation,
    CoercivityCertificate,
    GrowthCertificate,
    IntervalMultifunction as IM,
    SignCertificate,
    coercivity_bound,
    delta_norms,
    evaluate_interval,
    select,
    superpose,
    validate_coercivity_condition,
    validate_growth,
    validate_sign,
    young_constant,
)

CFG = ExponentConfig((2, 1.5, 2, 1.5), (3, 2.5, 3, 2.5))
CRIT6 = {"p1_star": 6.0, "p3_star": 6.0, "p1_sub": 3.0, "p3_sub": 3.0}
Z, ZB = IM.zero(), IM.zero("boundary")
MESH = interval_mesh(4)
PT = np.array([[0.3]])


def test_evaluate_interval_examples():
    np.testing.assert_array_equal(IM.constant(-1, 1)(PT, 0.0, 0.0), [[-1.0], [1.0]])
    f = IM.from_expressions("z1 + r2", "z1 + r2")
    lo, hi = f(PT, 0.0, 2.0)
    assert lo == hi == pytest.approx(2.3)
    lo, hi = IM.from_expressions("r1-1", "r1+1")(PT, 2.0, 0.0)
    assert (lo.item(), hi.item()) == (1.0, 3.0)


def test_swapped_endpoints_rejected():
    with pytest.raises(CertificateViolation):
        evaluate_interval(IM.from_expressions("1", "-1"), PT, 0.0, 0.0)
    with pytest.raises(CertificateViolation):
        evaluate_interval(IM.from_expressions("r1", "0"), PT, np.array([-1.0, 1.0]), 0.0)


def test_boundary_maps_reject_gradients():
    with pytest.raises(ValueError):
        IM.from_expressions("n1", "n1", "boundary")


def test_select_examples():
    assert select((-1.0, 1.0), "nearest", 2.0) == 1.0
    assert select((-1.0, 1.0), "nearest", 0.3) == 0.3
    assert select((1.0, 3.0)) == 2.0
    with pytest.raises(ValueError):
        select((0, 1), "nearest")
    with pytest.raises(ValueError):
        select((0, 1), "random")


@given(st.floats(-100, 100), st.floats(0, 50), st.floats(-1e3, 1e3), st.floats(-1e3, 1e3))
def test_nearest_is_nonexpansive_and_a_member(lo, width, a, b):
    iv = (lo, lo + width)
    sa, sb = select(iv, "nearest", a), select(iv, "nearest", b)
    assert abs(sa - sb) <= abs(a - b)
    assert iv[0] <= sa <= iv[1]


def test_superpose_zero():
    s = FESpace(rectangle_mesh(2, 2))
    z = np.zeros(s.dof_count)
    sel = superpose(Z, Z, ZB, ZB, z, z, s)
    assert not sel.domain_load.any() and not sel.boundary_load.any()
    assert sel.all_members


def test_superpose_hat_mass():
    s = FESpace(interval_mesh(2))
    z = np.zeros(s.dof_count)
    sel = superpose(IM.constant(1, 1), Z, ZB, ZB, z, z, s)
    # interior hat at z = 1/2 with h = 1/2: its integral is 1/2
    assert sel.domain_load[0] == pytest.approx(0.5)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31))
def test_superpose_membership_random_states(seed):
    rng = np.random.default_rng(seed)
    s = FESpace(rectangle_mesh(2, 2))
    h1 = IM.from_expressions("sin(r1) - n1", "sin(r1) + abs(r2)")
    g1 = IM.from_expressions("r1 - 1", "r1 + z2")
    u, v = rng.standard_normal((2, s.dof_count))
    first = superpose(h1, h1, g1, g1, u, v, s)
    u2, v2 = u + rng.standard_normal(s.dof_count), v
    second = superpose(h1, h1, g1, g1, u2, v2, s, "nearest", first)
    assert first.all_members and second.all_members


def test_growth_zero_map_accepts_any_positive_certificate():
    cert = GrowthCertificate(constants=(0.5, 2.0, 3.0, 0.1), critical=CRIT6, bounds=(0.1, 0.0, 1.0, "z1"))
    rep = validate_growth(Z, Z, ZB, ZB, cert, CFG, MESH, samples=500)
    assert rep.sampled_passed and rep.first_violation is None


def test_growth_balance_example():
    cert = GrowthCertificate(critical=CRIT6, sigma=(2, 2) + (1,) * 6, theta=(0.5,) * 4)
    rep = validate_growth(Z, Z, ZB, ZB, cert, CFG, MESH, samples=10)
    h1 = next(c for c in rep.checks if c["name"] == "h1 sigma balance")
    assert h1["lhs"] == pytest.approx(2 / 3) and h1["rhs"] == pytest.approx(5 / 6) and h1["passed"]


def test_growth_quadratic_against_linear_claim():
    cert = GrowthCertificate(
        critical={"p1_star": 2.0, "p3_star": 2.0, "p1_sub": 2.0, "p3_sub": 2.0},
        sigma=(0.25,) * 8, theta=(0.1,) * 4,
    )
    sq = IM.from_expressions("r1^2", "r1^2")
    rep = validate_growth(sq, Z, ZB, ZB, cert, CFG, MESH, samples=2000, seed=3)
    assert not rep.passed
    v = rep.first_violation
    assert v["map"] == "h1" and abs(v["point"]["r1"]) > 1 and v["lhs"] > v["rhs"]


def test_growth_needs_critical_exponents_in_1d():
    rep = validate_growth(Z, Z, ZB, ZB, GrowthCertificate(), CFG, MESH, samples=10)
    assert not rep.passed and rep.notes


def test_growth_strong_mode_kappa_range():
    cert = GrowthCertificate(mode="strong", kappa=(7.0, 2.0, 2.0, 2.0), critical=CRIT6, theta=(0.5,) * 4,
                             sigma=(0.5,) * 8)
    rep = validate_growth(Z, Z, ZB, ZB, cert, CFG, MESH, samples=10)
    failed = [c["name"] for c in rep.checks if not c["passed"]]
    assert "1 < kappa1 < p1*" in failed and not rep.passed


def test_growth_reports_lowest_sample_index():
    cert = GrowthCertificate(critical=CRIT6, sigma=(0.5,) * 8, theta=(0.5,) * 4, constants=(1e-9,) * 4)
    one = IM.constant(1, 1)
    rep = validate_growth(one, one, IM.constant(1, 1, "boundary"), ZB, cert, CFG, MESH, samples=50)
    assert rep.first_violation["sample"] == 0 and rep.first_violation["map"] == "h1"


def test_sign_examples():
    rep = validate_sign(IM.constant(-1, 1), Z, ZB, ZB, SignCertificate(m3=1, delta3=1.0), CFG, MESH)
    assert rep.passed
    g2 = IM.from_expressions("r2", "r2", "boundary")
    assert validate_sign(Z, Z, ZB, g2, SignCertificate(m10=1), CFG, MESH).passed
    cube = IM.from_expressions("r1^3", "r1^3")
    rep = validate_sign(cube, Z, ZB, ZB, SignCertificate(m3=1), CFG, MESH)
    assert not rep.passed and rep.first_violation["map"] == "h1"


def test_sign_mirrored_boundary_reported_not_gating():
    g1 = IM.constant(2, 2, "boundary")  # xi r <= ... fails only for r > 0; -xi r fails for r < 0
    cert = SignCertificate(m9=0.1)
    rep = validate_sign(Z, Z, g1, ZB, cert, CFG, MESH, samples=200)
    assert not rep.passed and not rep.extra["mirrored_boundary_passed"]
    g1 = IM.constant(-2, -2, "boundary")
    rep = validate_sign(Z, Z, g1, ZB, SignCertificate(m9=0.1, delta7=10.0), CFG, MESH, samples=200)
    assert rep.passed


def test_sign_negative_delta_fails():
    rep = validate_sign(Z, Z, ZB, ZB, SignCertificate(delta3="z1 - 0.5"), CFG, MESH, samples=10)
    assert not rep.passed


def test_validators_deterministic():
    h = IM.from_expressions("r1^2", "r1^2 + 1")
    cert = SignCertificate(m3=1.0)
    a = validate_sign(h, Z, ZB, ZB, cert, CFG, MESH, seed=11)
    b = validate_sign(h, Z, ZB, ZB, cert, CFG, MESH, seed=11)
    assert a.to_dict() == b.to_dict()


SIGN_TENTH = SignCertificate(m3=0.1, m4=0.1, m5=0.1, m6=0.1, m9=0.1, m10=0.1)


def test_coercivity_condition_examples():
    zero = validate_coercivity_condition(CoercivityCertificate((1, 1, 1, 1), SignCertificate()))
    assert zero.passed and zero.margins == (1.0, 1.0)
    half = SignCertificate(m4=0.5, m6=0.5)
    assert not validate_coercivity_condition(CoercivityCertificate((1, 1, 1, 1), half)).passed
    c = validate_coercivity_condition(CoercivityCertificate((0.63662, 1, 0.63662, 1), SIGN_TENTH, safety_factor=1.0))
    assert c.lhs[0] == pytest.approx(0.527324, abs=1e-12) and c.passed
    with pytest.raises(ValueError):
        validate_coercivity_condition(CoercivityCertificate((0, 1, 1, 1), SIGN_TENTH))


def test_safety_factor_scales_lambdas():
    c = validate_coercivity_condition(CoercivityCertificate((1, 1, 1, 1), SIGN_TENTH, safety_factor=1.5))
    assert c.lhs[0] == pytest.approx(0.2 + 0.2 * 1.5 + 0.2 * 1.5)


def test_coercivity_bound_examples():
    b = coercivity_bound(CoercivityCertificate((1, 1, 1, 1), SignCertificate()), (0, 0, 0, 0))
    assert (b.A, b.B, b.C2) == (1.0, 1.0, 0.0)
    cert = CoercivityCertificate((0.63662, 1, 0.63662, 1), SIGN_TENTH, safety_factor=1.0)
    assert coercivity_bound(cert, (0, 0, 0, 0)).A == pytest.approx(0.472676, abs=1e-12)
    with pytest.raises(ValueError):
        coercivity_bound(CoercivityCertificate((1, 1, 1, 1), SignCertificate(), epsilon=0.0), (0, 0, 0, 0))


def test_coercivity_bound_decreases_in_epsilon():
    vals = []
    for eps in (0.01, 0.05, 0.1, 0.5):
        cert = CoercivityCertificate((1, 1, 1, 1), SIGN_TENTH, alpha=0.3, beta=0.2, epsilon=eps, exponents=CFG)
        vals.append(coercivity_bound(cert, (0, 0, 0, 0)))
    assert all(b.A < a.A and b.B < a.B for a, b in zip(vals, vals[1:]))
    assert all(v.C1 <= 0 for v in vals)


@pytest.mark.parametrize("r, s, eps", [(1.5, 2.0, 0.1), (2.0, 3.0, 0.01), (1.1, 4.0, 2.0)])
def test_young_constant_closed_form(r, s, eps):
    exact = (1 - r / s) * (r / (eps * s)) ** (r / (s - r))
    assert young_constant(r, s, eps) == pytest.approx(exact, rel=1e-9)


def test_young_inequality_holds():
    t = np.logspace(-4, 4, 2001)
    c = young_constant(1.5, 2.5, 0.2)
    assert np.all(t**1.5 <= 0.2 * t**2.5 + c * (1 + 1e-12))


def test_delta_norms():
    m = interval_mesh(4)
    d = delta_norms(SignCertificate(delta3=2.0, delta4="z1", delta7=3.0, delta8=0.0), m)
    assert d == pytest.approx((2.0, 0.5, 3.0, 0.0))
    assert math.isclose(delta_norms(SignCertificate(delta7=1.0), rectangle_mesh(2, 2))[2], 3.0)
