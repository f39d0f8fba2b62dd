"""Hopf differential, end classification, and the rotated-coefficient space."""

import cmath
import math
from fractions import Fraction as F

from wlab import (
    INF,
    FamilyParams,
    Poly,
    QuadDifferential,
    RatFun,
    SpherePoint,
    build,
    class_c_verdict,
    classify_end_foliation,
    end_report,
    hopf_differential,
    quadratic_limit,
    space_Q_membership,
    umbilic_points,
)

ORIGIN = SpherePoint(0.0 + 0.0j)


def _double_pole(a, b):
    """Quadratic differential (a+ib)/z^2 dz^2."""
    return QuadDifferential(RatFun(Poly([complex(a, b)]), Poly([0.0, 0.0, 1.0])))


def test_catenoid_hopf_quadratic_limit_exact():
    cat = build(FamilyParams.catenoid())
    Q = hopf_differential(cat)
    assert quadratic_limit(Q, cat.punctures[0]) == (F(-1, 2), F(0))


def test_quadratic_limit_is_chart_invariant():
    # (a+ib)/z^2 has double poles at 0 and infinity with the same limit
    Q = _double_pole(0.7, -0.3)
    a0, b0 = quadratic_limit(Q, ORIGIN)
    a1, b1 = quadratic_limit(Q, INF)
    assert abs(a0 - a1) < 1e-12 and abs(b0 - b1) < 1e-12
    assert abs(a0 - 0.7) < 1e-12 and abs(b0 - (-0.3)) < 1e-12


def test_classification_table_at_double_poles():
    neg = classify_end_foliation(_double_pole(-0.5, 0.0), ORIGIN)
    assert neg.kind == "CircularMaxRadialMin"
    pos = classify_end_foliation(_double_pole(2.0, 0.0), ORIGIN)
    assert pos.kind == "RadialMaxCircularMin"
    spiral = classify_end_foliation(_double_pole(1.0, 1.0), ORIGIN)
    assert spiral.kind == "LogSpiral"
    assert abs(spiral.rate - (-(1.0 + math.sqrt(2.0)))) < 1e-12


def test_log_spiral_rate_flips_with_b():
    fol = classify_end_foliation(_double_pole(1.0, -1.0), ORIGIN)
    assert fol.kind == "LogSpiral"
    assert abs(fol.rate - (1.0 + math.sqrt(2.0))) < 1e-12


def test_simple_pole_and_higher_order_kinds():
    simple = QuadDifferential(RatFun(Poly([1.0]), Poly([0.0, 1.0])))
    assert classify_end_foliation(simple, ORIGIN).kind == "SingleLeaf"
    third = QuadDifferential(RatFun(Poly([1.0]), Poly([0.0, 0.0, 0.0, 1.0])))
    fol = classify_end_foliation(third, ORIGIN)
    assert fol.kind == "AllLeavesTend"
    assert fol.order == 3


def test_umbilic_points_of_nodoid_two():
    pts = umbilic_points(build(FamilyParams.nodoid(2)))
    assert len(pts) == 2
    orders = sorted((p.is_infinity, k) for p, k in pts)
    assert orders == [(False, 1), (True, 1)]
    assert not umbilic_points(build(FamilyParams.catenoid()))


def test_end_report_planar_obstruction():
    """The two-ended orbit of the first projective family is planar.

    gamma vanishes there, so no closed curvature line can surround the end
    even though the surface is complete and embedded near it.
    """
    W = build(FamilyParams.carlos_first(0.1))
    rep = end_report(W, W.punctures[0])
    assert str(rep.end_type) == "PlanarEmbedded"
    assert rep.foliation.kind == "SingleLeaf"
    assert rep.ord_QH == -1
    assert not rep.closed_line_present
    assert rep.jm_hopf_identity_ok


def test_end_report_higher_order_ends():
    W = build(FamilyParams.carlos_first(0.1))
    rep = end_report(W, W.punctures[2])
    assert rep.nu == 3
    assert rep.ord_QH == -4
    assert rep.foliation.kind == "AllLeavesTend"
    assert rep.jm_hopf_identity_ok


def test_class_c_verdict_catenoid():
    verdict = class_c_verdict(build(FamilyParams.catenoid()))
    assert verdict.in_class_C
    assert verdict.consistency == ()


def test_class_c_verdict_flags_planar_closed_tension():
    # every nodoid end has a double Hopf pole with real nonzero limit, yet
    # the height residue vanishes; the verdict keeps the membership and
    # reports the tension per end
    verdict = class_c_verdict(build(FamilyParams.nodoid(1)))
    assert verdict.in_class_C
    assert len(verdict.consistency) == 2
    assert all("planar embedded end" in note for note in verdict.consistency)


def test_class_c_verdict_rejects_higher_order_ends():
    verdict = class_c_verdict(build(FamilyParams.carlos_second(1.0, "X+")))
    assert not verdict.in_class_C


def test_catenoidal_end_of_second_family():
    for lam in (0.5, 1.0):
        W = build(FamilyParams.carlos_second(lam, "X+"))
        a, b = quadratic_limit(hopf_differential(W), W.punctures[0])
        assert abs(a - lam / 2.0) < 1e-10
        assert abs(b) < 1e-10
        rep = end_report(W, W.punctures[0])
        assert str(rep.end_type) == "CatenoidalEmbedded"
        assert rep.closed_line_present


def test_space_membership_accepts_member():
    params = FamilyParams.qstar(0.5)
    Q = build(params)
    m = space_Q_membership(Q, params.resolved["a"])
    assert m.ok
    assert m.reasons == ()
    assert abs(m.lam - 0.5 ** 4) < 1e-10
    prod = m.alpha1 * m.alpha2
    assert abs(prod.real) < 1e-10 and abs(prod.imag) > 1e-3


def test_space_membership_rejects_rotated_coefficient():
    params = FamilyParams.qstar(0.5)
    Q = build(params)
    rot = cmath.exp(1e-3j)
    Q_rot = QuadDifferential(RatFun(Q.coeff.num.scale(rot), Q.coeff.den))
    m = space_Q_membership(Q_rot, params.resolved["a"])
    assert not m.ok
    assert any("not a nonzero real" in r for r in m.reasons)


def test_space_membership_rejects_wrong_degree():
    params = FamilyParams.qstar(0.5)
    Q = build(params)
    # rebuild the numerator with one zero factor removed
    alpha = complex(params.resolved["alpha"][0], params.resolved["alpha"][1])
    num = Poly([1.0j]) * Poly([-alpha, 1.0]) * Poly([-alpha, 1.0]) * Poly([1.0, alpha.conjugate()])
    Q_bad = QuadDifferential(RatFun(num, Q.coeff.den))
    m = space_Q_membership(Q_bad, params.resolved["a"])
    assert not m.ok
    assert any("degree" in r or "4 zeros" in r for r in m.reasons)
