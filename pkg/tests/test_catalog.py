"""Surface families: parameter solvers, admissibility, and cross checks."""

import math
from fractions import Fraction as F

import pytest

from wlab import (
    EXACT,
    FLOAT,
    FamilyParams,
    QQi,
    build,
    carlos_first_interval,
    catalog_entries,
    check_periods,
    check_tau_compatibility,
    end_residues,
    solve_family_parameters,
    surface_to_doc,
)
from wlab.catalog import CARLOS_SECOND_BRANCHES

SQRT240 = math.sqrt(240.0)


def test_admissible_interval_bracket():
    r, R = carlos_first_interval()
    assert abs(r * R - 1.0) < 1e-12
    assert 0.22 < r < 0.23
    # endpoints are roots of the discriminant 240 L^4 - 4704 L^2 + 240
    for root in (r, R):
        P = 240.0 * root ** 4 - 4704.0 * root ** 2 + 240.0
        assert abs(P) < 1e-6 * max(1.0, 4704.0 * root ** 2)


def test_first_family_rejects_gap_parameters():
    r, R = carlos_first_interval()
    for lam in (r + 1e-3, 1.0, R - 1e-3):
        with pytest.raises(ValueError, match="admissible"):
            solve_family_parameters("carlos_first", lam)


def test_first_family_minus_branch_pole_window():
    lam = 1.0 / math.sqrt(35.0)
    with pytest.raises(ValueError, match="parameter pole"):
        solve_family_parameters("carlos_first", lam, sign="-")
    # the rationalized plus branch is regular at the same parameter, where
    # the quadratic degenerates to the linear equation 10(1+L^2) q^2 = 35 - L^2
    q2 = solve_family_parameters("carlos_first", lam, sign="+")["q_squared"]
    residual = (1.0 - 35.0 * lam ** 2) * q2 * q2 + 10.0 * (1.0 + lam ** 2) * q2 - (35.0 - lam ** 2)
    assert abs(residual) < 1e-9 * max(1.0, q2 * q2)


def test_first_family_solution_satisfies_residue_quadratic():
    for lam in (0.05, 0.12, 5.0):
        for sign in ("+", "-"):
            solved = solve_family_parameters("carlos_first", lam, sign=sign)
            q2 = solved["q_squared"]
            residual = (1.0 - 35.0 * lam ** 2) * q2 * q2 + 10.0 * (1.0 + lam ** 2) * q2 - (35.0 - lam ** 2)
            assert abs(residual) < 1e-9 * max(1.0, abs(q2) ** 2)


def test_first_family_small_lambda_anchors():
    """As lambda -> 0 the two q^2 branches tend to (-10 +- sqrt(240))/2."""
    plus = solve_family_parameters("carlos_first", 1e-6, sign="+")["q_squared"]
    minus = solve_family_parameters("carlos_first", 1e-6, sign="-")["q_squared"]
    assert abs(plus - (-10.0 + SQRT240) / 2.0) < 1e-4
    assert abs(minus - (-10.0 - SQRT240) / 2.0) < 1e-4


def test_second_family_branch_anchors_large_lambda():
    # reciprocal squared-pole limits of the four labeled branches
    lam = 1e6
    got = {}
    for branch in CARLOS_SECOND_BRANCHES:
        p2 = solve_family_parameters("carlos_second", lam, branch=branch)["p_squared"]
        got[branch] = 1.0 / complex(p2[0], p2[1])
    assert abs(got["X-"] - (-10.0 - SQRT240) / 2.0) < 1e-3
    assert abs(got["Y+"] - (-10.0 + SQRT240) / 2.0) < 1e-3
    assert abs(got["X+"]) < 1e-3
    assert abs(got["Y-"]) < 1e-3


def test_second_family_all_branches_valid_both_signs():
    for branch in CARLOS_SECOND_BRANCHES:
        for lam in (0.8, -1.3):
            W = build(FamilyParams.carlos_second(lam, branch))
            assert check_periods(W).ok
            assert check_tau_compatibility(W).ok
            gamma = end_residues(W, W.punctures[0]).gamma
            assert abs(complex(gamma) - (-lam)) < 1e-9


def test_second_family_rejects_zero_lambda():
    with pytest.raises(ValueError):
        solve_family_parameters("carlos_second", 0.0)
    with pytest.raises(ValueError):
        solve_family_parameters("carlos_second", 1.0, branch="Z+")


def test_nodoid_punctures_and_backend():
    for n, backend in ((1, EXACT), (2, FLOAT), (3, EXACT), (4, FLOAT)):
        W = build(FamilyParams.nodoid(n))
        assert W.backend == backend, n
        assert len(W.punctures) == n + 1
        for p in W.punctures:
            z = p.to_complex()
            assert abs(z ** (n + 1) - 1.0) < 1e-12


def test_nodoid_rejects_bad_order():
    with pytest.raises(ValueError):
        FamilyParams.nodoid(0)


def test_projective_validation_messages():
    ok = dict(m=5, k=(1, 0), n=(2, 4), a=(1.0 + 0.0j,),
              b=(0.4 + 0.1j, -0.4 - 0.1j, 0.2 - 0.3j, -0.2 + 0.3j))
    FamilyParams.general_projective(**ok)

    with pytest.raises(ValueError, match="odd"):
        FamilyParams.general_projective(**{**ok, "m": 4})
    with pytest.raises(ValueError, match="per puncture orbit"):
        FamilyParams.general_projective(**{**ok, "n": (2, 2, 2)})
    with pytest.raises(ValueError, match=">= 2"):
        FamilyParams.general_projective(**{**ok, "n": (5, 1)})
    with pytest.raises(ValueError, match="sum of n_j"):
        FamilyParams.general_projective(**{**ok, "n": (2, 3)})
    with pytest.raises(ValueError, match="k_j"):
        FamilyParams.general_projective(**{**ok, "k": (1, -1)})


def test_projective_route_matches_second_family():
    """The dedicated second-family builder is an instance of the general one."""
    import cmath

    lam = 1.0
    W1 = build(FamilyParams.carlos_second(lam, "X+"))
    p2 = W1.family["resolved"]["p_squared"]
    q2 = W1.family["resolved"]["q_squared"]
    p = cmath.sqrt(complex(p2[0], p2[1]))
    q = cmath.sqrt(complex(q2[0], q2[1]))
    W2 = build(FamilyParams.general_projective(5, (1, 0), (2, 4), (1.0 + 0.0j,), (p, -p, q, -q)))
    assert W1.g.close_to(W2.g, 1e-9)
    assert W1.eta.coeff.close_to(W2.eta.coeff, 1e-9)
    assert len(W2.punctures) == len(W1.punctures) == 4


def test_projective_exactness_follows_the_inputs():
    exact = FamilyParams.general_projective(
        3, (1, 0), (2, 2), (QQi(2),), (QQi(F(1, 2), F(1, 3)), QQi(F(-1, 3))))
    assert build(exact).backend == EXACT
    floaty = FamilyParams.general_projective(3, (1, 0), (2, 2), (0.5 + 0.2j,), (0.1j, -0.4))
    assert build(floaty).backend == FLOAT


def test_qstar_positive_root():
    params = FamilyParams.qstar(0.5)
    a = params.resolved["a"]
    assert a > 0
    t = 0.5
    value = 2 * t * (1 - t * t) * a * a + math.sqrt(2.0) * (t ** 4 - 4 * t * t + 1) * a - 2 * t * (1 - t * t)
    assert abs(value) < 1e-12
    with pytest.raises(ValueError):
        FamilyParams.qstar(1.0)


def test_catalog_entries_shape():
    entries = catalog_entries()
    names = {e["family"] for e in entries}
    assert {"catenoid", "enneper", "nodoid", "carlos_first", "carlos_second",
            "general_projective", "qstar"} <= names
    for e in entries:
        assert e["kind"] in ("surface", "quad_differential")
        assert isinstance(e["summary"], str) and e["summary"]


def test_build_keeps_family_metadata():
    W = build(FamilyParams.carlos_first(0.1, "-"))
    doc = surface_to_doc(W)
    assert doc["family"]["name"] == "carlos_first"
    assert doc["family"]["sign"] == "-"
    assert "q_squared" in doc["family"]["resolved"]
