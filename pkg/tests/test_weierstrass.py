"""Surface data model, period and metric checks, and the document round trip."""

import json

import numpy as np
import pytest

from wlab import (
    INF,
    DocumentError,
    FamilyParams,
    MeromorphicForm,
    Poly,
    QQi,
    RatFun,
    SpherePoint,
    WeierstrassData,
    build,
    check_immersion_completeness,
    check_periods,
    check_tau_compatibility,
    end_residues,
    phi_components,
    surface_from_doc,
    surface_to_doc,
    topology_report,
)

CATENOID = build(FamilyParams.catenoid())
ENNEPER = build(FamilyParams.enneper())

# g = z, eta = i dz / z^2 on {0, inf}: gamma(0) = i is not real, so the
# vertical period around 0 cannot close.
GAMMA_I_DOC = {
    "schema": 1,
    "kind": "weierstrass",
    "backend": "exact",
    "g": {"num": [["0", "0"], ["1", "0"]], "den": [["1", "0"]]},
    "eta": {"num": [["0", "1"]], "den": [["0", "0"], ["0", "0"], ["1", "0"]]},
    "punctures": [["0", "0"], "inf"],
    "tau_symmetric": False,
}


def _val(rf, z):
    num = list(reversed(rf.num.to_complex_list()))
    den = list(reversed(rf.den.to_complex_list()))
    return np.polyval(num, z) / np.polyval(den, z)


def test_catenoid_end_residues():
    res0 = end_residues(CATENOID, CATENOID.punctures[0])
    assert res0.gamma == QQi(1)
    assert res0.alpha == QQi(0)
    assert res0.beta == QQi(0)
    res_inf = end_residues(CATENOID, CATENOID.punctures[1])
    assert res_inf.gamma == QQi(-1)


def test_phi_is_a_null_curve():
    """phi1^2 + phi2^2 + phi3^2 must vanish identically."""
    for W in (CATENOID, ENNEPER, build(FamilyParams.nodoid(2))):
        p1, p2, p3 = phi_components(W)
        for z in (0.37 + 0.29j, -1.4 + 0.8j, 2.2 - 0.6j):
            s = _val(p1.coeff, z) ** 2 + _val(p2.coeff, z) ** 2 + _val(p3.coeff, z) ** 2
            scale = max(abs(_val(p3.coeff, z)) ** 2, 1.0)
            assert abs(s) <= 1e-12 * scale


def test_periods_close_for_catalog_surfaces():
    for W in (CATENOID, ENNEPER, build(FamilyParams.nodoid(3))):
        result = check_periods(W)
        assert result.ok, result.details


def test_periods_reject_imaginary_gamma():
    W = surface_from_doc(GAMMA_I_DOC)
    result = check_periods(W)
    assert not result.ok
    assert any("gamma not real" in d for d in result.details)


def test_residue_sum_guard_fires_first():
    """A surface whose dh drops residue off the puncture set is inconsistent.

    dh = -dz/(z(z-1)) has gamma(0) = 1 but also a pole at z = 1 outside the
    puncture set, so the gamma residues over {0, inf} sum to 1, not 0.
    """
    g = RatFun(Poly([QQi(0), QQi(1)]), Poly([QQi(1)]))
    eta = MeromorphicForm(RatFun(Poly([QQi(-1)]), Poly([QQi(0), QQi(0), QQi(-1), QQi(1)])))
    W = WeierstrassData(g, eta, [SpherePoint(QQi(0)), INF], tau_symmetric=True)
    result = check_periods(W)
    assert not result.ok
    assert any("residue theorem violated" in d for d in result.details)


def test_immersion_and_completeness_accept_enneper():
    result = check_immersion_completeness(ENNEPER)
    assert result.ok, result.details


def test_completeness_rejects_missing_puncture():
    # catenoid data with the puncture at infinity dropped: the metric blows
    # up there without a matching end.
    W = WeierstrassData(CATENOID.g, CATENOID.eta, [SpherePoint(QQi(0))])
    result = check_immersion_completeness(W)
    assert not result.ok
    assert any("metric" in d for d in result.details)


def test_tau_compatibility_of_symmetric_family():
    W = build(FamilyParams.carlos_second(1.0, "X+"))
    assert W.tau_symmetric
    result = check_tau_compatibility(W)
    assert result.ok, result.details


def test_catenoid_is_not_tau_symmetric():
    assert not CATENOID.tau_symmetric


def test_doc_round_trip():
    doc = surface_to_doc(CATENOID)
    W2 = surface_from_doc(doc)
    assert surface_to_doc(W2) == doc
    assert W2.backend == CATENOID.backend
    assert len(W2.punctures) == 2


def test_doc_round_trip_float_backend():
    W = build(FamilyParams.carlos_first(0.1))
    doc = surface_to_doc(W)
    W2 = surface_from_doc(doc)
    r1 = end_residues(W, W.punctures[2])
    r2 = end_residues(W2, W2.punctures[2])
    assert abs(complex(r1.gamma) - complex(r2.gamma)) < 1e-12


def test_document_errors_carry_a_location():
    with pytest.raises(DocumentError) as err:
        surface_from_doc({"schema": 1, "kind": "weierstrass", "backend": "quad"})
    assert "$.backend" in str(err.value)

    bad = dict(GAMMA_I_DOC)
    bad["punctures"] = "everywhere"
    with pytest.raises(DocumentError) as err:
        surface_from_doc(bad)
    assert "punctures" in str(err.value)


def test_doc_json_is_serializable():
    text = json.dumps(surface_to_doc(ENNEPER))
    assert surface_from_doc(json.loads(text)).punctures[0].is_infinity


def test_topology_report_catenoid():
    rep = topology_report(CATENOID)
    assert rep.deg_g == 1
    assert rep.n_ends == 2
    assert rep.nu == (1, 1)
    assert rep.euler_char == 2
    assert rep.total_curvature_over_pi == -4
    assert rep.jorge_meeks_ok
    assert rep.chern_osserman_slack == 0


def test_topology_report_enneper():
    rep = topology_report(ENNEPER)
    assert rep.n_ends == 1
    assert rep.nu == (3,)
    assert rep.jorge_meeks_ok
    # the single end has multiplicity three, so it is not embedded and its
    # Hopf pole order is not two
    assert not rep.ends_all_order_two
