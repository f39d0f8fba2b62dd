"""Weierstrass data on punctured spheres.

A surface is a pair (g, eta): a rational Gauss map and a rational one-form on
the sphere minus a finite puncture set.  This module carries the full
verification chain: the phi components of the immersion, the condition that
the induced metric neither vanishes on the domain nor stays bounded at the
punctures, residue-based period verification, the involution symmetry laws,
and the topological identities tying degree, end multiplicities, and
ramification together.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import (
    EXACT,
    FLOAT,
    INF,
    MeromorphicForm,
    Poly,
    QQi,
    QuadDifferential,
    RatFun,
    SpherePoint,
    ord_at,
    poly_root_clusters,
    residue_at,
    scalar_conj,
    scalar_is_zero,
    scalar_zero,
    strip_valuation,
    substitute_inverse,
    tau_point,
    tau_pullback,
    to_complex,
    valuation,
)
from .config import DEFAULT, Config


class DocumentError(ValueError):
    """Malformed surface document; location names the offending field."""

    def __init__(self, location: str, message: str):
        self.location = location
        super().__init__(f"{location}: {message}")


@dataclass(frozen=True)
class CheckResult:
    """Boolean verdict plus human-readable diagnostics.

    worst carries the largest violation magnitude seen on the float backend
    (None on the exact backend, where violations are yes/no).
    """

    ok: bool
    details: tuple = ()
    worst: float | None = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class EndResidues:
    alpha: object
    beta: object
    gamma: object


@dataclass(frozen=True)
class EndType:
    kind: str  # PlanarEmbedded | CatenoidalEmbedded | Immersed
    nu: int

    def __str__(self) -> str:
        if self.kind == "Immersed":
            return f"Immersed({self.nu})"
        return self.kind


@dataclass(frozen=True)
class SurfaceReport:
    deg_g: int
    n_ends: int
    nu: tuple
    r_ends: int
    euler_char: int
    total_curvature_over_pi: int
    jorge_meeks_ok: bool
    closed_line_formula_ok: bool
    chern_osserman_slack: int
    bound_inequality_ok: bool
    ends_all_order_two: bool
    ends: tuple
    backend: str
    quotient: dict | None


class WeierstrassData:
    """Gauss map g, one-form eta, puncture set, and the symmetry claim flag.

    tau_symmetric is a claim, not a certified fact: check_tau_compatibility
    decides it.  Only pairwise-distinct punctures are enforced here.
    """

    __slots__ = ("g", "eta", "punctures", "tau_symmetric", "family")

    def __init__(self, g: RatFun, eta: MeromorphicForm,
                 punctures, tau_symmetric: bool = False,
                 family: dict | None = None):
        if g.backend != eta.backend:
            raise ValueError("g and eta use different backends")
        punctures = tuple(punctures)
        if not punctures:
            raise ValueError("at least one puncture is required")
        for i in range(len(punctures)):
            for j in range(i + 1, len(punctures)):
                if punctures[i].same_as(punctures[j]):
                    raise ValueError(f"punctures {i} and {j} coincide")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "punctures", punctures)
        object.__setattr__(self, "tau_symmetric", bool(tau_symmetric))
        object.__setattr__(self, "family", family)

    def __setattr__(self, *_):
        raise AttributeError("WeierstrassData is immutable")

    @property
    def backend(self) -> str:
        return self.g.backend

    @property
    def dh(self) -> MeromorphicForm:
        return MeromorphicForm(self.g * self.eta.coeff)

    def has_puncture(self, p: SpherePoint, cfg: Config = DEFAULT) -> bool:
        return any(p.same_as(q, cfg) for q in self.punctures)

    def __repr__(self):
        return (f"WeierstrassData(g={self.g!r}, eta={self.eta!r}, "
                f"punctures={list(self.punctures)!r})")


def phi_components(W: WeierstrassData):
    """The coordinate forms phi_1 = (1-g^2)/2 eta, phi_2 = i(1+g^2)/2 eta,
    phi_3 = g eta; their squares sum to zero identically."""
    g = W.g
    e = W.eta.coeff
    if W.backend == EXACT:
        half = RatFun.const(QQi(Fraction(1, 2)))
        ihalf = RatFun.const(QQi(0, Fraction(1, 2)))
        one = RatFun.const(QQi(1))
    else:
        half = RatFun.const(0.5 + 0j)
        ihalf = RatFun.const(0.5j)
        one = RatFun.const(1 + 0j)
    g2 = g * g
    return (MeromorphicForm(half * (one - g2) * e),
            MeromorphicForm(ihalf * (one + g2) * e),
            MeromorphicForm(g * e))


def _strip_point(p: Poly, c, cfg: Config) -> tuple[Poly, int]:
    """Factor (z - c)^m out of p; return the cofactor and m."""
    shifted = p.shift(c)
    v = valuation(shifted, cfg)
    if v in (0, float("-inf")):
        return p, 0
    rest = strip_valuation(shifted, v)
    if p.backend == EXACT:
        return rest.shift(-c), v
    return rest.shift(-c), v


def _finite_puncture_values(W: WeierstrassData):
    vals = []
    has_inf = False
    for q in W.punctures:
        if q.is_infinity:
            has_inf = True
        else:
            vals.append(q.value)
    return vals, has_inf


def check_immersion_completeness(W: WeierstrassData, cfg: Config = DEFAULT) -> CheckResult:
    """Immersion: off the punctures the conformal factor (1+|g|^2)|eta| never
    vanishes, which pins the divisor of eta to exactly twice the polar divisor
    of g.  Completeness: at every puncture min(ord eta, ord g^2 eta) <= -1."""
    details = []
    punct_vals, has_inf = _finite_puncture_values(W)

    if W.backend == EXACT:
        num_e, den_e, den_g = W.eta.coeff.num, W.eta.coeff.den, W.g.den
        for c in punct_vals:
            num_e, _ = _strip_point(num_e, c, cfg)
            den_e, _ = _strip_point(den_e, c, cfg)
            den_g, _ = _strip_point(den_g, c, cfg)
        if den_e.degree > 0:
            for loc, mult in poly_root_clusters(den_e, cfg):
                details.append(f"eta has a pole of order {mult} on the domain near z={loc:.6g}")
        target = den_g * den_g
        proportional = False
        if num_e.degree == target.degree:
            lead = num_e.coeffs[-1] / target.coeffs[-1]
            proportional = target.scale(lead) == num_e
        if not proportional:
            details.append(
                "divisor mismatch on the domain: zeros of eta do not equal "
                "the poles of g doubled (got deg {} vs {})".format(
                    num_e.degree, target.degree))
    else:
        def at_puncture(loc: complex) -> bool:
            if any(abs(loc - to_complex(v)) <= cfg.cluster_radius for v in punct_vals):
                return True
            return False

        den_e_clusters = [(l, m) for l, m in poly_root_clusters(W.eta.coeff.den, cfg)
                          if not at_puncture(l)]
        for loc, mult in den_e_clusters:
            details.append(f"eta has a pole of order {mult} on the domain near z={loc:.6g}")
        num_e_clusters = [(l, m) for l, m in poly_root_clusters(W.eta.coeff.num, cfg)
                          if not at_puncture(l)]
        den_g_clusters = [(l, m) for l, m in poly_root_clusters(W.g.den, cfg)
                          if not at_puncture(l)]
        unmatched = list(num_e_clusters)
        for loc, k in den_g_clusters:
            hit = next((i for i, (l, m) in enumerate(unmatched)
                        if abs(l - loc) <= cfg.cluster_radius), None)
            if hit is None:
                details.append(f"pole of g of order {k} near z={loc:.6g} "
                               "without the doubled zero of eta")
            else:
                l, m = unmatched.pop(hit)
                if m != 2 * k:
                    details.append(f"zero of eta of order {m} near z={loc:.6g} "
                                   f"over a pole of g of order {k} (need {2 * k})")
        for loc, m in unmatched:
            details.append(f"zero of eta of order {m} near z={loc:.6g} "
                           "off the poles of g")

    if not has_inf:
        a = ord_at(W.g, INF, cfg)
        n = W.eta.ord_at(INF, cfg)
        if not ((a >= 0 and n == 0) or (a < 0 and n == -2 * a)):
            details.append(f"metric degenerates at infinity: ord g = {a}, ord eta = {n}")

    g2eta = MeromorphicForm(W.g * W.g * W.eta.coeff)
    for q in W.punctures:
        n_eta = W.eta.ord_at(q, cfg)
        n_g2e = g2eta.ord_at(q, cfg)
        if min(n_eta, n_g2e) > -1:
            where = "infinity" if q.is_infinity else f"z={to_complex(q.value):.6g}"
            details.append(f"metric stays finite at puncture {where}: "
                           f"ord eta = {n_eta}, ord g^2 eta = {n_g2e}")

    return CheckResult(not details, tuple(details))


def end_residues(W: WeierstrassData, p: SpherePoint, cfg: Config = DEFAULT) -> EndResidues:
    """alpha = Res dh/g, beta = Res g dh, gamma = Res dh at the puncture p."""
    dh = W.dh
    alpha = residue_at(MeromorphicForm(dh.coeff / W.g), p, cfg)
    beta = residue_at(MeromorphicForm(W.g * dh.coeff), p, cfg)
    gamma = residue_at(dh, p, cfg)
    return EndResidues(alpha, beta, gamma)


def tau_orbit_representatives(punctures, cfg: Config = DEFAULT):
    reps = []
    seen = []
    for q in punctures:
        if any(q.same_as(s, cfg) for s in seen):
            continue
        reps.append(q)
        seen.append(q)
        seen.append(tau_point(q))
    return reps


def _is_real(value, cfg: Config, scale: float = 0.0) -> tuple[bool, float]:
    if isinstance(value, QQi):
        return value.im == 0, 0.0 if value.im == 0 else abs(float(value.im))
    v = complex(value)
    mag = abs(v.imag) / (1.0 + abs(v) + scale)
    return mag <= cfg.eps, mag


def _is_zero_sum(value, scale: float, cfg: Config) -> tuple[bool, float]:
    if isinstance(value, QQi):
        return value.is_zero(), 0.0 if value.is_zero() else abs(value)
    mag = abs(complex(value)) / (1.0 + scale)
    return mag <= cfg.eps, mag


def _form_scale(W: WeierstrassData) -> float:
    """Largest coefficient magnitude among the forms dh/g, g dh and dh.

    Float residues carry roundoff proportional to the coefficients these
    forms are built from, not to the residues themselves, which often
    cancel to near zero.  The period check folds this into its tolerance
    so that a surface is judged relative to the size of its data.
    """
    if W.backend != FLOAT:
        return 0.0
    out = 0.0
    for rf in (W.dh.coeff / W.g, W.g * W.dh.coeff, W.dh.coeff):
        out = max(out, rf.num.max_abs() / max(1.0, rf.den.max_abs()))
    return out


def check_periods(W: WeierstrassData, cfg: Config = DEFAULT) -> CheckResult:
    """No real periods around any puncture: gamma(p) real and
    alpha(p) + conj(beta(p)) = 0.

    On a tau-symmetric surface one representative per involution orbit
    suffices; the symmetry transports the condition to the partner point.
    A residue-theorem guard (sum of gamma over all punctures vanishes) is
    checked first, which is what rules out a lone catenoidal end.
    """
    details = []
    worst = 0.0
    fscale = _form_scale(W)

    gammas = [residue_at(W.dh, q, cfg) for q in W.punctures]
    total = gammas[0]
    for x in gammas[1:]:
        total = total + x
    scale = max((abs(to_complex(x)) for x in gammas), default=0.0)
    ok_sum, mag = _is_zero_sum(total, max(scale, fscale), cfg)
    worst = max(worst, mag)
    if not ok_sum:
        details.append(f"residue theorem violated: sum of gamma residues = "
                       f"{to_complex(total):.3e}")

    reps = (tau_orbit_representatives(W.punctures, cfg)
            if W.tau_symmetric else W.punctures)
    for q in reps:
        res = end_residues(W, q, cfg)
        where = "infinity" if q.is_infinity else f"z={to_complex(q.value):.6g}"
        real_ok, mag = _is_real(res.gamma, cfg, fscale)
        worst = max(worst, mag)
        if not real_ok:
            details.append(f"gamma not real at {where}: {to_complex(res.gamma):.6g}")
        combo = res.alpha + scalar_conj(res.beta)
        comb_scale = abs(to_complex(res.alpha)) + abs(to_complex(res.beta)) + fscale
        zero_ok, mag = _is_zero_sum(combo, comb_scale, cfg)
        worst = max(worst, mag)
        if not zero_ok:
            details.append(f"alpha + conj(beta) nonzero at {where}: "
                           f"{to_complex(combo):.6g}")

    return CheckResult(not details, tuple(details),
                       worst if W.backend == FLOAT else None)


def _forms_equal(a, b, backend: str, cfg: Config) -> bool:
    if backend == EXACT:
        return a == b
    return a.close_to(b, cfg.eps)


def check_tau_compatibility(W: WeierstrassData, cfg: Config = DEFAULT) -> CheckResult:
    """The symmetry laws of data descending to the involution quotient:
    tau_pullback(g) * g = -1, tau_pullback(eta) = -(g^2 eta), and the
    redundant cross-check tau_pullback(dh) = dh."""
    if not W.tau_symmetric:
        raise ValueError("tau compatibility requires the tau_symmetric claim")
    details = []

    for q in W.punctures:
        if not W.has_puncture(tau_point(q), cfg):
            where = "infinity" if q.is_infinity else f"z={to_complex(q.value):.6g}"
            details.append(f"puncture set not tau-closed: image of {where} missing")
    if details:
        return CheckResult(False, tuple(details))

    backend = W.backend
    minus_one = RatFun.const(QQi(-1) if backend == EXACT else -1 + 0j)
    prod = tau_pullback(W.g, cfg) * W.g
    if not _forms_equal(prod, minus_one, backend, cfg):
        details.append("g law fails: tau_pullback(g) * g != -1")

    te = tau_pullback(W.eta, cfg)
    target = MeromorphicForm(-(W.g * W.g * W.eta.coeff))
    if not _forms_equal(te, target, backend, cfg):
        details.append("eta law fails: tau_pullback(eta) != -(g^2 eta)")

    dh = W.dh
    if not _forms_equal(tau_pullback(dh, cfg), dh, backend, cfg):
        details.append("dh cross-check fails: tau_pullback(dh) != dh")

    return CheckResult(not details, tuple(details))


def end_multiplicity(W: WeierstrassData, p: SpherePoint, cfg: Config = DEFAULT) -> int:
    """nu_p: largest pole order among the phi components at p, minus one.
    Components regular or vanishing at p contribute zero to the maximum."""
    worst = 0
    for phi in phi_components(W):
        worst = max(worst, -phi.ord_at(p, cfg))
    return worst - 1


def end_type(W: WeierstrassData, p: SpherePoint, cfg: Config = DEFAULT) -> EndType:
    nu = end_multiplicity(W, p, cfg)
    if nu >= 2:
        return EndType("Immersed", nu)
    gamma = residue_at(W.dh, p, cfg)
    if scalar_is_zero(gamma, cfg):
        return EndType("PlanarEmbedded", nu)
    return EndType("CatenoidalEmbedded", nu)


def gauss_value_at(g: RatFun, p: SpherePoint, cfg: Config = DEFAULT):
    """g(p) on the sphere: a scalar, or None for a pole (value = infinity)."""
    if p.is_infinity:
        if ord_at(g, INF, cfg) < 0:
            return None
        return substitute_inverse(g)(scalar_zero(g.backend))
    if ord_at(g, p, cfg) < 0:
        return None
    return g(p.value)


def branching_order(g: RatFun, p: SpherePoint, cfg: Config = DEFAULT) -> int:
    """r_p(g) = (local multiplicity of g at p) - 1; zero off branch points."""
    if p.is_infinity:
        h = substitute_inverse(g)
        return branching_order(h, SpherePoint.finite(scalar_zero(g.backend)), cfg)
    o = ord_at(g, p, cfg)
    if o < 0:
        return -o - 1
    c = g(p.value)
    if g.backend == EXACT and not isinstance(c, QQi):
        c = QQi(c)
    return ord_at(g - RatFun.const(c), p, cfg) - 1


def parallel_ends(W: WeierstrassData, cfg: Config = DEFAULT) -> CheckResult:
    """All ends parallel: the logarithmic differential dg/g has a real
    residue at every puncture."""
    logd = MeromorphicForm(W.g.derivative() / W.g)
    details = []
    for q in W.punctures:
        r = residue_at(logd, q, cfg)
        ok, _ = _is_real(r, cfg)
        if not ok:
            where = "infinity" if q.is_infinity else f"z={to_complex(q.value):.6g}"
            details.append(f"non-real residue of dg/g at {where}: {to_complex(r):.6g}")
    return CheckResult(not details, tuple(details))


def degree_of(g: RatFun) -> int:
    return int(max(g.num.degree, g.den.degree))


def topology_report(W: WeierstrassData, cfg: Config = DEFAULT) -> SurfaceReport:
    """Degree, end multiplicities, ramification, and the identity flags.

    The closed-curvature-line formula and the two-sided end-count bound hold
    in the regime where every end carries a double pole of the Hopf
    differential; outside that regime both flags are vacuously true and the
    regime itself is reported separately (ends_all_order_two).
    """
    from . import hopf as _hopf

    deg = degree_of(W.g)
    n_ends = len(W.punctures)
    Q = _hopf.hopf_differential(W, cfg)
    ends = tuple(_hopf.end_report(W, q, Q, cfg) for q in W.punctures)
    nu = tuple(e.nu for e in ends)
    r_total = sum(e.r_g for e in ends)

    jorge_meeks_ok = (2 * deg == -2 + sum(v + 1 for v in nu))
    all_order_two = all(e.ord_QH == -2 for e in ends)
    closed_line_formula_ok = (not all_order_two) or (2 == -2 * deg + 2 * n_ends + r_total)
    slack = 1 + deg - n_ends
    bound_inequality_ok = (not all_order_two) or (2 <= n_ends <= 1 + deg)

    quotient = None
    if W.tau_symmetric:
        quotient = {
            "n_ends": n_ends // 2,
            "r_ends": r_total // 2,
            "euler_char": 1,
            "total_curvature_over_pi": -2 * deg,
        }

    return SurfaceReport(
        deg_g=deg,
        n_ends=n_ends,
        nu=nu,
        r_ends=r_total,
        euler_char=2,
        total_curvature_over_pi=-4 * deg,
        jorge_meeks_ok=jorge_meeks_ok,
        closed_line_formula_ok=closed_line_formula_ok,
        chern_osserman_slack=slack,
        bound_inequality_ok=bound_inequality_ok,
        ends_all_order_two=all_order_two,
        ends=ends,
        backend=W.backend,
        quotient=quotient,
    )


# --- JSON surface documents -------------------------------------------------

def scalar_encode(s):
    if isinstance(s, QQi):
        return [str(s.re), str(s.im)]
    v = complex(s)
    return [v.real, v.imag]


def scalar_decode(v, backend: str, location: str):
    if not isinstance(v, (list, tuple)) or len(v) != 2:
        raise DocumentError(location, "scalar must be a [re, im] pair")
    re, im = v
    if backend == EXACT:
        if not isinstance(re, str) or not isinstance(im, str):
            raise DocumentError(location, "exact scalars are decimal-fraction strings")
        try:
            return QQi(Fraction(re), Fraction(im))
        except (ValueError, ZeroDivisionError) as exc:
            raise DocumentError(location, f"bad rational: {exc}") from None
    if not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in (re, im)):
        raise DocumentError(location, "float scalars are [number, number]")
    return complex(re, im)


def point_encode(p: SpherePoint):
    if p.is_infinity:
        return "inf"
    return scalar_encode(p.value)


def point_decode(v, backend: str, location: str) -> SpherePoint:
    if v == "inf":
        return INF
    return SpherePoint.finite(scalar_decode(v, backend, location))


def _ratfun_encode(f: RatFun) -> dict:
    return {"num": [scalar_encode(c) for c in f.num.coeffs],
            "den": [scalar_encode(c) for c in f.den.coeffs]}


def _ratfun_decode(doc, backend: str, location: str) -> RatFun:
    if not isinstance(doc, dict) or "num" not in doc or "den" not in doc:
        raise DocumentError(location, "rational function needs num and den lists")
    num = [scalar_decode(c, backend, f"{location}.num[{i}]")
           for i, c in enumerate(doc["num"])]
    den = [scalar_decode(c, backend, f"{location}.den[{i}]")
           for i, c in enumerate(doc["den"])]
    if not den or all(scalar_is_zero(c) for c in den):
        raise DocumentError(f"{location}.den", "denominator is zero")
    return RatFun(Poly(num, backend) if num else Poly.zero(backend),
                  Poly(den, backend))


def surface_to_doc(W: WeierstrassData) -> dict:
    doc = {
        "schema": 1,
        "kind": "weierstrass",
        "backend": W.backend,
        "g": _ratfun_encode(W.g),
        "eta": _ratfun_encode(W.eta.coeff),
        "punctures": [point_encode(q) for q in W.punctures],
        "tau_symmetric": W.tau_symmetric,
    }
    if W.family is not None:
        doc["family"] = W.family
    return doc


def surface_from_doc(doc) -> WeierstrassData:
    if not isinstance(doc, dict):
        raise DocumentError("$", "surface document must be an object")
    kind = doc.get("kind", "weierstrass")
    if kind != "weierstrass":
        raise DocumentError("$.kind", f"unsupported kind {kind!r}")
    backend = doc.get("backend")
    if backend not in (EXACT, FLOAT):
        raise DocumentError("$.backend", "backend must be 'exact' or 'float'")
    if "g" not in doc or "eta" not in doc:
        raise DocumentError("$", "surface document needs g and eta")
    g = _ratfun_decode(doc["g"], backend, "$.g")
    eta = MeromorphicForm(_ratfun_decode(doc["eta"], backend, "$.eta"))
    raw_punct = doc.get("punctures")
    if not isinstance(raw_punct, list) or not raw_punct:
        raise DocumentError("$.punctures", "non-empty puncture list required")
    punctures = [point_decode(v, backend, f"$.punctures[{i}]")
                 for i, v in enumerate(raw_punct)]
    tau_flag = doc.get("tau_symmetric", False)
    if not isinstance(tau_flag, bool):
        raise DocumentError("$.tau_symmetric", "must be a boolean")
    family = doc.get("family")
    try:
        return WeierstrassData(g, eta, punctures, tau_flag, family)
    except ValueError as exc:
        raise DocumentError("$", str(exc)) from None
