"""Hopf differential analysis: curvature-line dynamics at the ends.

The Hopf differential of a Weierstrass pair is Q = -1/2 dg (x) eta.  Its
zeros are the umbilics, its pole order at an end decides the qualitative
picture of the principal foliations there, and for double poles the
quadratic limit (a, b) separates radial, circular, and log-spiral behavior.
"""

from __future__ import annotations

import math
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
    laurent_coefficient,
    ord_at,
    poly_root_clusters,
    residue_at,
    scalar_is_zero,
    to_complex,
)
from .config import DEFAULT, Config
from .weierstrass import (
    WeierstrassData,
    branching_order,
    end_multiplicity,
    end_type,
)


@dataclass(frozen=True)
class FoliationClass:
    """Dynamics of the principal foliations near an isolated pole of Q.

    kind is one of Regular, SingleLeaf, RadialMaxCircularMin,
    CircularMaxRadialMin, LogSpiral, AllLeavesTend.  The quadratic limit
    (a, b) is set for double poles; rate only for LogSpiral, where it is
    -(a + sqrt(a^2+b^2))/b.
    """

    kind: str
    order: int
    a: float | None = None
    b: float | None = None
    rate: float | None = None


@dataclass(frozen=True)
class EndReport:
    end: SpherePoint
    nu: int
    ord_QH: int
    r_g: int
    gamma: object
    end_type: object
    foliation: FoliationClass
    closed_line_present: bool
    jm_hopf_identity_ok: bool


@dataclass(frozen=True)
class ClassCVerdict:
    in_class_C: bool
    consistency: tuple

    @property
    def consistent(self) -> bool:
        return not self.consistency


@dataclass(frozen=True)
class SpaceQMembership:
    ok: bool
    reasons: tuple
    lam: float | None = None
    alpha1: complex | None = None
    alpha2: complex | None = None

    def __bool__(self) -> bool:
        return self.ok


def _to_float_ratfun(f: RatFun) -> RatFun:
    if f.backend == FLOAT:
        return f
    return RatFun(Poly(f.num.to_complex_list() or [], FLOAT) if f.num.coeffs else Poly.zero(FLOAT),
                  Poly(f.den.to_complex_list(), FLOAT))


def _net_order_clusters(f: RatFun, cfg: Config = DEFAULT) -> list[tuple[complex, int]]:
    """Zero/pole locations of f with net multiplicities, float-localized.

    Works on unreduced data: clusters from the numerator and denominator are
    merged by location, so factors present on both sides cancel out.
    """
    ff = _to_float_ratfun(f)
    entries: list[tuple[complex, int]] = []

    def absorb(clusters, sign):
        for loc, m in clusters:
            for i, (l, n) in enumerate(entries):
                if abs(l - loc) <= cfg.cluster_radius * max(1.0, abs(l)):
                    entries[i] = (l, n + sign * m)
                    break
            else:
                entries.append((loc, sign * m))

    absorb(poly_root_clusters(ff.num, cfg), +1)
    absorb(poly_root_clusters(ff.den, cfg), -1)
    return [(l, n) for l, n in entries if n != 0]


def hopf_differential(W: WeierstrassData, cfg: Config = DEFAULT) -> QuadDifferential:
    """Q = -1/2 dg (x) eta as a rational quadratic differential.

    For valid immersion data Q has no poles off the punctures; a pole found
    on the domain raises with the offending location.
    """
    if W.backend == EXACT:
        half = QQi(-Fraction(1, 2))
    else:
        half = -0.5 + 0j
    coeff = (W.g.derivative() * W.eta.coeff) * half
    Q = QuadDifferential(coeff)

    punct_vals = [to_complex(q.value) for q in W.punctures if not q.is_infinity]
    has_inf = any(q.is_infinity for q in W.punctures)

    def off_punctures(loc: complex) -> bool:
        return all(abs(loc - v) > cfg.cluster_radius * max(1.0, abs(v))
                   for v in punct_vals)

    for loc, net in _net_order_clusters(coeff, cfg):
        if net < 0 and off_punctures(loc):
            raise ValueError(
                f"Hopf differential has a pole of order {-net} on the domain "
                f"near z={loc:.6g} (invalid immersion data)")
    if not has_inf and Q.ord_at(INF, cfg) < 0:
        raise ValueError(
            "Hopf differential has a pole at infinity, which is not a puncture "
            "(invalid immersion data)")
    return Q


def _nearest_other_pole(chart: RatFun, cfg: Config) -> float:
    dist = math.inf
    for loc, net in _net_order_clusters(chart, cfg):
        if net < 0 and abs(loc) > cfg.cluster_radius:
            dist = min(dist, abs(loc))
    return dist


def quadratic_limit(Q: QuadDifferential, p: SpherePoint, cfg: Config = DEFAULT):
    """(a, b) with a + ib = lim (z-p)^2 phi(z) in a chart centered at p.

    The leading coefficient of a double pole of a quadratic differential is
    chart-invariant, so the value does not depend on the chart choice.
    Exact backend reads the Laurent coefficient; float backend extrapolates
    (z-p)^2 phi along shrinking radii and insists the extrapolation settles.
    """
    o = Q.ord_at(p, cfg)
    if o < -2:
        raise ValueError(f"quadratic limit undefined: pole order {-o} exceeds 2")
    chart = Q.centered_chart(p)
    if Q.backend == EXACT:
        c = laurent_coefficient(chart, QQi(), -2, cfg)
        return (c.re, c.im)

    r0 = min(0.1, 0.25 * _nearest_other_pole(chart, cfg))
    theta = 0.37
    direction = complex(math.cos(theta), math.sin(theta))

    def sample(r: float) -> complex:
        z = r * direction
        return z * z * chart(z)

    xs = [r0 / (2 ** k) for k in range(cfg.richardson_levels)]
    ys = [sample(r) for r in xs]
    t = list(ys)
    n = len(xs)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            t[i] = (xs[i - j] * t[i] - xs[i] * t[i - 1]) / (xs[i - j] - xs[i])
    err = abs(t[n - 1] - t[n - 2])
    if err > cfg.richardson_agreement * (1.0 + abs(t[n - 1])):
        raise ValueError(f"quadratic limit did not converge (residual {err:.3e})")
    return (t[n - 1].real, t[n - 1].imag)


def classify_end_foliation(Q: QuadDifferential, p: SpherePoint,
                           cfg: Config = DEFAULT) -> FoliationClass:
    """Classification by pole order n, refined by the quadratic limit at n=2."""
    o = Q.ord_at(p, cfg)
    n = -o
    if n <= 0:
        return FoliationClass("Regular", 0)
    if n == 1:
        return FoliationClass("SingleLeaf", 1)
    if n >= 3:
        return FoliationClass("AllLeavesTend", n)
    a, b = quadratic_limit(Q, p, cfg)
    af, bf = float(a), float(b)
    b_zero = (b == 0) if Q.backend == EXACT else abs(bf) <= cfg.eps * (1.0 + abs(af))
    if b_zero:
        if af > 0:
            return FoliationClass("RadialMaxCircularMin", 2, af, 0.0)
        return FoliationClass("CircularMaxRadialMin", 2, af, 0.0)
    rate = -(af + math.hypot(af, bf)) / bf
    return FoliationClass("LogSpiral", 2, af, bf, rate)


def end_report(W: WeierstrassData, p: SpherePoint,
               Q: QuadDifferential | None = None,
               cfg: Config = DEFAULT) -> EndReport:
    if Q is None:
        Q = hopf_differential(W, cfg)
    nu = end_multiplicity(W, p, cfg)
    o = Q.ord_at(p, cfg)
    r = branching_order(W.g, p, cfg)
    fol = classify_end_foliation(Q, p, cfg)
    gamma = residue_at(W.dh, p, cfg)
    closed = fol.kind in ("RadialMaxCircularMin", "CircularMaxRadialMin")
    return EndReport(
        end=p,
        nu=nu,
        ord_QH=o,
        r_g=r,
        gamma=gamma,
        end_type=end_type(W, p, cfg),
        foliation=fol,
        closed_line_present=closed,
        jm_hopf_identity_ok=(nu == r - o - 1),
    )


def class_c_verdict(W: WeierstrassData, cfg: Config = DEFAULT) -> ClassCVerdict:
    """Every end carries a closed principal line iff each end has a double
    pole of Q with nonzero real quadratic limit.  Cross-checks catch the
    combinations the structure theory forbids."""
    Q = hopf_differential(W, cfg)
    reports = [end_report(W, q, Q, cfg) for q in W.punctures]
    in_c = all(r.closed_line_present for r in reports)
    notes = []
    for r in reports:
        if r.end_type.kind == "PlanarEmbedded" and r.closed_line_present:
            where = "infinity" if r.end.is_infinity else f"z={to_complex(r.end.value):.6g}"
            notes.append(f"planar embedded end at {where} cannot carry a closed "
                         "curvature line")
    if W.tau_symmetric and len(W.punctures) == 2 and in_c:
        notes.append("single-ended quotient surface cannot be in class C")
    return ClassCVerdict(in_class_C=in_c, consistency=tuple(notes))


def umbilic_points(W: WeierstrassData, cfg: Config = DEFAULT):
    """Zeros of Q on the domain with multiplicities.

    Cross-checked against the branch points of g: off the punctures the two
    computations must agree point-for-point with multiplicity r_q(g), and a
    disagreement raises (it would mean the two pipelines drifted apart).
    """
    Q = hopf_differential(W, cfg)
    punct_vals = [to_complex(q.value) for q in W.punctures if not q.is_infinity]
    has_inf_puncture = any(q.is_infinity for q in W.punctures)

    def off_punctures(loc: complex) -> bool:
        return all(abs(loc - v) > cfg.cluster_radius * max(1.0, abs(v))
                   for v in punct_vals)

    zeros = [(loc, net) for loc, net in _net_order_clusters(Q.coeff, cfg)
             if net > 0 and off_punctures(loc)]
    if not has_inf_puncture:
        o_inf = Q.ord_at(INF, cfg)
        if o_inf > 0:
            zeros.append((None, o_inf))

    branch = []
    dg = W.g.derivative()
    for loc, net in _net_order_clusters(dg, cfg):
        if not off_punctures(loc):
            continue
        r = net if net >= 0 else -net - 2
        if r > 0:
            branch.append((loc, r))
    if not has_inf_puncture:
        r_inf = branching_order(W.g, INF, cfg)
        if r_inf > 0:
            branch.append((None, r_inf))

    def canon(items):
        finite = sorted(((l, m) for l, m in items if l is not None),
                        key=lambda t: (round(t[0].real, 6), round(t[0].imag, 6)))
        at_inf = [(l, m) for l, m in items if l is None]
        return finite + at_inf

    zeros_c, branch_c = canon(zeros), canon(branch)
    agree = len(zeros_c) == len(branch_c)
    if agree:
        for (lz, mz), (lb, mb) in zip(zeros_c, branch_c):
            if mz != mb:
                agree = False
                break
            if (lz is None) != (lb is None):
                agree = False
                break
            if lz is not None and abs(lz - lb) > cfg.cluster_radius * max(1.0, abs(lz)):
                agree = False
                break
    if not agree:
        raise RuntimeError(
            "internal consistency failure: zeros of the Hopf differential "
            f"{zeros_c} disagree with the branch points of g {branch_c}")

    return [(INF if l is None else SpherePoint.finite(l), m) for l, m in zeros_c]


def space_Q_membership(Q: QuadDifferential, a: float,
                       cfg: Config = DEFAULT) -> SpaceQMembership:
    """Membership in the model space of quadratic differentials on the
    four-punctured sphere {0, a, -1/a, inf}:

        i lam (z - a1)(z - a2)(conj(a1) z + 1)(conj(a2) z + 1)
        / (z^2 (z - a)^2 (a z + 1)^2)

    with lam real nonzero, a1 a2 purely imaginary nonzero, and
    (a - a1)(a - a2)(a conj(a1) + 1)(a conj(a2) + 1) purely imaginary nonzero.
    """
    if a == 0:
        raise ValueError("the pole parameter a must be a nonzero real")
    reasons = []
    coeff = _to_float_ratfun(Q.coeff)

    poles_wanted = [0j, complex(a), complex(-1.0 / a)]
    nets = _net_order_clusters(coeff, cfg)
    zero_list = []
    pole_seen = {i: 0 for i in range(3)}
    for loc, net in nets:
        if net < 0:
            hit = next((i for i, w in enumerate(poles_wanted)
                        if abs(loc - w) <= cfg.root_merge_radius * max(1.0, abs(w))), None)
            if hit is None:
                reasons.append(f"unexpected pole of order {-net} near z={loc:.6g}")
            else:
                pole_seen[hit] = -net
        else:
            zero_list.append((loc, net))
    for i, w in enumerate(poles_wanted):
        if pole_seen[i] != 2:
            reasons.append(f"pole at z={w:.6g} has order {pole_seen[i]}, need 2")

    deg_drop = coeff.den.degree - coeff.num.degree
    n_zeros = sum(m for _, m in zero_list)
    if deg_drop != 2:
        reasons.append(f"numerator degree must be exactly 4 (got {6 - deg_drop})")
        return SpaceQMembership(False, tuple(reasons))
    if n_zeros != 4:
        reasons.append(f"numerator must carry 4 zeros off the poles (got {n_zeros})")
        return SpaceQMembership(False, tuple(reasons))
    if reasons:
        return SpaceQMembership(False, tuple(reasons))

    roots = []
    for loc, m in zero_list:
        roots.extend([loc] * m)
    used = [False] * 4
    pairs = []
    for i in range(4):
        if used[i]:
            continue
        image = -1.0 / roots[i].conjugate()
        j = next((k for k in range(4)
                  if k != i and not used[k]
                  and abs(roots[k] - image) <= cfg.root_merge_radius * max(1.0, abs(image))),
                 None)
        if j is None:
            reasons.append("numerator roots are not closed under z -> -1/conj(z)")
            return SpaceQMembership(False, tuple(reasons))
        used[i] = used[j] = True
        pairs.append((roots[i], roots[j]))
    if len(pairs) != 2:
        reasons.append("numerator roots do not split into two antipodal pairs")
        return SpaceQMembership(False, tuple(reasons))
    alpha1, alpha2 = pairs[0][0], pairs[1][0]

    lead = (coeff.num.coeffs[-1] / coeff.den.coeffs[-1]) * (a * a)
    lam_c = lead / (1j * alpha1.conjugate() * alpha2.conjugate())
    if abs(lam_c.imag) > cfg.eps * (1.0 + abs(lam_c)) or abs(lam_c) <= cfg.eps:
        reasons.append(f"lambda = {lam_c:.6g} is not a nonzero real")
    lam = lam_c.real

    prod = alpha1 * alpha2
    if abs(prod.real) > cfg.eps * (1.0 + abs(prod)) or abs(prod) <= cfg.eps:
        reasons.append(f"alpha1*alpha2 = {prod:.6g} is not purely imaginary nonzero")

    cross = ((a - alpha1) * (a - alpha2)
             * (a * alpha1.conjugate() + 1) * (a * alpha2.conjugate() + 1))
    if abs(cross.real) > cfg.eps * (1.0 + abs(cross)) or abs(cross) <= cfg.eps:
        reasons.append(f"(a-a1)(a-a2)(a conj(a1)+1)(a conj(a2)+1) = {cross:.6g} "
                       "is not purely imaginary nonzero")

    return SpaceQMembership(not reasons, tuple(reasons), lam, alpha1, alpha2)
