"""Builders for the explicit surfaces and quadratic differentials.

Each family resolves its parameters in closed form, records the resolved
scalars for reproducibility, and instantiates Weierstrass data (or a bare
quadratic differential for the model space example) on the correct puncture
set.  Radical-valued parameters force the float backend; catenoid, Enneper,
the nodoids with Gaussian-rational roots of unity, and any general projective
data with Gaussian-rational parameters stay exact.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
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
    scalar_conj,
    tau_point,
    to_complex,
)
from .config import DEFAULT, Config
from .weierstrass import WeierstrassData, degree_of

FAMILIES = ("catenoid", "enneper", "nodoid", "carlos_first", "carlos_second",
            "general_projective", "qstar")

CARLOS_SECOND_BRANCHES = ("X+", "X-", "Y+", "Y-")


@dataclass(frozen=True)
class FamilyParams:
    """A family tag, its raw arguments, and the resolved scalars."""

    family: str
    args: dict = field(default_factory=dict)
    resolved: dict = field(default_factory=dict)

    @classmethod
    def catenoid(cls) -> "FamilyParams":
        return cls("catenoid")

    @classmethod
    def enneper(cls) -> "FamilyParams":
        return cls("enneper")

    @classmethod
    def nodoid(cls, n: int) -> "FamilyParams":
        if not isinstance(n, int) or n < 1:
            raise ValueError("nodoid requires an integer n >= 1")
        return cls("nodoid", {"n": n})

    @classmethod
    def carlos_first(cls, lam: float, sign: str = "+") -> "FamilyParams":
        resolved = solve_family_parameters("carlos_first", lam, sign=sign)
        return cls("carlos_first", {"lambda": float(lam), "sign": sign}, resolved)

    @classmethod
    def carlos_second(cls, lam: float, branch: str = "X+") -> "FamilyParams":
        resolved = solve_family_parameters("carlos_second", lam, branch=branch)
        return cls("carlos_second", {"lambda": float(lam), "branch": branch}, resolved)

    @classmethod
    def general_projective(cls, m: int, k, n, a, b) -> "FamilyParams":
        args = _validate_projective(m, tuple(k), tuple(n), tuple(a), tuple(b))
        return cls("general_projective", args)

    @classmethod
    def qstar(cls, t: float) -> "FamilyParams":
        resolved = solve_family_parameters("qstar", t)
        return cls("qstar", {"t": float(t)}, resolved)


def carlos_first_interval() -> tuple[float, float]:
    """Endpoints (r, R) of the forbidden band, by bisection on P; R = 1/r."""
    def P(x: float) -> float:
        x2 = x * x
        return 240.0 * x2 * x2 - 4704.0 * x2 + 240.0

    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if P(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    r = 0.5 * (lo + hi)
    return r, 1.0 / r


def solve_family_parameters(family: str, lam: float, *, sign: str = "+",
                            branch: str = "X+", cfg: Config = DEFAULT) -> dict:
    """Closed-form parameter resolution for the deformation families.

    carlos_first: q^2 from the quadratic residue system, with the admissible
    set lambda in (0, r) or (R, infinity).  carlos_second: nested square
    roots Q(lambda), p^2, q^2 = i lambda / p^2.  qstar: the positive root of
    the quadratic pinning the real pole location a (lam plays the role of t).
    """
    if family == "carlos_first":
        lam = float(lam)
        if sign not in ("+", "-"):
            raise ValueError("carlos_first sign must be '+' or '-'")
        r, R = carlos_first_interval()
        if not (0.0 < lam < r or lam > R):
            raise ValueError(
                f"lambda={lam} outside the admissible set (0, {r:.6f}) union "
                f"({R:.6f}, inf)")
        P = 240.0 * lam ** 4 - 4704.0 * lam ** 2 + 240.0
        sqrtP = math.sqrt(P)
        if sign == "+":
            # rationalized form whose denominator never vanishes
            q2 = 2.0 * (35.0 - lam ** 2) / (10.0 * (1.0 + lam ** 2) + sqrtP)
        else:
            den = 2.0 * (1.0 - 35.0 * lam ** 2)
            if abs(den) < 2e-6:
                raise ValueError(
                    "the '-' branch has a parameter pole at lambda = 1/sqrt(35); "
                    f"lambda={lam} is inside the excluded window")
            q2 = (-10.0 * (1.0 + lam ** 2) - sqrtP) / den
        residual = ((1.0 - 35.0 * lam ** 2) * q2 ** 2
                    + 10.0 * (1.0 + lam ** 2) * q2 - (35.0 - lam ** 2))
        scale = max(1.0, abs(q2) ** 2 * abs(1.0 - 35.0 * lam ** 2))
        if abs(residual) > 1e-9 * scale:
            raise ValueError(f"residue system violated: residual {residual:.3e}")
        return {"p_cubed": [0.0, -lam], "q_squared": q2, "P": P, "r": r, "R": R}

    if family == "carlos_second":
        lam = float(lam)
        if lam == 0.0:
            raise ValueError("carlos_second requires a nonzero real lambda")
        if branch not in CARLOS_SECOND_BRANCHES:
            raise ValueError(f"branch must be one of {CARLOS_SECOND_BRANCHES}")
        q_sign = 1.0 if branch[1] == "+" else -1.0
        # The p^2 radical is written against an analytically continued root;
        # under principal values the bounded branch flips with the Q root, so
        # the letter fixes the sign only relative to the superscript.
        p_sign = q_sign * (1.0 if branch[0] == "Y" else -1.0)
        A = 2.0 + 10.0j * lam
        Q = (-A + q_sign * cmath.sqrt(A * A - 4.0 * (35.0 * lam ** 2 + 2.0j * lam + 5.0))) / 2.0
        p2 = (Q + p_sign * cmath.sqrt(Q * Q - 4.0j * lam)) / 2.0
        if p2 == 0:
            raise ValueError("degenerate branch: p^2 = 0")
        q2 = 1j * lam / p2
        return {"Q": [Q.real, Q.imag], "p_squared": [p2.real, p2.imag],
                "q_squared": [q2.real, q2.imag]}

    if family == "qstar":
        t = float(lam)
        if not 0.0 < t < 1.0:
            raise ValueError("qstar requires t in the open interval (0, 1)")
        alpha = t * cmath.exp(1j * math.pi / 4.0)
        c2 = 2.0 * t * (1.0 - t * t)
        c1 = math.sqrt(2.0) * (t ** 4 - 4.0 * t * t + 1.0)
        c0 = -c2
        a = (-c1 + math.sqrt(c1 * c1 - 4.0 * c2 * c0)) / (2.0 * c2)
        residual = c2 * a * a + c1 * a + c0
        if abs(residual) > 1e-9 * max(1.0, abs(c1) * a):
            raise ValueError(f"pole location did not resolve: residual {residual:.3e}")
        return {"alpha": [alpha.real, alpha.imag], "a": a, "lambda": 1.0}

    raise ValueError(f"no parameter solver for family {family!r}")


def _validate_projective(m, k, n, a, b) -> dict:
    if not isinstance(m, int) or m < 3 or m % 2 == 0:
        raise ValueError("general_projective requires odd integer m >= 3")
    if len(k) != len(n) or len(k) != len(a) + 1:
        raise ValueError("need one k_j and n_j per puncture orbit (a_0 = 0 implicit)")
    if any((not isinstance(kj, int)) or kj < 0 for kj in k):
        raise ValueError("all k_j must be integers >= 0")
    if any((not isinstance(nj, int)) or nj < 2 for nj in n):
        raise ValueError("all n_j must be integers >= 2")
    if sum(n) != m + 1:
        raise ValueError(f"sum of n_j must be m + 1 = {m + 1}, got {sum(n)}")
    l = m - sum(k)
    if l < 0:
        raise ValueError("sum of k_j exceeds m")
    if len(b) != l:
        raise ValueError(f"need exactly l = m - sum(k) = {l} points b_i, got {len(b)}")

    exact = all(isinstance(x, QQi) for x in a) and all(isinstance(x, QQi) for x in b)
    if exact:
        av = list(a)
        bv = list(b)
    else:
        av = [to_complex(x) for x in a]
        bv = [to_complex(x) for x in b]

    def is_zero(x):
        return x.is_zero() if isinstance(x, QQi) else abs(x) < 1e-14

    def eq(x, y):
        return (x == y) if exact else abs(x - y) < 1e-12

    for j, aj in enumerate(av):
        if is_zero(aj):
            raise ValueError("a_j must be nonzero (a_0 = 0 is implicit)")
        for akk in av[j + 1:]:
            if eq(aj, akk):
                raise ValueError("a_j must be pairwise distinct")
        for akk in av:
            prod = aj * scalar_conj(akk)
            if eq(prod, QQi(-1) if exact else -1.0 + 0j):
                raise ValueError("a_j * conj(a_k) = -1 collapses two puncture orbits")
    minus_one = QQi(-1) if exact else -1.0 + 0j
    for bi in bv:
        if is_zero(bi):
            raise ValueError("b_i must avoid 0 and infinity")
        for aj in av:
            if eq(bi, aj):
                raise ValueError("b_i must avoid the punctures a_k")
            if eq(bi * scalar_conj(aj), minus_one):
                raise ValueError("b_i must avoid the punctures -1/conj(a_k)")
        for bk in bv:
            if eq(bi * scalar_conj(bk), minus_one):
                raise ValueError("b_i * conj(b_k) = -1 puts two b points in one "
                                 "involution orbit")
    return {"m": m, "k": tuple(k), "n": tuple(n), "a": tuple(av), "b": tuple(bv),
            "backend": EXACT if exact else FLOAT}


def _roots_of_unity(count: int):
    """Exact for count in {1, 2, 4}, float otherwise."""
    if count == 1:
        return [QQi(1)], EXACT
    if count == 2:
        return [QQi(1), QQi(-1)], EXACT
    if count == 4:
        return [QQi(1), QQi(0, 1), QQi(-1), QQi(0, -1)], EXACT
    return [cmath.exp(2j * math.pi * j / count) for j in range(count)], FLOAT


def build(params: FamilyParams, cfg: Config = DEFAULT):
    """Instantiate a catalog member; surfaces carry the family metadata."""
    f = params.family
    if f == "catenoid":
        one = QQi(1)
        g = RatFun(Poly([QQi(0), one]))
        eta = MeromorphicForm(RatFun(Poly([one]), Poly([QQi(0), QQi(0), one])))
        return WeierstrassData(g, eta, [SpherePoint.finite(QQi(0)), INF],
                               family={"name": "catenoid"})
    if f == "enneper":
        one = QQi(1)
        g = RatFun(Poly([QQi(0), one]))
        eta = MeromorphicForm(RatFun(Poly([one])))
        return WeierstrassData(g, eta, [INF], family={"name": "enneper"})
    if f == "nodoid":
        return _build_nodoid(params.args["n"])
    if f == "carlos_first":
        return _build_carlos_first(params)
    if f == "carlos_second":
        return _build_carlos_second(params)
    if f == "general_projective":
        return _build_projective(params)
    if f == "qstar":
        return _build_qstar(params)
    raise ValueError(f"unknown family {f!r}")


def _build_nodoid(n: int) -> WeierstrassData:
    roots, backend = _roots_of_unity(n + 1)
    if backend == EXACT:
        one = QQi(1)
        g = RatFun(Poly([QQi(0)] * n + [one]))
        den = Poly([QQi(-1)] + [QQi(0)] * n + [one]) ** 2
        eta = MeromorphicForm(RatFun(Poly([one]), den))
    else:
        g = RatFun(Poly([0j] * n + [1 + 0j]))
        den = Poly([-1 + 0j] + [0j] * n + [1 + 0j]) ** 2
        eta = MeromorphicForm(RatFun(Poly([1 + 0j]), den))
    punctures = [SpherePoint.finite(r) for r in roots]
    return WeierstrassData(g, eta, punctures,
                           family={"name": "nodoid", "n": n})


def _poly(coeffs) -> Poly:
    return Poly([complex(c) for c in coeffs], FLOAT)


def _build_carlos_first(params: FamilyParams) -> WeierstrassData:
    lam = params.args["lambda"]
    q2 = params.resolved["q_squared"]
    p3 = complex(-0.0, -lam)
    p3bar = p3.conjugate()
    num_g = _poly([1, 0, 0, p3bar]) * _poly([1, 0, -q2])
    den_g = _poly([-p3, 0, 0, 1]) * _poly([-q2, 0, 1])
    base = _poly([-p3, 0, 0, 1]) * _poly([-q2, 0, 1])
    num_e = (base * base).scale(1j)
    den_e = _poly([0, 0, 1]) * (_poly([-1, 0, 1]) ** 4)
    punctures = [SpherePoint.finite(0j), INF,
                 SpherePoint.finite(1 + 0j), SpherePoint.finite(-1 + 0j)]
    family = {"name": "carlos_first", "lambda": lam, "sign": params.args["sign"],
              "resolved": dict(params.resolved)}
    return WeierstrassData(RatFun(num_g, den_g), MeromorphicForm(RatFun(num_e, den_e)),
                           punctures, tau_symmetric=True, family=family)


def _build_carlos_second(params: FamilyParams) -> WeierstrassData:
    lam = params.args["lambda"]
    p2 = complex(*params.resolved["p_squared"])
    q2 = complex(*params.resolved["q_squared"])
    num_g = _poly([0, 1]) * _poly([1, 0, -p2.conjugate()]) * _poly([1, 0, -q2.conjugate()])
    den_g = _poly([-p2, 0, 1]) * _poly([-q2, 0, 1])
    base = _poly([-p2, 0, 1]) * _poly([-q2, 0, 1])
    num_e = (base * base).scale(1j)
    den_e = _poly([0, 0, 1]) * (_poly([-1, 0, 1]) ** 4)
    punctures = [SpherePoint.finite(0j), INF,
                 SpherePoint.finite(1 + 0j), SpherePoint.finite(-1 + 0j)]
    family = {"name": "carlos_second", "lambda": lam, "branch": params.args["branch"],
              "resolved": dict(params.resolved)}
    return WeierstrassData(RatFun(num_g, den_g), MeromorphicForm(RatFun(num_e, den_e)),
                           punctures, tau_symmetric=True, family=family)


def _build_projective(params: FamilyParams) -> WeierstrassData:
    m = params.args["m"]
    k = params.args["k"]
    n = params.args["n"]
    a = params.args["a"]
    b = params.args["b"]
    backend = params.args["backend"]
    one = QQi(1) if backend == EXACT else 1 + 0j
    zero = QQi(0) if backend == EXACT else 0j

    def lin(root):  # z - root
        return Poly([-root, one], backend)

    def tau_lin(root):  # conj(root) z + 1
        return Poly([one, scalar_conj(root)], backend)

    k0, krest = k[0], k[1:]
    num_g = Poly([zero] * k0 + [one], backend)
    den_g = Poly([one], backend)
    for kj, aj in zip(krest, a):
        num_g = num_g * (tau_lin(aj) ** kj)
        den_g = den_g * (lin(aj) ** kj)
    for bi in b:
        num_g = num_g * tau_lin(bi)
        den_g = den_g * lin(bi)

    n0, nrest = n[0], n[1:]
    i_const = QQi(0, 1) if backend == EXACT else 1j
    num_e = Poly([i_const], backend)
    den_e = Poly([zero] * n0 + [one], backend)
    for kj, nj, aj in zip(krest, nrest, a):
        num_e = num_e * (lin(aj) ** (2 * kj))
        den_e = den_e * (lin(aj) ** nj) * (tau_lin(aj) ** nj)
    for bi in b:
        num_e = num_e * (lin(bi) ** 2)

    punctures = [SpherePoint.finite(zero), INF]
    for aj in a:
        pa = SpherePoint.finite(aj)
        punctures.append(pa)
        punctures.append(tau_point(pa))

    g = RatFun(num_g, den_g)
    if degree_of(g) != m:
        raise ValueError(f"built Gauss map has degree {degree_of(g)}, expected m={m}")
    family = {"name": "general_projective", "m": m, "k": list(k), "n": list(n)}
    return WeierstrassData(g, MeromorphicForm(RatFun(num_e, den_e)),
                           punctures, tau_symmetric=True, family=family)


def _build_qstar(params: FamilyParams) -> QuadDifferential:
    alpha = complex(*params.resolved["alpha"])
    a = params.resolved["a"]
    lam = params.resolved["lambda"]
    num = ((_poly([-alpha, 1]) ** 2) * (_poly([1, alpha.conjugate()]) ** 2)).scale(1j * lam)
    den = _poly([0, 0, 1]) * (_poly([-a, 1]) ** 2) * (_poly([1, a]) ** 2)
    return QuadDifferential(RatFun(num, den))


def catalog_entries() -> list[dict]:
    return [
        {"family": "catenoid", "kind": "surface", "backend": "exact",
         "parameters": "none",
         "summary": "g = z, eta = dz/z^2 on the twice-punctured sphere"},
        {"family": "enneper", "kind": "surface", "backend": "exact",
         "parameters": "none",
         "summary": "g = z, eta = dz with a single end at infinity"},
        {"family": "nodoid", "kind": "surface", "backend": "exact for n in {1, 3}, else float",
         "parameters": "n >= 1",
         "summary": "g = z^n, eta = dz/(z^(n+1)-1)^2 with n+1 planar embedded ends"},
        {"family": "carlos_first", "kind": "surface", "backend": "float",
         "parameters": "lambda in (0, r) or (R, inf); sign + or -",
         "summary": "planar plus Enneper-type ends; involution-symmetric deformation"},
        {"family": "carlos_second", "kind": "surface", "backend": "float",
         "parameters": "lambda real nonzero; branch X+, X-, Y+, Y-",
         "summary": "catenoidal end with closed principal lines plus Enneper-type end"},
        {"family": "general_projective", "kind": "surface", "backend": "exact or float",
         "parameters": "m odd >= 3; k_j >= 0; n_j >= 2 with sum n = m+1; points a_j, b_i",
         "summary": "general involution-symmetric data on 2N punctures"},
        {"family": "qstar", "kind": "quad_differential", "backend": "float",
         "parameters": "t in (0, 1)",
         "summary": "model quadratic differential with closed lines at four poles"},
    ]
