"""Exact and floating arithmetic for rational functions on the Riemann sphere.

Two scalar backends share one polynomial/rational-function implementation:

* exact: Gaussian rationals (``QQi``, a pair of ``fractions.Fraction``),
  closed under field operations, with rational functions kept reduced via
  exact polynomial gcd.
* float: ``complex`` coefficients; reduction is skipped and all zero tests
  go through the tolerances in :class:`wlab.config.Config`.

On top of that sit the sphere primitives the rest of the package needs:
order and residue at any point including infinity, Laurent coefficients,
and the conjugated pullback under the fixed-point-free involution
tau(z) = -1/conj(z).
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from .config import DEFAULT, Config

EXACT = "exact"
FLOAT = "float"

NEG_INF = float("-inf")


class QQi:
    """Gaussian rational: re + im*i with Fraction parts. Immutable."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, *_):
        raise AttributeError("QQi is immutable")

    @staticmethod
    def parse(pair) -> "QQi":
        """Build from the JSON encoding ["p/q", "r/s"] (or bare strings/ints)."""
        if isinstance(pair, (list, tuple)):
            re, im = pair
        else:
            re, im = pair, 0
        return QQi(Fraction(re), Fraction(im))

    def encode(self) -> list:
        return [str(self.re), str(self.im)]

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def conjugate(self) -> "QQi":
        return QQi(self.re, -self.im)

    def to_complex(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)

    def __add__(self, other):
        other = _as_qqi(other)
        return QQi(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return QQi(-self.re, -self.im)

    def __sub__(self, other):
        other = _as_qqi(other)
        return QQi(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _as_qqi(other) - self

    def __mul__(self, other):
        other = _as_qqi(other)
        return QQi(self.re * other.re - self.im * other.im,
                   self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_qqi(other)
        n = other.re * other.re + other.im * other.im
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return QQi((self.re * other.re + self.im * other.im) / n,
                   (self.im * other.re - self.re * other.im) / n)

    def __rtruediv__(self, other):
        return _as_qqi(other) / self

    def __pow__(self, n: int):
        out = QQi(1)
        base = self
        if n < 0:
            base = QQi(1) / self
            n = -n
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QQi(other)
        if not isinstance(other, QQi):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __abs__(self) -> float:
        return abs(self.to_complex())

    def __complex__(self) -> complex:
        return self.to_complex()

    def __repr__(self):
        return f"QQi({self.re}, {self.im})"


def _as_qqi(x) -> QQi:
    if isinstance(x, QQi):
        return x
    if isinstance(x, (int, Fraction)):
        return QQi(x)
    raise TypeError(f"cannot mix {type(x).__name__} into exact arithmetic")


def backend_of(scalar) -> str:
    return EXACT if isinstance(scalar, QQi) else FLOAT


def scalar_zero(backend: str):
    return QQi() if backend == EXACT else 0j


def scalar_one(backend: str):
    return QQi(1) if backend == EXACT else complex(1)


def scalar_is_zero(value, cfg: Config = DEFAULT) -> bool:
    if isinstance(value, QQi):
        return value.is_zero()
    return abs(value) <= cfg.eps


def scalar_conj(value):
    return value.conjugate() if isinstance(value, QQi) else value.conjugate()


def to_complex(value) -> complex:
    return value.to_complex() if isinstance(value, QQi) else complex(value)


class Poly:
    """Dense polynomial, coefficients lowest degree first.

    The zero polynomial has an empty coefficient list and degree -inf.
    Trailing coefficients that are *exactly* zero are trimmed; on the float
    backend small nonzero coefficients are kept as-is (degree is structural,
    tolerances only enter order/residue queries).
    """

    __slots__ = ("coeffs", "backend")

    def __init__(self, coeffs: Sequence, backend: str | None = None):
        cs = list(coeffs)
        if backend is None:
            if not cs:
                raise ValueError("backend required for the empty coefficient list")
            backend = backend_of(cs[0])
        if backend == FLOAT:
            cs = [complex(c) for c in cs]
        while cs and _exactly_zero(cs[-1]):
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "backend", backend)

    def __setattr__(self, *_):
        raise AttributeError("Poly is immutable")

    @staticmethod
    def zero(backend: str) -> "Poly":
        return Poly([], backend)

    @staticmethod
    def const(value) -> "Poly":
        return Poly([value], backend_of(value))

    @staticmethod
    def x(backend: str) -> "Poly":
        return Poly([scalar_zero(backend), scalar_one(backend)], backend)

    @staticmethod
    def from_roots(roots: Sequence, backend: str) -> "Poly":
        p = Poly([scalar_one(backend)], backend)
        for r in roots:
            p = p * Poly([-r, scalar_one(backend)], backend)
        return p

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, k: int):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return scalar_zero(self.backend)

    def __add__(self, other: "Poly") -> "Poly":
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly([self.coefficient(i) + other.coefficient(i) for i in range(n)],
                    self.backend)

    def __sub__(self, other: "Poly") -> "Poly":
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly([self.coefficient(i) - other.coefficient(i) for i in range(n)],
                    self.backend)

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs], self.backend)

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return self.scale(other)
        if self.is_zero() or other.is_zero():
            return Poly.zero(self.backend)
        out = [scalar_zero(self.backend)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(out, self.backend)

    def scale(self, s) -> "Poly":
        return Poly([c * s for c in self.coeffs], self.backend)

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative polynomial power")
        out = Poly([scalar_one(self.backend)], self.backend)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.backend == other.backend and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.backend, self.coeffs))

    def __call__(self, z):
        if isinstance(z, QQi) and self.backend == EXACT:
            acc = QQi()
            for c in reversed(self.coeffs):
                acc = acc * z + c
            return acc
        z = complex(z)
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * z + to_complex(c)
        return acc

    def derivative(self) -> "Poly":
        return Poly([c * k for k, c in enumerate(self.coeffs)][1:] or [],
                    self.backend)

    def shift(self, c) -> "Poly":
        """Coefficients of p(t + c): Taylor recentering by Horner shift."""
        if self.backend == FLOAT and isinstance(c, QQi):
            c = c.to_complex()
        cs = list(self.coeffs)
        n = len(cs)
        for i in range(n):
            for j in range(n - 2, i - 1, -1):
                cs[j] = cs[j] + c * cs[j + 1]
        return Poly(cs, self.backend)

    def reversed_signed(self) -> tuple["Poly", int]:
        """Return (q, d) with p(-1/z) = q(z) / z^d, q(0) != 0 for p != 0."""
        d = len(self.coeffs) - 1
        if d < 0:
            raise ValueError("cannot substitute into the zero polynomial")
        sign = scalar_one(self.backend)
        out = []
        for k in range(d, -1, -1):
            c = self.coeffs[k]
            out.append(c if k % 2 == 0 else -c)
        return Poly(out, self.backend), d

    def conj_coeffs(self) -> "Poly":
        return Poly([scalar_conj(c) for c in self.coeffs], self.backend)

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        lead = self.coeffs[-1]
        return Poly([c / lead for c in self.coeffs], self.backend)

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        """Exact-backend polynomial division with remainder."""
        if self.backend != EXACT or other.backend != EXACT:
            raise ValueError("polynomial division is an exact-backend operation")
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        rem = list(self.coeffs)
        d = other.degree
        lead = other.coeffs[-1]
        q = [QQi()] * max(len(rem) - d, 0)
        for k in range(len(rem) - 1, d - 1, -1):
            coef = rem[k] / lead
            q[k - d] = coef
            if not coef.is_zero():
                for j, b in enumerate(other.coeffs):
                    rem[k - d + j] = rem[k - d + j] - coef * b
        return Poly(q, EXACT), Poly(rem[:d] if d > 0 else [], EXACT)

    def to_complex_list(self) -> list[complex]:
        return [to_complex(c) for c in self.coeffs]

    def max_abs(self) -> float:
        return max((abs(to_complex(c)) for c in self.coeffs), default=0.0)

    def __repr__(self):
        return f"Poly({list(self.coeffs)!r})"


def _exactly_zero(c) -> bool:
    if isinstance(c, QQi):
        return c.is_zero()
    return c == 0


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd by the Euclidean algorithm (exact backend only)."""
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    if a.is_zero():
        return a
    return a.monic()


def valuation(p: Poly, cfg: Config = DEFAULT):
    """Index of the first effectively nonzero coefficient; -inf sentinel on 0.

    Float coefficients count as zero when below eps relative to the largest
    coefficient, so noise left over from recentering does not create phantom
    low-order terms.
    """
    if p.is_zero():
        return NEG_INF
    if p.backend == EXACT:
        for k, c in enumerate(p.coeffs):
            if not c.is_zero():
                return k
        return NEG_INF
    scale = p.max_abs()
    if scale == 0.0:
        return NEG_INF
    for k, c in enumerate(p.coeffs):
        if abs(c) > cfg.eps * scale:
            return k
    return NEG_INF


def strip_valuation(p: Poly, v: int) -> Poly:
    """Drop the first v coefficients (the t^v factor established by valuation)."""
    return Poly(list(p.coeffs[v:]), p.backend)


class RatFun:
    """Rational function num/den.

    Exact backend: reduced (gcd 1) with monic denominator, so structural
    equality is meaningful.  Float backend: stored as given, never reduced.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None, reduce: bool = True):
        if den is None:
            den = Poly([scalar_one(num.backend)], num.backend)
        if den.is_zero():
            raise ZeroDivisionError("rational function denominator is zero")
        if num.backend != den.backend:
            raise ValueError("mixed backends in rational function")
        if num.backend == EXACT and reduce:
            if num.is_zero():
                den = Poly([QQi(1)], EXACT)
            else:
                g = poly_gcd(num, den)
                if g.degree > 0:
                    num = num.divmod(g)[0]
                    den = den.divmod(g)[0]
                lead = den.coeffs[-1]
                num = num.scale(QQi(1) / lead)
                den = den.scale(QQi(1) / lead)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *_):
        raise AttributeError("RatFun is immutable")

    @staticmethod
    def from_coeffs(num: Sequence, den: Sequence, backend: str) -> "RatFun":
        if backend == EXACT:
            num = [c if isinstance(c, QQi) else QQi.parse(c) for c in num]
            den = [c if isinstance(c, QQi) else QQi.parse(c) for c in den]
        return RatFun(Poly(num, backend), Poly(den, backend))

    @staticmethod
    def const(value) -> "RatFun":
        return RatFun(Poly.const(value))

    @staticmethod
    def x(backend: str) -> "RatFun":
        return RatFun(Poly.x(backend))

    @property
    def backend(self) -> str:
        return self.num.backend

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other) -> "RatFun":
        other = _as_ratfun(other, self.backend)
        return RatFun(self.num * other.den + other.num * self.den,
                      self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other) -> "RatFun":
        return self + (-_as_ratfun(other, self.backend))

    def __rsub__(self, other) -> "RatFun":
        return _as_ratfun(other, self.backend) - self

    def __neg__(self) -> "RatFun":
        return RatFun(-self.num, self.den, reduce=False)

    def __mul__(self, other) -> "RatFun":
        other = _as_ratfun(other, self.backend)
        return RatFun(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RatFun":
        other = _as_ratfun(other, self.backend)
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RatFun(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other) -> "RatFun":
        return _as_ratfun(other, self.backend) / self

    def __pow__(self, n: int) -> "RatFun":
        if n < 0:
            return RatFun(self.den, self.num) ** (-n)
        return RatFun(self.num ** n, self.den ** n)

    def __call__(self, z):
        return self.num(z) / self.den(z)

    def derivative(self) -> "RatFun":
        return RatFun(self.num.derivative() * self.den - self.num * self.den.derivative(),
                      self.den * self.den)

    def conj_coeffs(self) -> "RatFun":
        return RatFun(self.num.conj_coeffs(), self.den.conj_coeffs(), reduce=False)

    def compose_neg_inv(self) -> "RatFun":
        """The substitution z -> -1/z, returned as a rational function."""
        qn, dn = self.num.reversed_signed()
        qd, dd = self.den.reversed_signed()
        shift = dd - dn
        backend = self.backend
        zpow = Poly([scalar_zero(backend)] * abs(shift) + [scalar_one(backend)], backend)
        if shift >= 0:
            return RatFun(qn * zpow, qd)
        return RatFun(qn, qd * zpow)

    def __eq__(self, other):
        if not isinstance(other, RatFun):
            return NotImplemented
        if self.backend != other.backend:
            return False
        if self.backend == EXACT:
            # both sides reduced and monic, so structural equality decides
            return self.num == other.num and self.den == other.den
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def close_to(self, other: "RatFun", tol: float) -> bool:
        """Cross-multiplied coefficient comparison, reduction-free."""
        diff = self.num * other.den - other.num * self.den
        scale = max((self.num * other.den).max_abs(),
                    (other.num * self.den).max_abs(), 1.0)
        return diff.max_abs() <= tol * scale

    def __repr__(self):
        return f"RatFun({self.num!r}, {self.den!r})"


def _as_ratfun(x, backend: str) -> RatFun:
    if isinstance(x, RatFun):
        return x
    if isinstance(x, Poly):
        return RatFun(x)
    if backend == EXACT:
        return RatFun.const(_as_qqi(x))
    return RatFun.const(complex(x))


class SpherePoint:
    """A point of the Riemann sphere: a finite scalar or infinity."""

    __slots__ = ("value",)
    _INF = None

    def __init__(self, value):
        object.__setattr__(self, "value", value)

    def __setattr__(self, *_):
        raise AttributeError("SpherePoint is immutable")

    @staticmethod
    def finite(value) -> "SpherePoint":
        if not isinstance(value, QQi):
            value = complex(value)
        return SpherePoint(value)

    @classmethod
    def infinity(cls) -> "SpherePoint":
        if cls._INF is None:
            cls._INF = SpherePoint(None)
        return cls._INF

    @property
    def is_infinity(self) -> bool:
        return self.value is None

    def to_complex(self) -> complex:
        if self.is_infinity:
            raise ValueError("infinity has no complex value")
        return to_complex(self.value)

    def same_as(self, other: "SpherePoint", cfg: Config = DEFAULT) -> bool:
        if self.is_infinity or other.is_infinity:
            return self.is_infinity and other.is_infinity
        a, b = self.value, other.value
        if isinstance(a, QQi) and isinstance(b, QQi):
            return a == b
        return abs(self.to_complex() - other.to_complex()) <= cfg.cluster_radius

    def __eq__(self, other):
        if not isinstance(other, SpherePoint):
            return NotImplemented
        if self.is_infinity or other.is_infinity:
            return self.is_infinity and other.is_infinity
        return self.value == other.value

    def __hash__(self):
        return hash(self.value) if not self.is_infinity else hash("inf")

    def __repr__(self):
        return "SpherePoint(inf)" if self.is_infinity else f"SpherePoint({self.value!r})"


INF = SpherePoint.infinity()


def tau_point(p: SpherePoint) -> SpherePoint:
    """tau(z) = -1/conj(z) on points; swaps 0 and infinity."""
    if p.is_infinity:
        return SpherePoint.finite(QQi())
    v = p.value
    if isinstance(v, QQi):
        if v.is_zero():
            return INF
        return SpherePoint(QQi(-1) / v.conjugate())
    if v == 0:
        return INF
    return SpherePoint(-1.0 / v.conjugate())


class MeromorphicForm:
    """A one-form coeff(z) dz; at infinity read in the chart w = 1/z."""

    __slots__ = ("coeff",)

    def __init__(self, coeff: RatFun):
        object.__setattr__(self, "coeff", coeff)

    def __setattr__(self, *_):
        raise AttributeError("MeromorphicForm is immutable")

    @property
    def backend(self) -> str:
        return self.coeff.backend

    def infinity_chart(self) -> RatFun:
        """Coefficient in w = 1/z: dz = -dw/w^2."""
        backend = self.backend
        w2 = Poly([scalar_zero(backend), scalar_zero(backend), scalar_one(backend)], backend)
        sub = substitute_inverse(self.coeff)
        return -sub / RatFun(w2)

    def ord_at(self, p: SpherePoint, cfg: Config = DEFAULT) -> int:
        if p.is_infinity:
            return ord_at(self.infinity_chart(), SpherePoint.finite(scalar_zero(self.backend)), cfg)
        return ord_at(self.coeff, p, cfg)

    def residue_at(self, p: SpherePoint, cfg: Config = DEFAULT):
        return residue_at(self, p, cfg)

    def __mul__(self, other):
        return MeromorphicForm(self.coeff * other)

    __rmul__ = __mul__

    def __neg__(self):
        return MeromorphicForm(-self.coeff)

    def __eq__(self, other):
        if not isinstance(other, MeromorphicForm):
            return NotImplemented
        return self.coeff == other.coeff

    def __hash__(self):
        return hash(self.coeff)

    def close_to(self, other: "MeromorphicForm", tol: float) -> bool:
        return self.coeff.close_to(other.coeff, tol)

    def __repr__(self):
        return f"MeromorphicForm({self.coeff!r})"


class QuadDifferential:
    """A quadratic differential coeff(z) dz^2; at infinity dz^2 = dw^2/w^4."""

    __slots__ = ("coeff",)

    def __init__(self, coeff: RatFun):
        object.__setattr__(self, "coeff", coeff)

    def __setattr__(self, *_):
        raise AttributeError("QuadDifferential is immutable")

    @property
    def backend(self) -> str:
        return self.coeff.backend

    def infinity_chart(self) -> RatFun:
        backend = self.backend
        w4 = Poly([scalar_zero(backend)] * 4 + [scalar_one(backend)], backend)
        return substitute_inverse(self.coeff) / RatFun(w4)

    def centered_chart(self, p: SpherePoint) -> RatFun:
        """Local coefficient in a chart with p at the origin."""
        if p.is_infinity:
            return self.infinity_chart()
        c = p.value
        return RatFun(self.coeff.num.shift(c), self.coeff.den.shift(c),
                      reduce=False)

    def ord_at(self, p: SpherePoint, cfg: Config = DEFAULT) -> int:
        if p.is_infinity:
            return ord_at(self.infinity_chart(), SpherePoint.finite(scalar_zero(self.backend)), cfg)
        return ord_at(self.coeff, p, cfg)

    def __mul__(self, other):
        return QuadDifferential(self.coeff * other)

    __rmul__ = __mul__

    def __neg__(self):
        return QuadDifferential(-self.coeff)

    def __eq__(self, other):
        if not isinstance(other, QuadDifferential):
            return NotImplemented
        return self.coeff == other.coeff

    def __hash__(self):
        return hash(self.coeff)

    def close_to(self, other: "QuadDifferential", tol: float) -> bool:
        return self.coeff.close_to(other.coeff, tol)

    def __repr__(self):
        return f"QuadDifferential({self.coeff!r})"


def substitute_inverse(f: RatFun) -> RatFun:
    """f(1/w) as a rational function of w."""
    # reuse the -1/z machinery with signs undone: f(1/w) = g(-w) for g = f(-1/z)
    g = f.compose_neg_inv()
    backend = f.backend

    def compose_neg(p: Poly) -> Poly:
        out = [c if k % 2 == 0 else -c for k, c in enumerate(p.coeffs)]
        return Poly(out, backend) if out else Poly.zero(backend)

    return RatFun(compose_neg(g.num), compose_neg(g.den), reduce=False)


def ord_at(F: RatFun, q: SpherePoint, cfg: Config = DEFAULT) -> int:
    """Order of F at q: zero multiplicity (>0), pole order (<0), or 0.

    At infinity this is deg(den) - deg(num) in the w = 1/z chart.  Raises on
    the zero function, whose order is undefined everywhere.
    """
    if F.is_zero():
        raise ValueError("order undefined for the zero function")
    if q.is_infinity:
        return F.den.degree - F.num.degree
    c = q.value
    vn = valuation(F.num.shift(c), cfg)
    vd = valuation(F.den.shift(c), cfg)
    if vn is NEG_INF or vd is NEG_INF:
        raise ValueError("order undefined: effective zero polynomial")
    return vn - vd


def regular_part_at_pole(f: RatFun, c, m: int, cfg: Config = DEFAULT) -> RatFun:
    """For f with a pole of order m at c, return h with f(c+t) = h(t)/t^m.

    h is regular and nonzero at t = 0.  Exact backend cancels the t^m factor
    exactly; float backend strips the sub-threshold low coefficients left by
    the recentering.
    """
    ns = f.num.shift(c)
    ds = f.den.shift(c)
    vn = valuation(ns, cfg)
    vd = valuation(ds, cfg)
    if vd - vn != m:
        raise ValueError("inconsistent pole order")
    return RatFun(strip_valuation(ns, vn), strip_valuation(ds, vd), reduce=False)


def residue_at(omega: MeromorphicForm, q: SpherePoint, cfg: Config = DEFAULT):
    """Residue of omega at q: the (z-q)^-1 Laurent coefficient.

    Implemented with the higher-order-pole derivative formula
    res = h^(m-1)(0)/(m-1)! applied to the regular part h of (z-q)^m omega.
    Regular points give exact zero.  At infinity the form is rewritten in
    w = 1/z with dz = -dw/w^2 first.
    """
    if q.is_infinity:
        chart = MeromorphicForm(omega.infinity_chart())
        zero = SpherePoint.finite(scalar_zero(omega.backend))
        return residue_at(chart, zero, cfg)
    f = omega.coeff
    if f.is_zero():
        return scalar_zero(omega.backend)
    m = -ord_at(f, q, cfg)
    if m <= 0:
        return scalar_zero(omega.backend)
    h = regular_part_at_pole(f, q.value, m, cfg)
    for _ in range(m - 1):
        h = h.derivative()
    value = h(scalar_zero(omega.backend))
    fact = 1
    for k in range(2, m):
        fact *= k
    if omega.backend == EXACT:
        return value / QQi(fact)
    return value / fact


def series_quotient(num: Poly, den: Poly, nterms: int) -> list:
    """First nterms power-series coefficients of num/den, den(0) != 0."""
    if den.is_zero() or _exactly_zero(den.coefficient(0)):
        raise ZeroDivisionError("series division needs a unit constant term")
    d0 = den.coefficient(0)
    out = []
    for i in range(nterms):
        acc = num.coefficient(i)
        for j in range(i):
            acc = acc - out[j] * den.coefficient(i - j)
        out.append(acc / d0)
    return out


def laurent_coefficient(f: RatFun, center, k: int, cfg: Config = DEFAULT):
    """Coefficient of (z-center)^k in the Laurent expansion of f at center.

    Independent of residue_at by construction: this walks the power series by
    division rather than differentiating.
    """
    if f.is_zero():
        return scalar_zero(f.backend)
    ns = f.num.shift(center)
    ds = f.den.shift(center)
    vn = valuation(ns, cfg)
    vd = valuation(ds, cfg)
    lead = vn - vd
    if k < lead:
        return scalar_zero(f.backend)
    series = series_quotient(strip_valuation(ns, vn), strip_valuation(ds, vd),
                             k - lead + 1)
    return series[k - lead]


def tau_pullback(obj, cfg: Config = DEFAULT):
    """Conjugated pullback under tau(z) = -1/conj(z).

    Functions transform as F -> F*(-1/z) (star = coefficient conjugation);
    one-forms pick up the Jacobian factor 1/z^2 and quadratic differentials
    1/z^4.  With this convention the symmetry laws of tau-symmetric
    Weierstrass data become identities between rational objects:
    tau_pullback(g)*g = -1, tau_pullback(eta) = -g^2 eta,
    tau_pullback(dh) = dh, tau_pullback(Q_H) = -Q_H.
    """
    if isinstance(obj, RatFun):
        return obj.conj_coeffs().compose_neg_inv()
    backend = obj.backend
    if isinstance(obj, MeromorphicForm):
        base = obj.coeff.conj_coeffs().compose_neg_inv()
        z2 = Poly([scalar_zero(backend)] * 2 + [scalar_one(backend)], backend)
        return MeromorphicForm(base / RatFun(z2))
    if isinstance(obj, QuadDifferential):
        base = obj.coeff.conj_coeffs().compose_neg_inv()
        z4 = Poly([scalar_zero(backend)] * 4 + [scalar_one(backend)], backend)
        return QuadDifferential(base / RatFun(z4))
    raise TypeError(f"tau_pullback does not apply to {type(obj).__name__}")


def poly_root_clusters(p: Poly, cfg: Config = DEFAULT) -> list[tuple[complex, int]]:
    """Locate the roots of p numerically, grouped into (location, multiplicity).

    Multiple roots of a float polynomial split under the companion-matrix
    eigensolver by far more than machine epsilon, so grouping uses the
    generous merge radius from config and reports each cluster's centroid
    (which averages the split back out).
    """
    cs = p.to_complex_list()
    while cs and cs[-1] == 0:
        cs.pop()
    k0 = 0
    while k0 < len(cs) and cs[k0] == 0:
        k0 += 1
    clusters: list[tuple[complex, int]] = []
    if k0 > 0:
        clusters.append((0j, k0))
    cs = cs[k0:]
    if len(cs) > 1:
        roots = np.roots(list(reversed(cs)))
        scale = max(1.0, max(abs(r) for r in roots))
        used = [False] * len(roots)
        order = sorted(range(len(roots)), key=lambda i: (roots[i].real, roots[i].imag))
        for i in order:
            if used[i]:
                continue
            group = [roots[i]]
            used[i] = True
            changed = True
            while changed:
                changed = False
                centroid = sum(group) / len(group)
                for j in range(len(roots)):
                    if not used[j] and abs(roots[j] - centroid) <= cfg.root_merge_radius * scale:
                        group.append(roots[j])
                        used[j] = True
                        changed = True
            clusters.append((complex(sum(group) / len(group)), len(group)))
    return clusters
