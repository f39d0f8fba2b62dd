"""Numerical realization: quadrature of the immersion integral into meshes,
principal-line streamline tracing, closed-leaf detection, and OBJ/SVG export.

Independent leaves and independent mesh rays have no shared mutable state, so
callers may fan them out concurrently; everything here is sequential.
"""

from __future__ import annotations

import cmath
import math
import os
from dataclasses import dataclass

import numpy as np

from .algebra import (
    INF,
    MeromorphicForm,
    QuadDifferential,
    RatFun,
    SpherePoint,
    poly_root_clusters,
    to_complex,
)
from .config import DEFAULT, Config
from .weierstrass import WeierstrassData, check_periods, phi_components

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


@dataclass
class Polyline:
    """A sampled leaf: parameter points, optional R^3 images, closure data.

    Consecutive points stay within the step bound of the trace that produced
    them (in that trace's own chart); closed means the endpoints agree within
    the closure tolerance.
    """

    points: list
    images: list | None = None
    closed: bool = False
    winding: int = 0
    stop_reason: str = ""
    label: str = ""


@dataclass
class Mesh:
    vertices: list
    faces: list
    chart: list
    loop_residual: float = 0.0

    def validate(self) -> None:
        nv = len(self.vertices)
        for v in self.vertices:
            if not all(math.isfinite(c) for c in v):
                raise ValueError("mesh contains non-finite coordinates")
        for f in self.faces:
            if any(i < 0 or i >= nv for i in f):
                raise ValueError("face indexes a missing vertex")
        if len(self.chart) != nv:
            raise ValueError("chart provenance must cover every vertex")


class _Evaluator:
    """Rational evaluation from descending coefficients; array or scalar."""

    def __init__(self, rf: RatFun):
        self.num_list = list(reversed(rf.num.to_complex_list())) or [0j]
        self.den_list = list(reversed(rf.den.to_complex_list())) or [1 + 0j]
        self.num = np.array(self.num_list)
        self.den = np.array(self.den_list)

    def __call__(self, z):
        return np.polyval(self.num, z) / np.polyval(self.den, z)

    def scalar(self, z: complex) -> complex:
        n = 0j
        for c in self.num_list:
            n = n * z + c
        d = 0j
        for c in self.den_list:
            d = d * z + c
        return n / d


def _quad_curve(fs, curve, dcurve, tol: float, max_depth: int = 40):
    """Adaptive composite Gauss-Legendre of a vector integrand along a curve.

    fs(z_array) -> array (..., n); the error estimate compares one 12-point
    panel against its two halves and bisects until agreement.
    """

    def raw(a: float, b: float):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        t = mid + half * _GL_NODES
        vals = fs(curve(t)) * dcurve(t)
        return (vals * _GL_WEIGHTS).sum(axis=-1) * half

    def recurse(a, b, whole, tol, depth):
        m = 0.5 * (a + b)
        left, right = raw(a, m), raw(m, b)
        err = np.max(np.abs(whole - (left + right)))
        scale = max(1.0, float(np.max(np.abs(left + right))))
        if err <= tol * scale:
            return left + right
        if depth >= max_depth:
            raise RuntimeError("quadrature did not converge along the path")
        return (recurse(a, m, left, 0.5 * tol, depth + 1)
                + recurse(m, b, right, 0.5 * tol, depth + 1))

    return recurse(0.0, 1.0, raw(0.0, 1.0), tol, 0)


def _integrate_segment(fs, z0: complex, z1: complex, tol: float):
    dz = z1 - z0
    return _quad_curve(fs, lambda t: z0 + t * dz, lambda t: dz, tol)


def _integrate_arc(fs, center: complex, radius: float, th0: float, th1: float,
                   tol: float):
    dth = th1 - th0

    def curve(t):
        return center + radius * np.exp(1j * (th0 + t * dth))

    def dcurve(t):
        return 1j * dth * radius * np.exp(1j * (th0 + t * dth))

    return _quad_curve(fs, curve, dcurve, tol)


def _seg_point_dist(z0: complex, z1: complex, p: complex) -> float:
    d = z1 - z0
    L2 = abs(d) ** 2
    if L2 == 0.0:
        return abs(p - z0)
    t = max(0.0, min(1.0, ((p - z0).conjugate() * d).real / L2))
    return abs(p - (z0 + t * d))


def _route(z0: complex, z1: complex, poles, clearance: float, depth: int = 0):
    """Straight segments from z0 to z1 detouring around listed poles."""
    if depth > 8:
        raise RuntimeError("could not route an integration path around the poles")
    for p in poles:
        if _seg_point_dist(z0, z1, p) < clearance and abs(z1 - z0) > 0:
            d = (z1 - z0) / abs(z1 - z0)
            n = 1j * d
            foot = p + n * (2.5 * clearance)
            if abs(foot - z0) < 1e-15 or abs(z1 - foot) < 1e-15:
                foot = p - n * (2.5 * clearance)
            return (_route(z0, foot, poles, clearance, depth + 1)
                    + _route(foot, z1, poles, clearance, depth + 1))
    return [(z0, z1)]


def default_sampling(W: WeierstrassData, radial: int = 12, angular: int = 32,
                     cfg: Config = DEFAULT) -> dict:
    """Per-end annuli in local charts, kept clear of the other punctures."""
    finite = [to_complex(p.value) for p in W.punctures if not p.is_infinity]
    annuli = {}
    for i, p in enumerate(W.punctures):
        if p.is_infinity:
            others = [abs(1.0 / z) for z in finite if z != 0]
        else:
            c = to_complex(p.value)
            others = [abs(z - c) for z in finite if z != c]
        nearest = min(others) if others else 2.0
        outer = min(1.0, 0.45 * nearest) if others else 1.0
        annuli[i] = [outer / 8.0, outer]
    return {"radial": radial, "angular": angular, "annuli": annuli}


def _base_point(poles, clearance: float) -> complex:
    for cand in (0.53 + 0.39j, 1.71 - 0.62j, 0.23 + 1.92j, 2.61 + 0.13j,
                 -1.37 + 0.81j):
        if all(abs(cand - p) > 10 * clearance for p in poles):
            return cand
    raise RuntimeError("no admissible base point clear of the punctures")


def integrate_immersion(W: WeierstrassData, sampling: dict | None = None,
                        cfg: Config = DEFAULT) -> Mesh:
    """Mesh the surface over per-end annuli by quadrature of the coordinate
    forms along radial-then-angular paths from one fixed base point.

    Requires the period condition; otherwise the integral depends on the path
    and the map is ill-defined.
    """
    per = check_periods(W, cfg)
    if not per.ok:
        raise ValueError("period condition fails; the immersion integral is "
                         "path-dependent: " + "; ".join(per.details[:2]))
    if sampling is None:
        sampling = default_sampling(W, cfg=cfg)
    nr = int(sampling["radial"])
    na = int(sampling["angular"])
    if nr < 2 or na < 3:
        raise ValueError("need at least 2 radial rings and 3 angular samples")

    phis = [_Evaluator(f.coeff) for f in phi_components(W)]

    def fs(z):
        return np.stack([ev(z) for ev in phis], axis=0)

    poles = [to_complex(p.value) for p in W.punctures if not p.is_infinity]
    clearance = cfg.singularity_clearance
    base = _base_point(poles, clearance)
    tol = cfg.quad_tol

    def integrate_to(z0, z1, acc):
        for a, b in _route(z0, z1, poles, clearance):
            acc = acc + _integrate_segment(fs, a, b, tol)
        return acc

    vertices = []
    charts = []
    quads = []
    worst_loop = 0.0

    for idx_key, (r_in, r_out) in sorted(sampling["annuli"].items(),
                                         key=lambda kv: int(kv[0])):
        idx = int(idx_key)
        end = W.punctures[idx]
        at_inf = end.is_infinity
        center = 0j if at_inf else to_complex(end.value)

        def to_z(w):
            return 1.0 / w if at_inf else center + w

        radii = [r_out * (r_in / r_out) ** (i / (nr - 1)) for i in range(nr)]
        thetas = [2.0 * math.pi * j / na for j in range(na)]
        base_ring = [None] * nr

        first_w = radii[0] * cmath.exp(1j * thetas[0])
        acc = integrate_to(base, to_z(first_w), np.zeros(3, dtype=complex))
        base_ring[0] = acc
        for i in range(1, nr):
            z0 = to_z(radii[i - 1] * cmath.exp(1j * thetas[0]))
            z1 = to_z(radii[i] * cmath.exp(1j * thetas[0]))
            base_ring[i] = integrate_to(z0, z1, base_ring[i - 1])

        ring_offset = len(vertices)
        for i, r in enumerate(radii):
            # angular arcs; in the inverted chart the z-image is again a
            # circular arc about the origin, so integrate in z directly
            zr = (1.0 / r) if at_inf else r
            acc = base_ring[i]
            loop = np.zeros(3, dtype=complex)
            row = [acc]
            for j in range(na):
                th0, th1 = thetas[j], thetas[j] + 2.0 * math.pi / na
                sgn = -1.0 if at_inf else 1.0
                inc = _integrate_arc(fs, 0j if at_inf else center, zr,
                                     sgn * th0, sgn * th1, tol)
                acc = acc + inc
                loop = loop + inc
                if j < na - 1:
                    row.append(acc)
            resid = float(np.max(np.abs(loop.real)))
            worst_loop = max(worst_loop, resid)
            for v in row:
                vertices.append((float(v[0].real), float(v[1].real),
                                 float(v[2].real)))
                charts.append(idx)
        for i in range(nr - 1):
            for j in range(na):
                a = ring_offset + i * na + j
                b = ring_offset + i * na + (j + 1) % na
                c = ring_offset + (i + 1) * na + (j + 1) % na
                d = ring_offset + (i + 1) * na + j
                quads.append((a, b, c, d))

    scale = max(1.0, max(abs(c) for v in vertices for c in v))
    if worst_loop > cfg.mesh_closure_tol * scale:
        raise RuntimeError(
            f"angular loop failed to close: residual {worst_loop:.3e} exceeds "
            f"{cfg.mesh_closure_tol:.1e} * scale")

    # merge coincident vertices where chart annuli share a boundary circle
    remap = _dedupe(vertices, cfg.dedupe_tol * scale)
    new_index = {}
    out_vertices = []
    out_chart = []
    for i, v in enumerate(vertices):
        r = remap[i]
        if r not in new_index:
            new_index[r] = len(out_vertices)
            out_vertices.append(vertices[r])
            out_chart.append(charts[r])
    faces = []
    for a, b, c, d in quads:
        ia, ib, ic, id_ = (new_index[remap[a]], new_index[remap[b]],
                           new_index[remap[c]], new_index[remap[d]])
        faces.append((ia, ib, ic))
        faces.append((ia, ic, id_))

    mesh = Mesh(out_vertices, faces, out_chart, loop_residual=worst_loop)
    mesh.validate()
    return mesh


def _dedupe(vertices, tol: float):
    arr = np.array(vertices)
    remap = list(range(len(vertices)))
    order = np.lexsort((arr[:, 2], arr[:, 1], arr[:, 0]))
    for k in range(1, len(order)):
        i = order[k]
        for back in range(k - 1, -1, -1):
            j = order[back]
            if arr[i, 0] - arr[j, 0] > tol:
                break
            if remap[j] == j and np.linalg.norm(arr[i] - arr[j]) <= tol:
                remap[i] = j
                break
    return remap


@dataclass(frozen=True)
class TraceControl:
    budget: int | None = None
    closure_tol: float | None = None
    escape_radius: float = 40.0
    winding_center: complex = 0j


def principal_direction(phi: complex, which: str) -> complex:
    """Unit direction with Im(phi v^2) = 0 and phi v^2 > 0 (Max) or < 0 (Min).

    The half-angle form sqrt(conj(phi/|phi|)) equals the normalized
    conj(phi) + |phi| wherever the latter is nonzero and stays usable where
    it degenerates (phi on the negative real axis).
    """
    u = phi / abs(phi)
    d = cmath.sqrt(u.conjugate())
    if which == "Min":
        d *= 1j
    elif which != "Max":
        raise ValueError("which must be 'Max' or 'Min'")
    return d


def _singular_points(rf: RatFun, cfg: Config) -> list:
    pts = [c for c, _ in poly_root_clusters(rf.num, cfg)]
    pts += [c for c, _ in poly_root_clusters(rf.den, cfg)]
    return pts


def trace_principal_line(Q: QuadDifferential, z0: complex, which: str = "Max",
                         control: TraceControl = TraceControl(),
                         cfg: Config = DEFAULT) -> Polyline:
    """Arc-length RK4 streamline of one principal family of Q dz^2.

    The line field is defined only up to sign; every evaluation is aligned
    with the previous direction, which suppresses spurious reversals.
    Stops on closure, on the step budget, on leaving the escape radius, or on
    entering the clearance disk of a zero/pole of Q.
    """
    phi = _Evaluator(Q.coeff)
    singular = _singular_points(Q.coeff, cfg)
    budget = control.budget if control.budget is not None else cfg.step_budget
    closure = (control.closure_tol if control.closure_tol is not None
               else cfg.closure_tol)
    center = control.winding_center
    clearance = cfg.singularity_clearance

    def dist_singular(z):
        return min((abs(z - s) for s in singular), default=math.inf)

    z0 = complex(z0)
    if dist_singular(z0) < clearance:
        raise ValueError("start point is inside the clearance disk of a "
                         "zero or pole")

    def direction(z, ref):
        v = phi.scalar(z)
        if v == 0:
            return None
        d = principal_direction(v, which)
        if ref is not None and (d.real * ref.real + d.imag * ref.imag) < 0:
            d = -d
        return d

    def turn(za, zb):
        if za == center or zb == center:
            return 0.0
        return cmath.phase((zb - center) / (za - center))

    def rk4(z, h, ref):
        k1 = direction(z, ref)
        if k1 is None:
            return None, None
        k2 = direction(z + 0.5 * h * k1, k1)
        k3 = direction(z + 0.5 * h * (k2 or k1), k1)
        k4 = direction(z + h * (k3 or k1), k1)
        if k2 is None or k3 is None or k4 is None:
            return None, None
        return z + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4), k1

    def land_on_section(z, ref, d0):
        # Newton steps along the flow onto the section through z0 normal to
        # d0; sub-steps are genuine RK4 steps, so the landing point stays on
        # the leaf instead of on a chord
        zc = z
        for _ in range(6):
            s = (d0.conjugate() * (zc - z0)).real
            if abs(s) <= 1e-3 * closure:
                return zc
            k = direction(zc, ref)
            if k is None:
                return None
            align = (d0.conjugate() * k).real
            if abs(align) < 0.1:
                return None
            step, _ = rk4(zc, -s / align, ref)
            if step is None:
                return None
            zc = step
        return zc

    points = [z0]
    z = z0
    prev = None
    d0 = None
    s_prev = 0.0
    total_arg = 0.0
    closed = False
    reason = "budget"
    for step in range(budget):
        h = min(cfg.step_max, cfg.step_frac * dist_singular(z))
        if d0 is None:
            d0 = direction(z, None)
            if d0 is None:
                reason = "singular"
                break
        znew, k1 = rk4(z, h, prev)
        if znew is None:
            reason = "singular"
            break
        # Poincare section: the line through z0 normal to the launch
        # direction; an upward crossing close to z0 is a candidate return
        s_new = (d0.conjugate() * (znew - z0)).real
        if (step >= 5 and s_prev < 0.0 <= s_new
                and abs(znew - z0) <= 2.0 * h + 10.0 * closure
                and abs(total_arg) > math.pi):
            zc = land_on_section(z, prev, d0)
            if zc is not None and abs(zc - z0) <= closure:
                total_arg += turn(z, zc)
                points.append(zc)
                closed = True
                reason = "closed"
                break
        total_arg += turn(z, znew)
        points.append(znew)
        prev = k1
        s_prev = s_new
        z = znew
        if dist_singular(z) < clearance:
            reason = "singular"
            break
        if abs(z - center) > control.escape_radius:
            reason = "escaped"
            break
    winding = round(total_arg / (2.0 * math.pi)) if closed else 0
    return Polyline(points, closed=closed, winding=winding, stop_reason=reason,
                    label=which)


def detect_closed_line(Q: QuadDifferential, end: SpherePoint,
                       annulus: tuple, which: str | None = None,
                       cfg: Config = DEFAULT) -> Polyline | None:
    """Search an annulus around the end for a closed leaf of winding one.

    Launches traces from points of a fixed radial ray; a leaf that returns to
    its launch point within the closure tolerance after one turn is the
    closed line.  Absence (budget exhausted on every launch) returns None.
    """
    r_in, r_out = float(annulus[0]), float(annulus[1])
    if not 0.0 < r_in < r_out:
        raise ValueError("annulus radii must satisfy 0 < inner < outer")
    local = Q.centered_chart(end)
    Qc = QuadDifferential(local)
    families = (which,) if which in ("Max", "Min") else ("Max", "Min")
    singular = _singular_points(local, cfg)
    n_launch = 6
    control = TraceControl(escape_radius=3.0 * r_out)
    for i in range(n_launch):
        r = r_in * (r_out / r_in) ** (i / (n_launch - 1))
        z0 = r * cmath.exp(0.37j)
        if min((abs(z0 - s) for s in singular), default=math.inf) < cfg.singularity_clearance:
            continue
        for fam in families:
            leaf = trace_principal_line(Qc, z0, fam, control, cfg)
            if leaf.closed and abs(leaf.winding) == 1:
                return _polyline_to_global(leaf, end)
    return None


def _polyline_to_global(leaf: Polyline, end: SpherePoint) -> Polyline:
    if end.is_infinity:
        pts = [1.0 / w for w in leaf.points]
        winding = -leaf.winding
    else:
        c = to_complex(end.value)
        pts = [c + w for w in leaf.points]
        winding = leaf.winding
    return Polyline(pts, closed=leaf.closed, winding=winding,
                    stop_reason=leaf.stop_reason, label=leaf.label)


def _fmt(x: float, decimals: int) -> str:
    s = f"{x:.{decimals}f}"
    return s[1:] if s.startswith("-") and float(s) == 0 else s


def export(artifact, format: str, path: str, punctures=(),
           cfg: Config = DEFAULT) -> None:
    """Write a mesh (OBJ) or a list of polylines (SVG) atomically.

    Output is deterministic: stable ordering, fixed precision, no
    environment-dependent content.
    """
    fmt = format.upper()
    if fmt == "OBJ":
        if not isinstance(artifact, Mesh):
            raise ValueError("OBJ export needs a Mesh")
        artifact.validate()
        lines = []
        for v in artifact.vertices:
            lines.append("v " + " ".join(f"{c:.{cfg.sig_digits}g}" for c in v))
        for f in artifact.faces:
            lines.append(f"f {f[0] + 1} {f[1] + 1} {f[2] + 1}")
        _atomic_write(path, "\n".join(lines) + "\n")
        return
    if fmt == "SVG":
        if isinstance(artifact, Mesh):
            raise ValueError("SVG export needs a list of polylines")
        _atomic_write(path, _svg_document(list(artifact), punctures, cfg))
        return
    raise ValueError(f"unknown export format {format!r}")


def _svg_document(polylines, punctures, cfg: Config) -> str:
    dec = cfg.svg_decimals
    pts = [complex(p) for line in polylines for p in line.points]
    marks = [to_complex(p.value) for p in punctures
             if isinstance(p, SpherePoint) and not p.is_infinity]
    marks += [complex(p) for p in punctures if not isinstance(p, SpherePoint)]
    every = pts + marks
    if every:
        xs = [z.real for z in every]
        ys = [-z.imag for z in every]
        x0, x1 = min(xs), max(xs)
        y0, y1 = min(ys), max(ys)
    else:
        x0 = y0 = -1.0
        x1 = y1 = 1.0
    span = max(x1 - x0, y1 - y0, 1e-6)
    pad = 0.06 * span
    x0, y0, w, h = x0 - pad, y0 - pad, (x1 - x0) + 2 * pad, (y1 - y0) + 2 * pad
    stroke = max(w, h) / 640.0
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{_fmt(x0, dec)} {_fmt(y0, dec)} {_fmt(w, dec)} {_fmt(h, dec)}">',
        f'<style>path{{fill:none;stroke-width:{_fmt(stroke, dec)}}}'
        'path.Max{stroke:#19557f}path.Min{stroke:#a03518}'
        'circle.puncture{fill:#000000}</style>',
    ]
    for line in polylines:
        if not line.points:
            continue
        cmds = []
        for i, p in enumerate(line.points):
            z = complex(p)
            cmds.append(("M" if i == 0 else "L")
                        + f" {_fmt(z.real, dec)} {_fmt(-z.imag, dec)}")
        if line.closed:
            cmds.append("Z")
        cls = line.label if line.label in ("Max", "Min") else "Max"
        out.append(f'<path class="{cls}" d="{" ".join(cmds)}"/>')
    for z in marks:
        out.append(f'<circle class="puncture" cx="{_fmt(z.real, dec)}" '
                   f'cy="{_fmt(-z.imag, dec)}" r="{_fmt(2.2 * stroke, dec)}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _atomic_write(path: str, content: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(content)
    os.replace(tmp, path)
