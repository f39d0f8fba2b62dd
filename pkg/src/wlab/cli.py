"""Command-line front end: catalog, verification, classification, rendering,
and JSON reports.

Exit codes: 0 success, 1 a verification check failed, 2 malformed input or
unusable parameters.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict
from fractions import Fraction

from . import __version__
from .algebra import QQi, QuadDifferential, SpherePoint, to_complex
from .catalog import FamilyParams, build, catalog_entries
from .config import DEFAULT, Config, load_config
from .hopf import class_c_verdict, end_report, hopf_differential
from .render import (default_sampling, detect_closed_line, export,
                     integrate_immersion, trace_principal_line, TraceControl)
from .weierstrass import (DocumentError, check_immersion_completeness,
                          check_periods, check_tau_compatibility, point_encode,
                          scalar_encode, surface_from_doc, surface_to_doc,
                          topology_report)


def _sig(x: float, cfg: Config) -> float:
    return float(f"{x:.{cfg.sig_digits}g}")


def _scalar(value, cfg: Config):
    enc = scalar_encode(value)
    if isinstance(enc, list) and enc and isinstance(enc[0], float):
        return [_sig(enc[0], cfg), _sig(enc[1], cfg)]
    return enc


def _rational(value, cfg: Config):
    if value is None:
        return None
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return _sig(float(value), cfg)


def _check_entry(ok: bool, details, worst=None, cfg: Config = DEFAULT) -> dict:
    entry = {"status": "ok" if ok else "failed", "details": list(details)}
    if worst is not None:
        entry["worst"] = _sig(worst, cfg)
    return entry


def build_report(W, doc: dict, cfg: Config) -> tuple[dict, bool]:
    """The full verification/classification document for one surface."""
    imm = check_immersion_completeness(W, cfg)
    imm_details = [d for d in imm.details if "metric" not in d]
    comp_details = [d for d in imm.details if "metric" in d]
    per = check_periods(W, cfg)
    checks = {
        "immersion": _check_entry(not imm_details, imm_details, cfg=cfg),
        "completeness": _check_entry(not comp_details, comp_details, cfg=cfg),
        "periods": _check_entry(per.ok, per.details, per.worst, cfg),
    }
    if W.tau_symmetric:
        tau = check_tau_compatibility(W, cfg)
        checks["tau_laws"] = _check_entry(tau.ok, tau.details, cfg=cfg)
    else:
        checks["tau_laws"] = {"status": "skipped",
                              "reason": "surface does not claim the "
                                        "antipodal symmetry"}
    failed = any(c.get("status") == "failed" for c in checks.values())

    top = topology_report(W, cfg)
    topology = {
        "deg_g": top.deg_g,
        "n_ends": top.n_ends,
        "nu": list(top.nu),
        "r_ends": top.r_ends,
        "euler_char": top.euler_char,
        "total_curvature_over_pi": top.total_curvature_over_pi,
        "jorge_meeks_ok": top.jorge_meeks_ok,
        "closed_line_formula_ok": top.closed_line_formula_ok,
        "chern_osserman_slack": top.chern_osserman_slack,
        "bound_inequality_ok": top.bound_inequality_ok,
        "ends_all_order_two": top.ends_all_order_two,
        "quotient": top.quotient,
    }
    ends = []
    for er in top.ends:
        fol = er.foliation
        ends.append({
            "end": point_encode(er.end),
            "end_type": str(er.end_type),
            "nu": er.nu,
            "ord_QH": er.ord_QH,
            "r_g": er.r_g,
            "gamma": _scalar(er.gamma, cfg),
            "foliation": {
                "kind": fol.kind,
                "order": fol.order,
                "a": _rational(fol.a, cfg),
                "b": _rational(fol.b, cfg),
                "rate": _sig(fol.rate, cfg) if fol.rate is not None else None,
            },
            "closed_line_present": er.closed_line_present,
            "jm_hopf_identity_ok": er.jm_hopf_identity_ok,
        })
    verdict = class_c_verdict(W, cfg)
    report = {
        "schema": 1,
        "tool": {"name": "wlab", "version": __version__},
        "surface": doc,
        "backend": W.backend,
        "checks": checks,
        "topology": topology,
        "ends": ends,
        "class_C": {"in_class_C": verdict.in_class_C,
                    "consistency": list(verdict.consistency)},
        "config": asdict(cfg),
    }
    return report, failed


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if out:
        tmp = out + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, out)
    else:
        sys.stdout.write(text)


def _load_surface(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as e:
        raise DocumentError(f"{path}:{e.lineno}:{e.colno}", e.msg)
    if not isinstance(doc, dict):
        raise DocumentError("$", "surface document must be a JSON object")
    return surface_from_doc(doc), doc


def _ints(text: str):
    return tuple(int(t) for t in text.split(",") if t != "")


def _complexes(text: str):
    return tuple(complex(t) for t in text.split(",") if t != "")


def _cmd_catalog(args, cfg: Config) -> int:
    if args.what == "list":
        _emit({"schema": 1, "families": catalog_entries()}, args.output)
        return 0
    fam = args.family
    if fam == "catenoid":
        params = FamilyParams.catenoid()
    elif fam == "enneper":
        params = FamilyParams.enneper()
    elif fam == "nodoid":
        params = FamilyParams.nodoid(args.n)
    elif fam == "carlos_first":
        params = FamilyParams.carlos_first(args.lam, args.sign)
    elif fam == "carlos_second":
        params = FamilyParams.carlos_second(args.lam, args.branch)
    elif fam == "general_projective":
        params = FamilyParams.general_projective(
            args.m, _ints(args.k), _ints(args.orders),
            _complexes(args.a), _complexes(args.b))
    elif fam == "qstar":
        params = FamilyParams.qstar(args.t)
    else:
        raise ValueError(f"unknown family {fam!r}")
    obj = build(params, cfg)
    if isinstance(obj, QuadDifferential):
        doc = {
            "schema": 1,
            "kind": "quad_differential",
            "backend": obj.backend,
            "coeff": {
                "num": [scalar_encode(c) for c in obj.coeff.num.coeffs],
                "den": [scalar_encode(c) for c in obj.coeff.den.coeffs],
            },
            "family": {"name": "qstar", **params.args,
                       "resolved": params.resolved},
        }
    else:
        doc = surface_to_doc(obj)
    _emit(doc, args.output)
    return 0


def _cmd_verify(args, cfg: Config) -> int:
    W, _ = _load_surface(args.surface)
    failures = []
    imm = check_immersion_completeness(W, cfg)
    for d in imm.details:
        name = "completeness" if "metric" in d else "immersion"
        failures.append(f"{name}: {d}")
    per = check_periods(W, cfg)
    failures.extend(f"periods: {d}" for d in per.details)
    if W.tau_symmetric:
        tau = check_tau_compatibility(W, cfg)
        failures.extend(f"tau_laws: {d}" for d in tau.details)
    if failures:
        for line in failures:
            print(line)
        return 1
    print("ok")
    return 0


def _cmd_classify(args, cfg: Config) -> int:
    W, _ = _load_surface(args.surface)
    Q = hopf_differential(W, cfg)
    ends = []
    for p in W.punctures:
        er = end_report(W, p, Q, cfg)
        fol = er.foliation
        ends.append({
            "end": point_encode(p),
            "end_type": str(er.end_type),
            "nu": er.nu,
            "ord_QH": er.ord_QH,
            "r_g": er.r_g,
            "foliation": {
                "kind": fol.kind,
                "order": fol.order,
                "a": _rational(fol.a, cfg),
                "b": _rational(fol.b, cfg),
                "rate": _sig(fol.rate, cfg) if fol.rate is not None else None,
            },
            "closed_line_present": er.closed_line_present,
        })
    verdict = class_c_verdict(W, cfg)
    _emit({"schema": 1, "ends": ends,
           "class_C": {"in_class_C": verdict.in_class_C,
                       "consistency": list(verdict.consistency)}}, args.output)
    return 0


def _cmd_render(args, cfg: Config) -> int:
    W, _ = _load_surface(args.surface)
    if args.what == "surface":
        sampling = default_sampling(W, radial=args.radial, angular=args.angular,
                                    cfg=cfg)
        mesh = integrate_immersion(W, sampling, cfg)
        export(mesh, "OBJ", args.output, cfg=cfg)
        return 0
    Q = hopf_differential(W, cfg)
    sampling = default_sampling(W, cfg=cfg)
    polylines = []
    budget = min(cfg.step_budget, 12000)
    for i, p in enumerate(W.punctures):
        r_in, r_out = sampling["annuli"][i]
        closed = detect_closed_line(Q, p, (r_in, r_out), None, cfg)
        if closed is not None and not p.is_infinity:
            polylines.append(closed)
        if p.is_infinity:
            continue
        local = Q.centered_chart(p)
        center = to_complex(p.value)
        for fam in ("Max", "Min"):
            for k in range(args.leaves):
                r = r_in * (r_out / r_in) ** ((k + 0.5) / args.leaves)
                z0 = r * complex(-0.2911, 0.9567)
                leaf = trace_principal_line(
                    QuadDifferential(local), z0, fam,
                    TraceControl(budget=budget, escape_radius=2.5 * r_out), cfg)
                leaf.points = [center + w for w in leaf.points]
                polylines.append(leaf)
    export(polylines, "SVG", args.output, punctures=W.punctures, cfg=cfg)
    return 0


def _cmd_report(args, cfg: Config) -> int:
    W, doc = _load_surface(args.surface)
    report, failed = build_report(W, doc, cfg)
    _emit(report, args.output)
    if failed:
        for name, entry in report["checks"].items():
            if entry.get("status") == "failed":
                first = entry["details"][0] if entry["details"] else ""
                print(f"{name}: {first}", file=sys.stderr)
        return 1
    return 0


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="wlab",
        description="Minimal surfaces from Weierstrass data: verification, "
                    "curvature-line classification, rendering.")
    ap.add_argument("--config", help="path to a JSON config file "
                                     "(default: $WLAB_CONFIG if set)")
    sub = ap.add_subparsers(dest="command", required=True)

    cat = sub.add_parser("catalog", help="list or build catalog families")
    cats = cat.add_subparsers(dest="what", required=True)
    cl = cats.add_parser("list")
    cl.add_argument("-o", "--output")
    cb = cats.add_parser("build")
    cb.add_argument("family")
    cb.add_argument("--n", type=int, default=1)
    cb.add_argument("--lam", type=float, default=1.0)
    cb.add_argument("--sign", default="+", choices=["+", "-"])
    cb.add_argument("--branch", default="X+")
    cb.add_argument("--t", type=float, default=0.5)
    cb.add_argument("--m", type=int, default=3)
    cb.add_argument("--k", default="")
    cb.add_argument("--orders", default="", help="comma-separated n_j")
    cb.add_argument("--a", default="")
    cb.add_argument("--b", default="")
    cb.add_argument("-o", "--output")

    ver = sub.add_parser("verify", help="run the exactness checks")
    ver.add_argument("surface")

    cls = sub.add_parser("classify", help="per-end curvature-line dynamics")
    cls.add_argument("surface")
    cls.add_argument("-o", "--output")

    ren = sub.add_parser("render", help="mesh (OBJ) or foliation (SVG)")
    rens = ren.add_subparsers(dest="what", required=True)
    rs = rens.add_parser("surface")
    rs.add_argument("surface")
    rs.add_argument("-o", "--output", required=True)
    rs.add_argument("--radial", type=int, default=12)
    rs.add_argument("--angular", type=int, default=32)
    rf = rens.add_parser("foliation")
    rf.add_argument("surface")
    rf.add_argument("-o", "--output", required=True)
    rf.add_argument("--leaves", type=int, default=3)

    rep = sub.add_parser("report", help="full JSON report")
    rep.add_argument("surface")
    rep.add_argument("-o", "--output")
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else load_config()
    except (OSError, ValueError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    try:
        if args.command == "catalog":
            return _cmd_catalog(args, cfg)
        if args.command == "verify":
            return _cmd_verify(args, cfg)
        if args.command == "classify":
            return _cmd_classify(args, cfg)
        if args.command == "render":
            return _cmd_render(args, cfg)
        if args.command == "report":
            return _cmd_report(args, cfg)
    except DocumentError as e:
        print(f"input error: {e}", file=sys.stderr)
        return 2
    except FileNotFoundError as e:
        print(f"input error: {e}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
