"""``sepflow`` command line.

Exit codes: 0 success, 1 usage or configuration error, 2 verification
failure, 3 unclassifiable input.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import families as fam
from .classifier import DegenerateSamples, FieldSamples, Unclassifiable, classify
from .euler_system import EulerSystem, ode_residual_relative, solve
from .fileio import (ConfigError, GridFormatError, constant_names, export_grid, parse_config,
                     read_grid)
from .geometry import ConeDomain
from .liouville import InadmissiblePair, liouville_verdict
from .verifier import (blowup_profile, grid_residual_report, holder_check, recover_pressure,
                       relative_residual, residual_scales, sampled_residual)

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_UNCLASSIFIABLE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


class Reporter:
    """Collects ``{check, value, threshold, pass}`` records for ``--report``."""

    def __init__(self, path):
        self.path = path
        self.rows = []

    def add(self, check, value, threshold, passed):
        self.rows.append({"check": check, "value": value, "threshold": threshold,
                          "pass": bool(passed)})
        return passed

    def write(self):
        if self.path is None:
            return
        with open(self.path, "w") as fh:
            for row in self.rows:
                fh.write(json.dumps(row) + "\n")


def _load_config(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from None
    try:
        return parse_config(text)
    except ConfigError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _point(text):
    try:
        r, t = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected r,theta") from None
    return r, t


def _domain_from_args(args, angles):
    if args.domain == "fullplane":
        return ConeDomain.full_plane()
    if args.domain == "sector":
        if args.alpha is None or args.beta is None:
            raise UsageError("--domain sector needs --alpha and --beta")
        return ConeDomain.sector(args.alpha, args.beta)
    # infer: an evenly spaced sweep of the circle means the full plane
    step = np.diff(angles)
    if angles.size > 1 and np.allclose(step, 2 * math.pi / angles.size, rtol=1e-9) \
            and abs(angles[0]) < 1e-12:
        return ConeDomain.full_plane()
    lo, hi = float(angles.min()), float(angles.max())
    pad = 0.5 * float(np.min(step)) if angles.size > 1 else 0.0
    return ConeDomain.sector(max(lo - pad, 0.0), min(hi + pad, 2 * math.pi))


# -- subcommands ---------------------------------------------------------------------

def cmd_list(args, rep):
    for tag, cls in fam.FAMILIES.items():
        names = constant_names(tag)
        extra = "lambda, " if tag == "powermode" else ""
        print(f"{tag:10s} constants: {extra}{', '.join(names)}")
    print("powermode on the full plane: integer lambda >= 3; rotlog: sectors only")
    return EXIT_OK


def cmd_sample(args, rep):
    cfg = _load_config(args.config)
    bad = export_grid(cfg.solution(), cfg.grid(), args.output)
    n = cfg.nr * cfg.ntheta
    print(f"wrote {n} rows to {args.output} ({bad} singular rows as nan)")
    return EXIT_OK


def cmd_verify(args, rep):
    if (args.config is None) == (args.input is None):
        raise UsageError("verify needs exactly one of --config or --input")
    ok = True
    if args.config:
        cfg = _load_config(args.config)
        s, g = cfg.solution(), cfg.grid()
        R, T = g.mesh()
        rel = relative_residual(s, (R, T))
        for name, vals in zip(("div", "momentum", "vorticity"), rel):
            v = float(np.max(vals))
            ok &= rep.add(f"analytic_{name}", v, args.analytic_threshold,
                          v <= args.analytic_threshold)
        fd = grid_residual_report(s, g)
        scales = residual_scales(s, (R, T))
        for (name, v), sc in zip(fd.max.items(), scales):
            rel = v / max(float(np.max(sc)), 1.0)
            ok &= rep.add(f"fd_{name}", rel, args.threshold, rel <= args.threshold)
        print(f"{cfg.family} on {cfg.domain}: h={fd.h:.3g}")
    else:
        try:
            data = read_grid(args.input)
        except (OSError, GridFormatError) as exc:
            raise UsageError(f"{args.input}: {exc}") from None
        periodic = _domain_from_args(args, data.angles).is_full_plane
        thr = args.threshold if args.threshold_set else args.file_threshold
        res = sampled_residual(data.radii, data.angles, data.u1, data.u2, data.p, periodic)
        for name, v in res.items():
            ok &= rep.add(f"sampled_{name}", v, thr, v <= thr)
        print(f"{args.input}: {data.radii.size} x {data.angles.size} polar grid")
    for row in rep.rows:
        print(f"  {row['check']:20s} {row['value']:.3e}  (<= {row['threshold']:.1e})  "
              f"{'ok' if row['pass'] else 'FAIL'}")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_classify(args, rep):
    try:
        data = read_grid(args.input)
    except (OSError, GridFormatError) as exc:
        raise UsageError(f"{args.input}: {exc}") from None
    d = _domain_from_args(args, data.angles)
    p = data.p if np.all(np.isfinite(data.p)) else None
    try:
        fs = FieldSamples(data.radii, data.angles, data.u1, data.u2, p)
        res = classify(fs, d, threshold=args.threshold)
    except (Unclassifiable, DegenerateSamples) as exc:
        rep.add("classify", None, args.threshold, False)
        print(f"unclassifiable: {exc}")
        return EXIT_UNCLASSIFIABLE
    rep.add("fit_residual", res.fit_residual, args.threshold, True)
    consts = ", ".join(f"{k}={v:.17g}" for k, v in res.constants.items())
    print(f"{res.tag} on {d}: {consts}")
    print(f"  fit residual {res.fit_residual:.3e}, divergence diagnostic "
          f"{res.diagnostics['divergence_residual']:.3e}")
    return EXIT_OK


def cmd_blowup(args, rep):
    cfg = _load_config(args.config)
    radii = 2.0 ** -np.arange(args.kmin, args.kmax + 1)
    b = blowup_profile(cfg.solution(), radii, args.ntheta, cfg.domain)
    for r, v in zip(b.radii, b.sup_norm):
        print(f"  r={r:.6e}  sup|grad u|={v:.10g}")
    print(b.message)
    rep.add("blowup_slope", b.slope, None, True)
    return EXIT_OK


def cmd_holder(args, rep):
    cfg = _load_config(args.config)
    radii = 2.0 ** -np.arange(args.kmin, args.kmax + 1)
    h = holder_check(cfg.solution(), args.gamma, radii, args.ntheta, cfg.domain)
    for i, (r, q) in enumerate(zip(h.radii, h.ratio)):
        env = "" if h.envelope is None else f"  envelope={h.envelope[i]:.10g}"
        print(f"  r={r:.6e}  sup|u|/r^gamma={q:.10g}{env}")
    if h.certificate_radius is not None:
        print(f"  monotone decay certified below r = {h.certificate_radius:.6g}")
    print(f"verdict: {h.verdict} (sampled certificate, not a proof)")
    rep.add("holder", h.verdict, args.gamma, h.verdict != "fails")
    return EXIT_OK


def cmd_liouville(args, rep):
    cfg = _load_config(args.config)
    try:
        v = liouville_verdict(cfg.solution(), cfg.domain)
    except InadmissiblePair as exc:
        raise UsageError(str(exc)) from None
    print(f"growth_ok={v.growth_ok} c1_closure_ok={v.c1_closure_ok} "
          f"is_constant={v.is_constant} polynomial_degree={v.polynomial_degree}")
    rep.add("liouville_implication", v.consistent, None, v.consistent)
    return EXIT_OK if v.consistent else EXIT_VERIFY


def cmd_euler_solve(args, rep):
    sys_ = EulerSystem(args.a, args.b, args.c, args.d, args.C1, args.C2)
    pair = solve(sys_)
    r = np.asarray(args.r, float)
    print(f"case {pair.case.value}, roots {pair.roots}")
    for ri, p1, p2 in zip(r, pair.phi1(r), pair.phi2(r)):
        print(f"  r={ri:.6g}  phi1={p1:.17g}  phi2={p2:.17g}")
    res = ode_residual_relative(pair, sys_, r)
    print(f"  relative ODE residual {res:.3e}")
    ok = rep.add("ode_residual", res, 1e-10, res <= 1e-10)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_pressure(args, rep):
    cfg = _load_config(args.config)
    s = cfg.solution()
    try:
        got = recover_pressure(s, args.anchor, args.target, args.n, cfg.domain)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    want = float(s.p(*args.target))
    err = abs(got - want)
    print(f"recovered p={got:.17g}  closed form p={want:.17g}  |error|={err:.3e}")
    ok = rep.add("pressure_recovery", err, args.tol, err <= args.tol)
    return EXIT_OK if ok else EXIT_VERIFY


# -- parser ---------------------------------------------------------------------------

def build_parser():
    p = _Parser(prog="sepflow", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", parser_class=_Parser, required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--report", help="write JSON-lines check records here")
        sp.set_defaults(fn=fn)
        return sp

    add("list", cmd_list, "list the families")

    sp = add("sample", cmd_sample, "export a family on a polar grid as CSV")
    sp.add_argument("--config", required=True)
    sp.add_argument("--output", required=True)

    sp = add("verify", cmd_verify, "check residuals of a config or a CSV field")
    sp.add_argument("--config")
    sp.add_argument("--input")
    sp.add_argument("--threshold", type=float, default=1e-4,
                    help="finite-difference residual bound (relative)")
    sp.add_argument("--file-threshold", type=float, default=5e-2,
                    help="bound for spline residuals of CSV input")
    sp.add_argument("--analytic-threshold", type=float, default=1e-9)
    sp.add_argument("--domain", choices=("auto", "fullplane", "sector"), default="auto")
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--beta", type=float)

    sp = add("classify", cmd_classify, "identify the family behind a CSV field")
    sp.add_argument("--input", required=True)
    sp.add_argument("--threshold", type=float, default=1e-8)
    sp.add_argument("--domain", choices=("auto", "fullplane", "sector"), default="auto")
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--beta", type=float)

    for name, fn, h in (("blowup", cmd_blowup, "gradient growth toward the apex"),
                        ("holder", cmd_holder, "decay of |u|/r^gamma toward the apex")):
        sp = add(name, fn, h)
        sp.add_argument("--config", required=True)
        sp.add_argument("--kmin", type=int, default=5)
        sp.add_argument("--kmax", type=int, default=40)
        sp.add_argument("--ntheta", type=int, default=256)
        if name == "holder":
            sp.add_argument("--gamma", type=float, required=True)

    sp = add("liouville", cmd_liouville, "growth / regularity verdict")
    sp.add_argument("--config", required=True)

    sp = add("euler-solve", cmd_euler_solve, "solve r phi' = [[a, b], [c, d]] phi")
    for k in "abcd":
        sp.add_argument(f"--{k}", type=float, required=True)
    sp.add_argument("--C1", type=float, default=1.0)
    sp.add_argument("--C2", type=float, default=0.0)
    sp.add_argument("--r", type=float, nargs="+", default=[0.5, 1.0, 2.0])

    sp = add("pressure-recover", cmd_pressure, "integrate grad p along a segment")
    sp.add_argument("--config", required=True)
    sp.add_argument("--anchor", type=_point, required=True, help="r,theta")
    sp.add_argument("--target", type=_point, required=True, help="r,theta")
    sp.add_argument("--n", type=int, default=4096)
    sp.add_argument("--tol", type=float, default=1e-6)
    return p


def run_command(argv) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "verify":
            args.threshold_set = any(a == "--threshold" or a.startswith("--threshold=")
                                     for a in argv)
        rep = Reporter(args.report)
        code = args.fn(args, rep)
        rep.write()
        return code
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE


def main(argv=None) -> int:
    return run_command(sys.argv[1:] if argv is None else list(argv))


if __name__ == "__main__":
    sys.exit(main())
