"""Command-line front end: ``xitaylor <command> [options]``.

Defaults come from XITAYLOR_* environment variables (XITAYLOR_DIGITS,
XITAYLOR_DELTA, XITAYLOR_WORKERS, XITAYLOR_OUT_DIR, XITAYLOR_CACHE); flags
override them. Exit codes: 0 ok, 1 usage, 2 numerical failure, 3 precision
insufficient. Failures print a JSON object on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
import tempfile
from pathlib import Path

import mpmath

from .errors import PrecisionError, XiTaylorError
from .specfun import PrecisionContext

COMMANDS = ("lambda", "coeffs", "zeros", "curve", "count", "table1", "table2", "sweep", "lfunc", "plot")


class UsageError(Exception):
    exit_code = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _env(name, default, conv=str):
    raw = os.environ.get("XITAYLOR_" + name)
    if raw is None:
        return default
    try:
        return conv(raw)
    except ValueError:
        raise UsageError(f"bad value for XITAYLOR_{name}: {raw!r}")


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix="." + path.name, suffix=".tmp")
    with os.fdopen(fd, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _emit(args, text: str, name: str | None = None):
    """Write to --out, or to out_dir/name when --out-dir is set, else stdout."""
    if getattr(args, "out", None):
        _atomic_write(Path(args.out), text)
    elif name and args.out_dir:
        _atomic_write(Path(args.out_dir) / name, text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _ctx(args) -> PrecisionContext:
    if args.digits < 16:
        raise UsageError("--digits must be >= 16")
    return PrecisionContext(args.digits)


def _delta(args) -> float:
    if not 0 < args.delta <= 0.5:
        raise UsageError("--delta must lie in (0, 0.5]")
    return args.delta


def _int_list(text: str):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated integer list, got {text!r}")


# -- shared pipeline pieces ------------------------------------------------------------


def _coeff_digits(n: int, digits: int) -> int:
    # the roots of T_{2n-2}(lambda z) lose roughly n/3 digits to conditioning
    return max(digits, digits + n // 3 + 10)


def _zero_pipeline(n: int, ctx: PrecisionContext, delta: float, workers: int):
    from .curves import edge_height
    from .phase import PhaseContext
    from .xi import load_or_compute_coeffs, zeta_zero_ordinates
    from .zeros import classify, find_all_roots

    pc = PhaseContext.for_n(n, ctx, delta)
    T = load_or_compute_coeffs(2 * n - 2, PrecisionContext(_coeff_digits(n, ctx.digits)), workers=workers)
    zs = find_all_roots(T, pc.scaling, ctx)
    y_edge = edge_height(pc)
    ts = zeta_zero_ordinates(pc.lam * y_edge + 5, ctx)
    classify(zs, pc, ts, y_edge)
    return pc, zs, y_edge


def _count(pc, y_edge):
    from .curves import LevelCurve
    return LevelCurve(kind="D1", n=pc.n, lam=pc.lam, points=[mpmath.mpc(1 / (2 * pc.lam), y_edge)], y_edge=y_edge)


# -- commands ------------------------------------------------------------------------


def cmd_lambda(args):
    from .phase import lambda_of_n

    sol = lambda_of_n(args.n, _ctx(args))
    _emit(args, sol.to_json(), f"lambda_n{args.n}.json")


def cmd_coeffs(args):
    from .xi import load_or_compute_coeffs

    T = load_or_compute_coeffs(args.degree, _ctx(args), cache_dir=args.cache, workers=args.workers)
    _emit(args, T.to_json(), f"xi_coeffs_deg{args.degree}_d{args.digits}.json")


def cmd_zeros(args):
    from .zeros import count_report

    ctx = _ctx(args)
    pc, zs, y_edge = _zero_pipeline(args.n, ctx, _delta(args), args.workers)
    rep = count_report(zs, pc, _count(pc, y_edge))
    out_dir = Path(args.out_dir or ".")
    _atomic_write(out_dir / f"roots_n{args.n}.csv", zs.to_csv())
    _atomic_write(out_dir / f"count_n{args.n}.json", rep.to_json() + "\n")
    sys.stdout.write(json.dumps({"roots": len(zs.roots), "csv": str(out_dir / f"roots_n{args.n}.csv"),
                                 "count": str(out_dir / f"count_n{args.n}.json")}) + "\n")


def cmd_count(args):
    from .zeros import count_report

    ctx = _ctx(args)
    pc, zs, y_edge = _zero_pipeline(args.n, ctx, _delta(args), args.workers)
    _emit(args, count_report(zs, pc, _count(pc, y_edge)).to_json() + "\n", f"count_n{args.n}.json")


def cmd_curve(args):
    from .curves import szego_exp_curves, trace
    from .phase import PhaseContext

    if args.kind in ("D0", "D1"):
        pc = PhaseContext.for_n(args.n, _ctx(args), _delta(args))
        curve = trace(args.kind, pc, args.samples)
    else:
        curve = szego_exp_curves(args.n, "Dinf" if args.kind == "exp-Dinf" else "D1", args.samples)
        curve.ctx = PrecisionContext(16, 0)
        curve.kind = args.kind
    _emit(args, curve.to_csv(), f"curve_{args.kind}_n{args.n}.csv")


def cmd_table1(args):
    from .classical import table1, table1_csv

    ctx = _ctx(args)
    if ctx.digits < 400:
        raise PrecisionError("table1 needs --digits >= 400")
    _emit(args, table1_csv(table1(ctx), PrecisionContext(16, 0)), "table1.csv")


def cmd_table2(args):
    from .hurwitz import TABLE2_REFERENCE, table2
    from .phase import lambda_of_n
    from .xi import load_or_compute_coeffs, zeta_zero_ordinates

    ctx = _ctx(args)
    n = args.n
    T = load_or_compute_coeffs(2 * n - 2, PrecisionContext(args.coeff_digits), workers=args.workers)
    lam = lambda_of_n(n, ctx).lam
    # the first few zeros only; 11 ordinates lie below 60
    ts = zeta_zero_ordinates(60, T.ctx)
    rows = table2(T, ts, n=n, count=args.count, ctx=ctx)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "paper_value", "computed_value", "ratio", "lambda"])
    for k, err, _ in rows:
        ref = TABLE2_REFERENCE.get(k) if n == 102 else None
        ratio = mpmath.nstr(err / mpmath.mpf(ref), 8) if ref else ""
        w.writerow([k, ref or "", mpmath.nstr(err, 12), ratio, mpmath.nstr(lam, 15)])
    _emit(args, buf.getvalue(), f"table2_n{n}.csv")


def cmd_sweep(args):
    ctx = _ctx(args)
    ns = _int_list(args.n_list)
    if args.kind == "szego":
        from .classical import szego_distance_scaling

        text = szego_distance_scaling(ns, ctx).to_csv()
    elif args.kind == "lambda":
        from .phase import lambda_of_n

        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "lambda", "seed", "n_times_residual_asymp", "n_times_seed_error", "phi2_at_1"])
        for n in ns:
            s = lambda_of_n(n, ctx)
            with ctx.work():
                seed = s.seed
                w.writerow([n, mpmath.nstr(s.lam, ctx.digits), mpmath.nstr(seed, ctx.digits),
                            mpmath.nstr(n * s.residual_asymp, 12), mpmath.nstr(n * (s.lam - seed) / s.lam, 12),
                            mpmath.nstr(s.phi2_at_1, 12)])
        text = buf.getvalue()
    else:
        from .hurwitz import convergence_sweep
        from .xi import load_or_compute_coeffs, zeta_zero_ordinates

        T = load_or_compute_coeffs(2 * max(ns) - 2, PrecisionContext(args.coeff_digits), workers=args.workers)
        ts = zeta_zero_ordinates(60, T.ctx)
        text = convergence_sweep(_int_list(args.j_list), ns, ctx, T, ts).to_csv()
    _emit(args, text, f"sweep_{args.kind}.csv")


_COMPLEX = re.compile(r"^\s*([+-]?[0-9.]+(?:e[+-]?\d+)?)?\s*(?:([+-]\s*[0-9.]*(?:e[+-]?\d+)?)\s*[ij])?\s*$", re.I)


def _parse_complex(text: str):
    """'0.3', '0.2i', '1.02+0.05i' as exact decimal mpc (no binary round trip)."""
    t = text.strip()
    if t and t[-1] in "ijIJ" and not re.search(r"[0-9.]\s*[+-]", t[:-1].lstrip("+-")):
        # pure imaginary: '0.2i', '-i'
        t = "0" + (t if t[0] in "+-" else "+" + t)
    m = _COMPLEX.match(t)
    if not m or not (m.group(1) or m.group(2)):
        raise UsageError(f"cannot parse complex number {text!r}")
    re_part = mpmath.mpf(m.group(1)) if m.group(1) else mpmath.mpf(0)
    im_txt = (m.group(2) or "0").replace(" ", "")
    if im_txt in ("+", "-"):
        im_txt += "1"
    return mpmath.mpc(re_part, mpmath.mpf(im_txt))


def cmd_lfunc(args):
    from .lfunc import LFunctionDescriptor, lambda_of_n_L, symmetry_residual, taylor_rep_L

    ctx = _ctx(args)
    if args.descriptor:
        d = LFunctionDescriptor.from_json(Path(args.descriptor).read_text())
    elif args.preset == "beta":
        d = LFunctionDescriptor.dirichlet_beta()
    else:
        d = LFunctionDescriptor.riemann_zeta()
    sol = lambda_of_n_L(args.n, d, ctx)
    pts = [mpmath.mpc("0.3", 2), mpmath.mpc("0.1", 5), mpmath.mpc("-0.4", "0.7")]
    out = {"scaling": sol.to_dict(),
           "symmetry_residuals": [mpmath.nstr(symmetry_residual(s, d, ctx), 6) for s in pts]}
    if args.z:
        with ctx.work():
            z = _parse_complex(args.z)
        out["representation"] = taylor_rep_L(z, args.n, d, ctx, _delta(args), sol=sol).to_dict(ctx)
    _emit(args, json.dumps(out, indent=1, sort_keys=True) + "\n", f"lfunc_n{args.n}.json")


def _read_points(path: Path):
    rows = list(csv.DictReader(io.StringIO(path.read_text())))
    if not rows:
        return []
    if "re" in rows[0]:
        return [(float(r["re"]), float(r["im"]), r.get("class", "")) for r in rows]
    return [(float(r["x"]), float(r["y"]), r.get("kind", "")) for r in rows]


_COLORS = {"hurwitz": "#1f77b4", "spurious": "#d62728", "local_model": "#2ca02c"}


def render_svg(roots, curves, width=640, height=640) -> str:
    """Deterministic SVG: one circle per root, one polyline per curve (mirrored to all quadrants)."""
    pts = [(x, y) for x, y, _ in roots] + [(x, y) for c in curves for x, y, _ in c]
    xm = max([abs(x) for x, _ in pts] + [1e-9]) * 1.05
    ym = max([abs(y) for _, y in pts] + [1e-9]) * 1.05
    pad = 30

    def sx(x):
        return pad + (x + xm) / (2 * xm) * (width - 2 * pad)

    def sy(y):
        return height - pad - (y + ym) / (2 * ym) * (height - 2 * pad)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
           f'<line x1="{sx(-xm):.3f}" y1="{sy(0):.3f}" x2="{sx(xm):.3f}" y2="{sy(0):.3f}" stroke="#999" stroke-width="0.5"/>',
           f'<line x1="{sx(0):.3f}" y1="{sy(-ym):.3f}" x2="{sx(0):.3f}" y2="{sy(ym):.3f}" stroke="#999" stroke-width="0.5"/>']
    dashes = ["", ' stroke-dasharray="4 3"', ' stroke-dasharray="1 2"']
    for i, c in enumerate(curves):
        for mx, my in ((1, 1), (-1, 1), (1, -1), (-1, -1)):
            seq = " ".join(f"{sx(mx * x):.3f},{sy(my * y):.3f}" for x, y, _ in c)
            out.append(f'<polyline class="curve{i}" points="{seq}" fill="none" stroke="black" stroke-width="1"{dashes[i % 3]}/>')
    for x, y, cls in roots:
        out.append(f'<circle class="root" cx="{sx(x):.3f}" cy="{sy(y):.3f}" r="2" fill="{_COLORS.get(cls, "#333")}"/>')
    out.append(f'<text x="{pad}" y="{pad - 10}" font-size="11" font-family="monospace">x in [{-xm:.4g}, {xm:.4g}], y in [{-ym:.4g}, {ym:.4g}]</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def cmd_plot(args):
    if not args.roots and not args.curves:
        raise UsageError("plot needs --roots and/or --curves")
    for p in ([args.roots] if args.roots else []) + (args.curves.split(",") if args.curves else []):
        if not Path(p).is_file():
            raise UsageError(f"input file not found: {p}")
    roots = _read_points(Path(args.roots)) if args.roots else []
    curves = [_read_points(Path(p)) for p in args.curves.split(",")] if args.curves else []
    _emit(args, render_svg(roots, curves), "plot.svg")


# -- parser --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="xitaylor", description="Taylor polynomials of xi(1/2 + z): zeros, curves and tables.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, digits=30):
        sp.add_argument("--digits", type=int, default=_env("DIGITS", digits, int))
        sp.add_argument("--out", help="output file (default: stdout or --out-dir)")
        sp.add_argument("--out-dir", default=_env("OUT_DIR", None))
        sp.add_argument("--workers", type=int, default=_env("WORKERS", 1, int))
        sp.add_argument("--delta", type=float, default=_env("DELTA", 0.3, float))

    s = sub.add_parser("lambda", help="solve the scaling law for lambda(n)")
    s.add_argument("--n", type=int, required=True)
    common(s)
    s.set_defaults(func=cmd_lambda)

    s = sub.add_parser("coeffs", help="certified Taylor coefficients of f")
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--cache", default=_env("CACHE", None))
    common(s)
    s.set_defaults(func=cmd_coeffs)

    for name, fn in (("zeros", cmd_zeros), ("count", cmd_count)):
        s = sub.add_parser(name, help="roots of T_{2n-2}(lambda z)" if name == "zeros" else "zero-count report")
        s.add_argument("--n", type=int, required=True)
        common(s)
        s.set_defaults(func=fn)

    s = sub.add_parser("curve", help="level curves D0/D1, or the exp curves")
    s.add_argument("--kind", choices=["D0", "D1", "exp-Dinf", "exp-D1"], required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--samples", type=int, default=64)
    common(s)
    s.set_defaults(func=cmd_curve)

    s = sub.add_parser("table1", help="cosh Hurwitz-zero errors")
    common(s, digits=420)
    s.set_defaults(func=cmd_table1)

    s = sub.add_parser("table2", help="xi Hurwitz-zero errors")
    s.add_argument("--n", type=int, default=102)
    s.add_argument("--count", type=int, default=11)
    s.add_argument("--coeff-digits", type=int, default=300)
    common(s)
    s.set_defaults(func=cmd_table2)

    s = sub.add_parser("sweep", help="scaling sweeps over n")
    s.add_argument("--kind", choices=["szego", "lambda", "hurwitz"], required=True)
    s.add_argument("--n-list", required=True)
    s.add_argument("--j-list", default="1,2,3")
    s.add_argument("--coeff-digits", type=int, default=300)
    common(s)
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("lfunc", help="completed L-function scaling and representation")
    s.add_argument("--n", type=int, required=True)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--descriptor", help="descriptor JSON file")
    g.add_argument("--preset", choices=["beta", "zeta"], default="beta")
    s.add_argument("--z", help="also compare T with the model at this point, e.g. 0.2i")
    common(s)
    s.set_defaults(func=cmd_lfunc)

    s = sub.add_parser("plot", help="SVG scatter of roots over curves")
    s.add_argument("--roots")
    s.add_argument("--curves", help="comma-separated curve CSV files")
    s.add_argument("--out")
    s.add_argument("--out-dir", default=_env("OUT_DIR", None))
    s.set_defaults(func=cmd_plot)
    return p


def _fail(kind: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message, "exit_code": code}) + "\n")
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if not getattr(args, "command", None):
            raise UsageError(f"a command is required: {', '.join(COMMANDS)}")
        args.func(args)
        return 0
    except UsageError as e:
        return _fail("usage", str(e), 1)
    except XiTaylorError as e:
        return _fail(type(e).__name__, str(e), e.exit_code)
    except (ValueError, ZeroDivisionError, ArithmeticError) as e:
        return _fail(type(e).__name__, str(e), 2)


if __name__ == "__main__":
    sys.exit(main())
