"""Command line front end.

    hestonlaw <command> --params p.json [options]

Reports are JSON ``{command, inputs, outputs, checks}`` on stdout (or
``--out``); tabular commands switch to CSV with ``--csv``. Exit codes:
0 success, 1 invalid input or usage, 2 a consistency check failed.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import charfn, checks, density, domain, factorize, oracle, wings
from .errors import ConsistencyError, HestonLawError
from .params import EvalContext, SeriesTolerance, load_params, params_to_dict


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _enc(x):
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return x
    if isinstance(x, dict):
        return {k: _enc(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_enc(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_enc(v) for v in x.tolist()]
    if isinstance(x, np.integer):
        return int(x)
    return x


def parse_grid(text: str):
    try:
        a, b, n = text.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError:
        raise UsageError(f"grid must look like start:stop:count, got {text!r}") from None
    if n < 1:
        raise UsageError("grid count must be >= 1")
    return a, b, n


def _u_values(args):
    if args.grid is not None:
        a, b, n = parse_grid(args.grid)
        return np.linspace(a, b, n)
    if args.u is not None:
        return np.array([args.u])
    raise UsageError("give --u or --grid")


def _context(args) -> EvalContext:
    if not args.params:
        raise UsageError("--params is required")
    ctx = load_params(args.params)
    if args.tol is not None:
        ctx = EvalContext(ctx.params, ctx.t, SeriesTolerance(eps=args.tol))
    return ctx


def _common(p):
    p.add_argument("--params", help="JSON parameter file")
    p.add_argument("--seed", type=int, default=20240101)
    p.add_argument("--tol", type=float, default=None, help="series truncation tolerance")
    p.add_argument("--csv", action="store_true", help="CSV instead of JSON for tables")
    p.add_argument("--out", default=None, help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="hestonlaw", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("cf", help="characteristic function")
    _common(p)
    p.add_argument("--u", type=float)
    p.add_argument("--grid")
    p.add_argument("--form", choices=["new", "albrecher"], default="new")
    p.add_argument("--imag", action="store_true", help="report the imaginary part only")

    p = sub.add_parser("mgf", help="moment generating function")
    _common(p)
    p.add_argument("--u", type=float)
    p.add_argument("--grid")

    p = sub.add_parser("domain", help="abscissae of convergence")
    _common(p)
    p.add_argument("--t-grid", dest="t_grid")

    p = sub.add_parser("wings", help="Lee wing coefficients")
    _common(p)

    p = sub.add_parser("moment", help="spot moment E[S_t^n]")
    _common(p)
    p.add_argument("--n", type=float, required=True)

    p = sub.add_parser("deal", help="second-moment deal prices")
    _common(p)
    p.add_argument("--type", choices=["perf-note", "in-arrears"], required=True)
    p.add_argument("--df", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.25)
    p.add_argument("--notional", type=float, default=1.0)

    p = sub.add_parser("factorize", help="zeros, residues and factor parameters")
    _common(p)
    p.add_argument("--n", type=int, default=200, help="ladder levels per side")

    p = sub.add_parser("density", help="factor-product density (CSV)")
    _common(p)
    p.add_argument("--factors", type=int, required=True)
    p.add_argument("--grid", required=True)
    p.add_argument("--reference", action="store_true")

    p = sub.add_parser("oracle", help="Monte Carlo MGF estimates")
    _common(p)
    p.add_argument("--paths", type=int, default=100_000)
    p.add_argument("--steps", type=int, default=256, help="steps per unit time")
    p.add_argument("--u", default="0.5,1")

    p = sub.add_parser("check", help="cross-validation suite")
    _common(p)
    p.add_argument("--level", choices=["quick", "full"], default="quick")
    return ap


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_enc(v) for v in r])
    return buf.getvalue()


def _run(args):
    """Returns ``(report, csv_text_or_None)``."""
    ctx = _context(args)
    inputs = {"params": params_to_dict(ctx.params, ctx.t)}
    report_checks = []
    table = None
    cmd = args.command

    if cmd == "cf":
        us = _u_values(args)
        phi = charfn.charfn(ctx, us, args.form)
        phi = np.atleast_1d(phi)
        if args.imag:
            rows = [{"u": u, "im": z.imag} for u, z in zip(us, phi)]
        else:
            rows = [{"u": u, "re": z.real, "im": z.imag} for u, z in zip(us, phi)]
        outputs = rows
        inputs["form"] = args.form
    elif cmd == "mgf":
        us = _u_values(args)
        vals = np.atleast_1d(charfn.mgf(ctx, us))
        outputs = [{"u": u, "value": v} for u, v in zip(us, vals)]
    elif cmd == "domain":
        if args.t_grid:
            a, b, n = parse_grid(args.t_grid)
            outputs = [domain.abscissae(ctx.with_t(t)).as_dict() | {"t": t}
                       for t in np.linspace(a, b, n)]
            domain.abscissa_curve(ctx, np.linspace(a, b, n))
        else:
            outputs = domain.abscissae(ctx).as_dict()
    elif cmd == "wings":
        outputs = wings.wing_report(ctx).as_dict()
    elif cmd == "moment":
        outputs = {"n": args.n, "value": wings.spot_moment(ctx, args.n)}
    elif cmd == "deal":
        if args.type == "perf-note":
            val = wings.performance_note_price(ctx, args.notional, args.df)
            inputs.update(notional=args.notional, df=args.df)
        else:
            val = wings.inarrears_fair_strike(ctx, args.delta)
            inputs.update(delta=args.delta)
        outputs = {"type": args.type, "value": val}
    elif cmd == "factorize":
        fact = factorize.build_factorization(ctx, args.n)
        outputs = fact.as_dict()
        inputs["n"] = args.n
        if args.csv:
            table = _csv_text(["root", "residue", "c", "g"],
                              zip(fact.roots, fact.residues, fact.c_shift, fact.g_coef))
    elif cmd == "density":
        grid = parse_grid(args.grid)
        fact = factorize.build_factorization(ctx, max(50, args.factors))
        approx = density.approx_law(ctx, fact, args.factors, grid)
        cols = [approx.x, approx.values]
        header = ["x", "approx"]
        if args.reference:
            cols.append(density.reference_density(ctx, grid).values)
            header.append("reference")
        table = _csv_text(header, zip(*cols))
        outputs = {"mass": approx.mass, "warnings": list(approx.warnings)}
    elif cmd == "oracle":
        try:
            us = [float(x) for x in args.u.split(",") if x.strip()]
        except ValueError:
            raise UsageError(f"--u must be a comma separated list, got {args.u!r}") from None
        mc = oracle.McConfig(paths=args.paths, steps_per_unit_time=args.steps, seed=args.seed)
        sample = oracle.simulate_terminal(ctx, mc)
        est = oracle.mc_mgf(ctx, mc, us, sample)
        outputs = {"rows": [{"u": u, "estimate": e, "se": s} for u, (e, s) in zip(us, est)],
                   "meta": sample.meta}
        inputs.update(paths=args.paths, steps=args.steps, seed=args.seed)
        if args.csv:
            table = _csv_text(["u", "estimate", "se"], [(u, e, s) for u, (e, s) in zip(us, est)])
    elif cmd == "check":
        report_checks = checks.run_checks(ctx, args.level, args.seed)
        outputs = {"passed": sum(r["pass"] for r in report_checks), "total": len(report_checks)}
        inputs.update(level=args.level, seed=args.seed)
    else:  # pragma: no cover - argparse restricts the choices
        raise UsageError(f"unknown command {cmd!r}")

    if args.csv and table is None and cmd in ("cf", "mgf"):
        keys = list(outputs[0].keys())
        table = _csv_text(keys, [[r[k] for k in keys] for r in outputs])
    report = {"command": cmd, "inputs": inputs, "outputs": outputs, "checks": report_checks}
    return report, table


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required")
        report, table = _run(args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except ConsistencyError as exc:
        print(json.dumps({"error": "consistency", "message": str(exc),
                          "diagnostics": _enc(exc.diagnostics)}), file=sys.stderr)
        return 2
    except (HestonLawError, ValueError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    if table is not None and (args.csv or args.command == "density"):
        _emit(table, args.out)
    else:
        _emit(json.dumps(_enc(report), indent=2) + "\n", args.out)
    if any(not r["pass"] for r in report["checks"]):
        return 2
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
