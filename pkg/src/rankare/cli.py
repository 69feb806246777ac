"""Command-line interface.

Every command writes CSV.  Lines starting with ``#`` carry the library
version and the resolved arguments, so output is reproducible and
byte-stable for a given invocation.

Exit status: 0 on success, 2 when a ``--check`` comparison fails, 1 on
any error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys


from . import __version__, efficiency as eff, reference, serial_stats as ss, simulate as sim
from .densities import Gaussian, HodgesLehmann, PowerExp, StudentT
from .errors import DivergenceError, DomainError, RankAreError
from .scores import VanDerWaerden, Wilcoxon, parse_score

EXIT_OK, EXIT_ERROR, EXIT_CHECK = 0, 1, 2


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return "nan" if math.isnan(x) else f"{x:.10g}"
    return str(x)


class _Out:
    def __init__(self, args):
        self.buf = io.StringIO()
        self.writer = csv.writer(self.buf, lineterminator="\n")
        self.buf.write(f"# rankare {__version__}\n")
        cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "output")}
        self.buf.write(f"# command: {args.command}\n")
        self.buf.write(f"# config: {json.dumps(cfg, sort_keys=True)}\n")

    def comment(self, text: str):
        self.buf.write(f"# {text}\n")

    def row(self, cells):
        self.writer.writerow([_fmt(c) for c in cells])

    def flush(self, path):
        text = self.buf.getvalue()
        if path:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


def _parse_range(spec: str) -> list[float]:
    try:
        a, b, step = (float(t) for t in spec.split(":"))
    except ValueError:
        raise DomainError(f"range must be a:b:step, got {spec!r}") from None
    if step <= 0 or b < a:
        raise DomainError("range needs a <= b and step > 0")
    count = int(math.floor((b - a) / step + 1e-9)) + 1
    return [round(a + i * step, 12) for i in range(count)]


def _family(spec: str):
    head, _, rest = spec.lower().partition(":")
    if head == "student" and not rest:
        return StudentT
    if head == "powerexp" and not rest:
        return PowerExp
    if head == "hl" and rest:
        a = float(rest)
        return lambda eps: HodgesLehmann(a, eps)
    if head == "gaussian" and not rest:
        return lambda scale: Gaussian(scale=scale)
    raise DomainError(f"family must be student, powerexp, gaussian or hl:<a>; got {spec!r}")


def cmd_table(args, out: _Out) -> int:
    which = args.which
    ref = reference.TABLES[which]
    tol = args.tol if args.tol is not None else reference.DEFAULT_TOL[which]
    out.row(["param", *reference.COLUMNS])
    failures = []
    for param, expected in ref.items():
        row = eff.table_row(which, param, method=args.method)
        got = (row.c_f, row.d_f, row.are, row.are_serial)
        out.row([param, *got])
        if not args.check:
            continue
        for col, g, e in zip(reference.COLUMNS, got, expected):
            if e is None:
                ok = g is None
            else:
                ok = g is not None and not math.isnan(g) and abs(g - e) <= tol
            if not ok:
                failures.append(f"{param},{col},got {_fmt(g) or '-'},expected {_fmt(e) or '-'}")
    if args.check:
        out.comment(f"check tol={tol:g}: {'PASS' if not failures else 'FAIL ' + str(len(failures))}")
        for f in failures:
            out.comment(f"mismatch {f}")
            print(f"mismatch {f}", file=sys.stderr)
    return EXIT_CHECK if failures else EXIT_OK


def cmd_are(args, out: _Out) -> int:
    J1, J2 = parse_score(args.j1), parse_score(args.j2)
    serial = args.serial or args.j3 is not None or args.j4 is not None
    J3 = parse_score(args.j3) if args.j3 else J1
    J4 = parse_score(args.j4) if args.j4 else J2
    make = _family(args.family)
    out.row(["param", "ARE", *(["ARE_serial"] if serial else [])])
    for th in _parse_range(args.range):
        f = make(th)
        cells = [th, eff.are_nonserial(J1, J2, f).are]
        if serial:
            # (J1, J3) autocorrelation against (J2, J4)
            try:
                cells.append(eff.are_serial(J1, J3, J2, J4, f).are)
            except DivergenceError:
                cells.append(None)
        out.row(cells)
    return EXIT_OK


def cmd_bounds(args, out: _Out) -> int:
    out.row(["bound", "param", "value"])
    out.row(["W_vs_vdW", "", eff.bound_symmetric("w_vs_vdw")])
    out.row(["Cauchy_vs_W", "", eff.bound_symmetric("cauchy_vs_w")])
    out.row(["Cauchy_vs_vdW", "", eff.bound_symmetric("cauchy_vs_vdw")])
    for nu in (0.1, 0.25, 0.5, 0.75, 1.0):
        vs_w, vs_vdw = eff.bound_student_scores(nu)
        out.row(["student_vs_W", nu, vs_w])
        out.row(["student_vs_vdW", nu, vs_vdw])
    V, W = VanDerWaerden(), Wilcoxon()
    for name, pair in (("vdw,vdw", (V, V)), ("wilcoxon,wilcoxon", (W, W)), ("vdw,wilcoxon", (V, W))):
        out.row(["serial_SWW_vs", name, eff.bound_serial_sww(*pair)])
    return EXIT_OK


def cmd_autocorr(args, out: _Out) -> int:
    series = ss.read_series(args.file)
    r = ss.ranks(series, ties=args.ties)
    try:
        lags = [int(t) for t in args.lags.split(",") if t.strip()]
    except ValueError:
        raise DomainError(f"lags must be comma-separated integers, got {args.lags!r}") from None
    out.row(ss.CSV_HEADER)
    for k in lags:
        out.row(ss.autocorr(r, k, args.stat).row())
    return EXIT_OK


def cmd_simulate(args, out: _Out) -> int:
    config = sim.load_config(args.config)
    out.comment(f"simulate: {json.dumps(config, sort_keys=True)}")
    out.row(sim.CSV_HEADER)
    for est in sim.run_config(config):
        out.row(est.row())
    return EXIT_OK


def cmd_gaussian_check(args, out: _Out) -> int:
    g = Gaussian()
    W, V = Wilcoxon(), VanDerWaerden()
    ns = eff.are_nonserial(W, V, g)
    se = eff.are_serial(W, W, V, V, g)
    expected = [
        ("C", ns.c_f, 0.5 / math.sqrt(math.pi)),
        ("D", se.d_f, 0.5 / math.sqrt(math.pi)),
        ("ARE", ns.are, 3.0 / math.pi),
        ("ARE_serial", se.are, 9.0 / math.pi**2),
    ]
    out.row(["quantity", "computed", "closed_form", "abs_diff"])
    bad = False
    for name, got, want in expected:
        out.row([name, got, want, abs(got - want)])
        bad |= abs(got - want) > args.tol
    return EXIT_CHECK if bad else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rankare", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"rankare {__version__}")
    p.add_argument("-o", "--output", help="write CSV here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("table", help="recompute a W-versus-vdW efficiency table")
    t.add_argument("which", type=int, choices=(1, 2, 3))
    t.add_argument("--check", action="store_true", help="compare with the embedded reference values")
    t.add_argument("--tol", type=float, default=None)
    t.add_argument("--method", choices=("richardson", "exact"), default="richardson",
                   help="a -> 0 limit procedure for table 1")
    t.set_defaults(func=cmd_table)

    a = sub.add_parser("are", help="efficiencies over a family parameter range")
    a.add_argument("--j1", required=True)
    a.add_argument("--j2", required=True)
    a.add_argument("--j3")
    a.add_argument("--j4")
    a.add_argument("--serial", action="store_true")
    a.add_argument("--family", required=True, help="student, powerexp, gaussian or hl:<a>")
    a.add_argument("--range", required=True, help="a:b:step")
    a.set_defaults(func=cmd_are)

    b = sub.add_parser("bounds", help="closed-form efficiency bounds")
    b.set_defaults(func=cmd_bounds)

    c = sub.add_parser("autocorr", help="rank autocorrelations of a series")
    c.add_argument("--file", required=True)
    c.add_argument("--lags", default="1")
    c.add_argument("--stat", choices=("vdw", "sww", "kendall"), default="vdw")
    c.add_argument("--ties", default=None, help="random:<seed> to break ties")
    c.set_defaults(func=cmd_autocorr)

    s = sub.add_parser("simulate", help="Monte Carlo power runs from a JSON config")
    s.add_argument("--config", required=True)
    s.set_defaults(func=cmd_simulate)

    gc = sub.add_parser("gaussian-check", help="Gaussian closed forms against computed values")
    gc.add_argument("--tol", type=float, default=1e-8)
    gc.set_defaults(func=cmd_gaussian_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out = _Out(args)
        code = args.func(args, out)
        out.flush(args.output)
        return code
    except (RankAreError, OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"rankare: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
