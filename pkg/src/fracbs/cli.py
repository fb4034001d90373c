"""Command-line front end.

Every command prints a table of flat records to stdout, as CSV or as a JSON
array, and diagnostics (including wall time) to stderr, so identical flags
and seed give byte-identical output. Exit status: 0 success, 1 a check
failed, 2 bad usage.

CSV columns, in order, per command:

    price     command alpha strike maturity tau spot value delta gamma hermite jacobi
    surface   command alpha strike tau spot value hermite jacobi
    residual  command alpha strike tau spot residual tolerance in_band passed
    laplace   command alpha strike lam spot lhs rhs gap passed
    mc        command alpha strike tau spot value se quadrature gap_se paths seed passed
    renewal   command alpha strike maturity tau spot age offset_v value interp mc se gap_se paths seed
    selftest  command criterion check passed margin detail

Each record ends with ``version`` and ``renewal_interp``.
"""

import argparse
import csv
from dataclasses import dataclass, field
import io
import json
import math
import sys
import time

from . import __version__
from .errors import DomainError, NumericError
from .gbm import QuadSpec, bs_delta
from .mc import mc_price
from .nonlocal_op import laplace_check, pde_residual
from .pricer import Model, frac_delta, frac_gamma, frac_price, price_surface
from .renewal import DEFAULT_INTERPRETATION, SojournState, mc_sojourn_price, sojourn_price
from .undershoot import Rng

EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2

RESIDUAL_T = (0.25, 0.5, 1.0, 2.0, 4.0)
RESIDUAL_X = (0.5, 2**-0.5, 1.0, 2**0.5, 2.0)
STRIKE_BAND = 0.05


class UsageError(Exception):
    def __init__(self, flag, message):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


@dataclass
class RunReport:
    command: str
    params: dict
    results: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def rows(self):
        tail = {"version": __version__, "renewal_interp": self.provenance.get("renewal_interp", DEFAULT_INTERPRETATION)}
        return [{"command": self.command, **r, **tail} for r in self.results]


def _number(text):
    return repr(text) if isinstance(text, float) else str(text)


def render(report: RunReport, fmt: str) -> str:
    rows = report.rows()
    if fmt == "json":
        return json.dumps(rows, indent=1) + "\n"
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: _number(v) for k, v in r.items()})
    return buf.getvalue()


# flag validation

def _float_list(text):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _model(args) -> Model:
    if not 0.5 < args.alpha < 1.0:
        raise UsageError("--alpha", f"must lie in (0.5, 1), got {args.alpha}")
    if not args.strike > 0.0:
        raise UsageError("--strike", f"must be positive, got {args.strike}")
    if not args.maturity > 0.0:
        raise UsageError("--maturity", f"must be positive, got {args.maturity}")
    return Model.of(args.alpha, args.strike, args.maturity)


def _quad(args) -> QuadSpec:
    for flag, n in (("--hermite", args.hermite), ("--jacobi", args.jacobi)):
        if n < 8:
            raise UsageError(flag, f"must be at least 8, got {n}")
    return QuadSpec(hermite_nodes=args.hermite, jacobi_nodes=args.jacobi)


def _spot(args):
    if not args.spot > 0.0:
        raise UsageError("--spot", f"must be positive, got {args.spot}")
    return args.spot


def _tau(args, positive=False):
    if not (args.tau > 0.0 if positive else args.tau >= 0.0):
        raise UsageError("--tau", f"must be {'positive' if positive else 'nonnegative'}, got {args.tau}")
    return args.tau


def _paths(args, minimum):
    if args.paths < minimum:
        raise UsageError("--paths", f"must be at least {minimum}, got {args.paths}")
    return args.paths


def _seed(args):
    if not 0 <= args.seed < 2**64:
        raise UsageError("--seed", f"must be a 64-bit unsigned integer, got {args.seed}")
    return args.seed


def _base(args, m, q):
    return {"alpha": m.alpha, "strike": m.K}, {"hermite": q.hermite_nodes, "jacobi": q.jacobi_nodes}


# commands

def cmd_price(args) -> RunReport:
    m, q = _model(args), _quad(args)
    t, x = _tau(args), _spot(args)
    base, nodes = _base(args, m, q)
    row = {**base, "maturity": m.maturity, "tau": t, "spot": x,
           "value": frac_price(m, t, x, q),
           "delta": frac_delta(m, t, x, q) if t > 0 else bs_delta(0.0, x, m.strike),
           "gamma": frac_gamma(m, t, x, q) if t > 0 else math.nan, **nodes}
    return RunReport("price", vars(args), [row], provenance={**nodes})


def cmd_surface(args) -> RunReport:
    m, q = _model(args), _quad(args)
    base, nodes = _base(args, m, q)
    try:
        grid = price_surface(m, args.t_nodes, args.x_nodes, q)
    except DomainError as exc:
        raise UsageError("--t-nodes/--x-nodes", str(exc)) from exc
    rows = [{**base, "tau": r["t"], "spot": r["x"], "value": r["price"], **nodes} for r in grid.records()]
    return RunReport("surface", vars(args), rows, provenance={**nodes})


def cmd_residual(args) -> RunReport:
    m, q = _model(args), _quad(args)
    base, _ = _base(args, m, q)
    if args.grid == "default":
        t_nodes, x_nodes = RESIDUAL_T, [m.K * r for r in RESIDUAL_X]
    else:
        t_nodes, x_nodes = args.t_nodes, args.x_nodes
    rows, checks = [], []
    for t in t_nodes:
        for x in x_nodes:
            r = pde_residual(m, t, x, q)
            band = abs(x / m.K - 1.0) < STRIKE_BAND
            tol = 1e-2 if band else 1e-3
            ok = abs(r) <= tol
            rows.append({**base, "tau": t, "spot": x, "residual": r, "tolerance": tol,
                         "in_band": band, "passed": ok})
            checks.append((f"residual[t={t:g},x={x:g}]", ok, 1.0 - abs(r) / tol))
    off = [abs(r["residual"]) for r in rows if not r["in_band"]]
    if off:
        print(f"max |residual| off the strike band: {max(off):.3g}", file=sys.stderr)
    return RunReport("residual", vars(args), rows, checks, {"hermite": q.hermite_nodes, "jacobi": q.jacobi_nodes})


def cmd_laplace(args) -> RunReport:
    m, q = _model(args), _quad(args)
    base, _ = _base(args, m, q)
    x = _spot(args)
    rows, checks = [], []
    for lam in args.lam:
        if not lam > 0.375:
            raise UsageError("--lam", f"every value must exceed 3/8, got {lam}")
        res = laplace_check(m, lam, x, q)
        ok = res.gap <= 1e-3
        rows.append({**base, "lam": lam, "spot": x, "lhs": res.lhs, "rhs": res.rhs,
                     "gap": res.gap, "passed": ok})
        checks.append((f"laplace[lam={lam:g}]", ok, 1.0 - res.gap / 1e-3))
    return RunReport("laplace", vars(args), rows, checks)


def cmd_mc(args) -> RunReport:
    m, q = _model(args), _quad(args)
    base, _ = _base(args, m, q)
    t, x = _tau(args, positive=True), _spot(args)
    n, seed = _paths(args, 1000), _seed(args)
    batch = mc_price(m, t, x, n, Rng(seed), workers=args.workers)
    ref = frac_price(m, t, x, q)
    gap = batch.gap_se(ref)
    ok = gap <= 4.0
    rows = [{**base, "tau": t, "spot": x, "value": batch.estimate, "se": batch.se,
             "quadrature": ref, "gap_se": gap, "paths": n, "seed": seed, "passed": ok}]
    return RunReport("mc", vars(args), rows, [("mc within 4 SE", ok, 1.0 - gap / 4.0)],
                     {"seed": seed, "wall_time": batch.elapsed})


def cmd_renewal(args) -> RunReport:
    m, q = _model(args), _quad(args)
    base, _ = _base(args, m, q)
    t, x = _tau(args, positive=True), _spot(args)
    if not t < m.maturity:
        raise UsageError("--tau", f"must be below --maturity {m.maturity}, got {t}")
    if not args.age >= 0.0:
        raise UsageError("--age", f"must be nonnegative, got {args.age}")
    try:
        state = SojournState(t=t, x=x, w=args.age, v=args.offset_v)
    except DomainError as exc:
        raise UsageError("--offset-v", str(exc)) from exc
    value = sojourn_price(state, m, q, args.interp)
    row = {**base, "maturity": m.maturity, "tau": t, "spot": x, "age": args.age,
           "offset_v": args.offset_v, "value": value, "interp": args.interp,
           "mc": math.nan, "se": math.nan, "gap_se": math.nan, "paths": 0, "seed": args.seed}
    checks = []
    if args.paths > 0 and args.age > 0.0:
        seed = _seed(args)
        batch = mc_sojourn_price(state, m, _paths(args, 1000), Rng(seed))
        gap = batch.gap_se(value)
        row.update(mc=batch.estimate, se=batch.se, gap_se=gap, paths=args.paths)
        checks.append(("renewal within 4 SE", gap <= 4.0, 1.0 - gap / 4.0))
    return RunReport("renewal", vars(args), [row], checks, {"renewal_interp": args.interp})


def cmd_selftest(args) -> RunReport:
    from . import acceptance

    if args.quick:
        results = [acceptance.quick_checks()]
    else:
        results = []
        for res in acceptance.run(args.criteria):
            print(res.line(), f"[{res.elapsed:.1f}s]", file=sys.stderr, flush=True)
            results.append(res)
    rows, checks = [], []
    for res in results:
        for c in res.checks:
            rows.append({"criterion": res.number, "check": c.name, "passed": c.passed,
                         "margin": c.margin, "detail": c.detail})
            checks.append((c.name, c.passed, c.margin))
    return RunReport("selftest", vars(args), rows, checks, {"renewal_interp": DEFAULT_INTERPRETATION})


COMMANDS = {
    "price": cmd_price, "surface": cmd_surface, "residual": cmd_residual, "laplace": cmd_laplace,
    "mc": cmd_mc, "renewal": cmd_renewal, "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fracbs", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=float, default=0.75)
    common.add_argument("--strike", type=float, default=1.0)
    common.add_argument("--maturity", type=float, default=1.0)
    common.add_argument("--spot", type=float, default=1.0)
    common.add_argument("--tau", type=float, default=1.0, help="evaluation time t")
    common.add_argument("--hermite", type=int, default=QuadSpec.hermite_nodes)
    common.add_argument("--jacobi", type=int, default=QuadSpec.jacobi_nodes)
    common.add_argument("--seed", type=int, default=20240601)
    common.add_argument("--paths", type=int, default=100_000)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="write the report here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("price", parents=[common], help="fractional price and greeks at one point")
    p = sub.add_parser("surface", parents=[common], help="price table on a (t, x) lattice")
    p.add_argument("--t-nodes", type=_float_list, default=[0.25, 0.5, 1.0, 2.0])
    p.add_argument("--x-nodes", type=_float_list, default=[0.5, 0.8, 1.0, 1.25, 2.0])
    p = sub.add_parser("residual", parents=[common], help="PDE residual of the price")
    p.add_argument("--grid", choices=("default", "custom"), default="default")
    p.add_argument("--t-nodes", type=_float_list, default=list(RESIDUAL_T))
    p.add_argument("--x-nodes", type=_float_list, default=list(RESIDUAL_X))
    p = sub.add_parser("laplace", parents=[common], help="Laplace-transform identity")
    p.add_argument("--lam", type=_float_list, default=[0.5, 1.0, 2.0])
    p = sub.add_parser("mc", parents=[common], help="Monte Carlo price against quadrature")
    p.add_argument("--workers", type=int, default=1)
    p = sub.add_parser("renewal", parents=[common], help="price at a positive sojourn age")
    p.add_argument("--age", type=float, default=0.2)
    p.add_argument("--offset-v", type=float, default=0.0)
    p.add_argument("--interp", choices=("A", "B"), default=DEFAULT_INTERPRETATION)
    p.set_defaults(paths=0)
    p = sub.add_parser("selftest", parents=[common], help="acceptance battery")
    p.add_argument("--quick", action="store_true", help="analytically forced checks only")
    p.add_argument("--criteria", type=lambda s: [int(v) for v in s.split(",")], default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    start = time.perf_counter()
    try:
        report = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"fracbs {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, NumericError) as exc:
        print(f"fracbs {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE if isinstance(exc, DomainError) else EXIT_CHECK
    text = render(report, args.format)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"{args.command}: {len(report.results)} records in {time.perf_counter() - start:.2f}s",
          file=sys.stderr)
    failed = [name for name, ok, _ in report.checks if not ok]
    if failed:
        print(f"{len(failed)} checks failed: " + ", ".join(failed[:8]), file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK
