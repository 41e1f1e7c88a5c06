"""Command-line interface: ``wpcurv <subcommand> [options]``.

Exit codes: 0 on success, 2 on argument/domain errors, 3 on accuracy or
convergence failures.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import beltrami, curvature, resolvent
from .disk import build_grid
from .errors import AccuracyError, ConfigurationError, DomainError, NumericalError
from .report import ResultRecord, resolve_config, write_atomic

EXIT_OK, EXIT_USAGE, EXIT_ACCURACY = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _common(p):
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--radial-count", type=int)
    p.add_argument("--angular-order", type=int)
    p.add_argument("--solver-tol", type=float)
    p.add_argument("--report-rtol", type=float)
    p.add_argument("--backend", choices=resolvent.BACKENDS)
    p.add_argument("--cache-dir")
    p.add_argument("--output", choices=("csv", "json"))
    p.add_argument("--out", help="write here instead of stdout")


def build_parser():
    parser = _Parser(prog="wpcurv", description="Weil-Petersson curvature on the universal Teichmueller space")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("holo", help="holomorphic sectional curvatures s_n")
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=40)

    p = sub.add_parser("sect", help="sectional curvatures K_{m,n}, m < n")
    p.add_argument("--min-index", type=int, default=2)
    p.add_argument("--max-index", type=int, default=12)

    p = sub.add_parser("riemann", help="Riemann tensor entries")
    p.add_argument("--indices", type=int, nargs=4, metavar=("A", "B", "L", "D"))
    p.add_argument("--scan-max", type=int, default=8, help="scan all indices 2..SCAN_MAX")

    p = sub.add_parser("ricci", help="truncated Ricci partial sums")
    p.add_argument("--alpha", type=int, default=2)
    p.add_argument("--cutoff", type=int, default=64)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("bounds", help="thick-part curvature bounds for moduli space")
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--inj-radius", type=float, required=True)

    p = sub.add_parser("supnorm", help="sup-norms of basis elements")
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=20)

    p = sub.add_parser("const-c", help="the constant C(r) on a log-spaced sweep")
    p.add_argument("--r-min", type=float, default=1e-3)
    p.add_argument("--r-max", type=float, default=20.0)
    p.add_argument("--count", type=int, default=50)

    sub.add_parser("resolvent-selftest", help="G(1) = 1, manufactured solutions, backend agreement")

    p = sub.add_parser("lemma1", help="positivity/mass/Cauchy-Schwarz checks for G")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("kernel-lambda", help="projection-kernel diagonal sup and reproducing checks")
    p.add_argument("--truncations", type=int, nargs="+", default=[4, 16, 64])

    for p in sub.choices.values():
        _common(p)
    return parser


def _context(cfg):
    cache = resolvent.SolveCache(cfg.cache_dir or None, namespace=cfg.digest)
    return curvature.CurvatureContext(cfg.radial_count, cfg.angular_order, cfg.backend, cfg.solver_tol, cache)


def _row(index, value, est_error, **extra):
    return {"index": index, "value": value, "est_error": est_error, **extra}


class _CheckFailed(Exception):
    def __init__(self, message, rows):
        super().__init__(message)
        self.rows = rows


def cmd_holo(args, cfg):
    if args.n_min < 2 or args.n_max < args.n_min:
        raise DomainError("holo needs 2 <= n-min <= n-max (n >= 2 required)")
    ctx = _context(cfg)
    return [curvature.holo_sectional(n, ctx) for n in range(args.n_min, args.n_max + 1)]


def cmd_sect(args, cfg):
    if args.min_index < 2 or args.max_index <= args.min_index:
        raise DomainError("sect needs 2 <= min-index < max-index")
    ctx = _context(cfg)
    idx = range(args.min_index, args.max_index + 1)
    return [curvature.sectional(m, n, ctx) for m in idx for n in idx if m < n]


def cmd_riemann(args, cfg):
    ctx = _context(cfg)
    if args.indices:
        return [curvature.riemann_entry(*args.indices, ctx=ctx)]
    if args.scan_max < 2:
        raise DomainError("scan-max must be >= 2")
    r = range(2, args.scan_max + 1)
    return [curvature.riemann_entry(a, b, l, d, ctx) for a in r for b in r for l in r for d in r]


def cmd_ricci(args, cfg):
    res = curvature.ricci_partial(args.alpha, args.cutoff, _context(cfg), workers=args.workers)
    rows = res.reports()
    rows.append(_row("aitken", res.extrapolated, abs(res.extrapolated - res.value),
                     quantity="ricci_extrapolated", target=curvature.EINSTEIN_CONSTANT))
    return rows


def cmd_bounds(args, cfg):
    b = curvature.thick_part_bounds(args.genus, args.inj_radius)
    # closed-form values: no discretization error
    return [{**b.as_dict(), "est_error": 0.0}]


def cmd_supnorm(args, cfg):
    if args.n_min < 2 or args.n_max < args.n_min:
        raise DomainError("supnorm needs 2 <= n-min <= n-max")
    rows = []
    for n in range(args.n_min, args.n_max + 1):
        exact = beltrami.sup_norm_exact(n)
        num = beltrami.sup_norm_numeric(beltrami.basis_element(n))
        rows.append(_row(n, num.value, abs(num.value - exact), exact=exact, radius=num.radius,
                         exact_radius=math.sqrt((n - 2) / (n + 2))))
    return rows


def cmd_const_c(args, cfg):
    if not (0 < args.r_min < args.r_max) or args.count < 2:
        raise DomainError("const-c needs 0 < r-min < r-max and count >= 2")
    rs = np.geomspace(args.r_min, args.r_max, args.count)
    return [_row(float(r), beltrami.thick_part_constant(r).value, 0.0) for r in rs]


def _selftest_rows(cfg):
    grid = build_grid(cfg.radial_count, cfg.angular_order)
    op = resolvent.ResolventOperator(grid, "mode_bvp", cfg.solver_tol)
    rows = []

    err = float(np.max(np.abs(op.apply(resolvent.GridFunction.constant(grid)).on_grid() - 1.0)))
    rows.append(_row("G(1)=1", err, cfg.solver_tol, passed=err < 1e-8))

    # h = e^{ik theta} u^|k| phi(u^2) with polynomial phi; f = 2(Delta + 1/2) h exactly
    T = np.polynomial.Polynomial([0, 1])
    S = 1 - T
    cases = {
        "manufactured_mode0": (0, S**2),
        "manufactured_mode1": (1, S**2 * (1 + T)),
        "manufactured_mode2": (2, S**3 * (2 - T)),
    }
    for name, (k, phi) in cases.items():
        F = phi - S**2 / 2 * (T * phi.deriv(2) + (k + 1) * phi.deriv(1))
        modes_f = {k: F(grid.t)}
        modes_h = {k: phi(grid.t)}
        if k:
            modes_f[-k], modes_h[-k] = modes_f[k], modes_h[k]
        f = resolvent.GridFunction.from_reduced(grid, modes_f)
        h = resolvent.GridFunction.from_reduced(grid, modes_h)
        back = op.apply(f).on_grid()
        ref = h.on_grid()
        rel = float(np.max(np.abs(back - ref)) / np.max(np.abs(ref)))
        rows.append(_row(name, rel, cfg.solver_tol, passed=rel < 1e-6))

    kop = resolvent.ResolventOperator(grid, "kernel_convolution", cfg.solver_tol)
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(3):
        f = resolvent.random_band_limited(grid, rng)
        a, b = op.apply(f).on_grid(), kop.apply(f).on_grid()
        worst = max(worst, float(np.max(np.abs(a - b)) / np.max(np.abs(a))))
    rows.append(_row("backend_agreement", worst, cfg.solver_tol, passed=worst < cfg.report_rtol))

    failed = [r["index"] for r in rows if not r["passed"]]
    return rows, failed


def cmd_resolvent_selftest(args, cfg):
    rows, failed = _selftest_rows(cfg)
    if failed:
        raise _CheckFailed(f"resolvent self-test failed: {', '.join(failed)}", rows)
    return rows


def cmd_lemma1(args, cfg):
    grid = build_grid(cfg.radial_count, cfg.angular_order)
    op = resolvent.ResolventOperator(grid, cfg.backend, cfg.solver_tol)
    rng = np.random.default_rng(args.seed)
    worst = {"A": math.inf, "B": 0.0, "C": math.inf, "D": -math.inf}
    fails = {k: 0 for k in worst}
    for _ in range(args.samples):
        f = resolvent.random_band_limited(grid, rng)
        g = resolvent.random_band_limited(grid, rng)
        rep = resolvent.lemma1_suite(op, f, g)
        for name in "ABCD":
            value, ok = getattr(rep, name)
            pick = max if name in "BD" else min
            worst[name] = pick(worst[name], value)
            fails[name] += not ok
    rows = [_row(name, worst[name], cfg.solver_tol, failures=fails[name], samples=args.samples)
            for name in "ABCD"]
    if any(fails.values()):
        raise _CheckFailed("positivity checks failed", rows)
    return rows


def cmd_kernel_lambda(args, cfg):
    grid = build_grid(cfg.radial_count, cfg.angular_order)
    rows = []
    for N in args.truncations:
        P = beltrami.ProjectionKernel(N)
        lam = beltrami.lambda_sup(P)
        worst = 0.0
        for z in (0j, 0.3 + 0j, 0.6j):
            ref = beltrami.projection_kernel_eval(P, z, z).real
            projection = beltrami.projection_reproduce(P, z, grid)
            worst = max(worst, abs(projection - ref) / ref)
        rows.append(_row(N, lam, abs(lam - 3 / (4 * math.pi)) if lam > 3 / (4 * math.pi) else 0.0,
                         bound=3 / (4 * math.pi), reproduce_rel_err=worst))
    return rows


COMMANDS = {
    "holo": cmd_holo,
    "sect": cmd_sect,
    "riemann": cmd_riemann,
    "ricci": cmd_ricci,
    "bounds": cmd_bounds,
    "supnorm": cmd_supnorm,
    "const-c": cmd_const_c,
    "resolvent-selftest": cmd_resolvent_selftest,
    "lemma1": cmd_lemma1,
    "kernel-lambda": cmd_kernel_lambda,
}

_NON_PARAMS = {"command", "config", "radial_count", "angular_order", "solver_tol", "report_rtol",
               "backend", "cache_dir", "output", "out"}


def _emit(record, args, stdout):
    text = record.render()
    if args.out:
        write_atomic(args.out, text)
    else:
        stdout.write(text)


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = resolve_config(args.config, {
            "radial_count": args.radial_count,
            "angular_order": args.angular_order,
            "solver_tol": args.solver_tol,
            "report_rtol": args.report_rtol,
            "backend": args.backend,
            "cache_dir": args.cache_dir,
            "output": args.output,
        })
        params = {k: v for k, v in vars(args).items() if k not in _NON_PARAMS}
        values = COMMANDS[args.command](args, cfg)
    except _UsageError as exc:
        print(f"wpcurv: error: {exc}", file=stderr)
        return EXIT_USAGE
    except (DomainError, ConfigurationError) as exc:
        print(f"wpcurv: error: {exc}", file=stderr)
        return EXIT_USAGE
    except _CheckFailed as exc:
        print(f"wpcurv: check failed: {exc}", file=stderr)
        for row in exc.rows:
            print(f"  {row}", file=stderr)
        return EXIT_ACCURACY
    except (AccuracyError, NumericalError) as exc:
        print(f"wpcurv: numerical failure: {exc}", file=stderr)
        for k, v in getattr(exc, "diagnostics", {}).items():
            print(f"  {k} = {v}", file=stderr)
        return EXIT_ACCURACY
    record = ResultRecord(args.command, params, values, cfg)
    _emit(record, args, stdout)
    return EXIT_OK


def main():
    sys.exit(run())
