"""Accuracy sweeps, timing benchmarks and a demonstration GP fit, plus the CLI.

Every experiment writes plain CSV; plotting is left to external tools.
"""

import argparse
import csv
import logging
import math
import statistics
import sys
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .besselk import SeriesConfig, besselk
from .derivs import StepConfig, dbesselk_dnu_cs, dbesselk_dnu_fd
from .errors import (
    DomainError,
    NoConvergence,
    NotPositiveDefinite,
    PoleError,
    RouteDisagreement,
    ValidationError,
)
from .gp import Dataset, nll, nll_grad
from .matern import MaternParams
from .oracle import DEFAULT_PRECISION, OracleCache, dbesselk_dnu_reference
from .unsafe_baselines import dbesselk_dnu_naive

log = logging.getLogger(__name__)

METHODS = ("cs", "fd", "naive")
SWEEP_COLUMNS = ("nu", "x", "method", "value", "reference", "abs_err", "rel_err", "terms_used", "path", "nudged", "status")
BENCH_COLUMNS = ("nu", "x", "method", "median_us", "iqr_us", "repeats", "status")
TRACE_COLUMNS = ("iter", "sigma", "rho", "nu", "nll", "grad_norm", "step")

BENCH_NU = (0.25, 0.56, 0.88, 1.19, 1.5)
BENCH_X = (0.05, 0.505, 1.05, 1.505, 2.05)
SWEEP_X = (3.94, 13.57)
ORACLE_X = (0.05, 0.5, 1.0, 3.94, 8.0, 13.57, 30.0)


def order_grid(count=200, lo=0.1, hi=5.0):
    """Uniform order grid used by the accuracy sweeps."""
    return [float(v) for v in np.linspace(lo, hi, count)]


NUMERICAL_ERRORS = (PoleError, NoConvergence, NotPositiveDefinite, RouteDisagreement, OverflowError, ArithmeticError)


@dataclass
class SweepSpec:
    mode: str
    fixed_value: float
    grid: list
    methods: tuple = ("cs", "fd")
    output_path: str = None

    def __post_init__(self):
        if self.mode not in ("fixed-x", "fixed-nu"):
            raise ValidationError(f"mode must be fixed-x or fixed-nu, got {self.mode!r}")
        if not self.fixed_value > 0:
            raise ValidationError("fixed value must be positive")
        if len(self.grid) == 0:
            raise ValidationError("grid must be nonempty")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ValidationError("grid must be strictly increasing")
        if self.mode == "fixed-nu" and self.grid[0] <= 0:
            raise ValidationError("x grid must be positive")
        if not self.methods:
            raise ValidationError("at least one method is required")
        bad = set(self.methods) - set(METHODS)
        if bad:
            raise ValidationError(f"unknown methods {sorted(bad)}; choose from {METHODS}")

    def points(self):
        if self.mode == "fixed-x":
            return [(float(v), self.fixed_value) for v in self.grid]
        return [(self.fixed_value, float(v)) for v in self.grid]


def parse_grid(text):
    """``start:stop:count`` -> evenly spaced list (count >= 1)."""
    try:
        start, stop, count = text.split(":")
        start, stop, count = float(start), float(stop), int(count)
    except ValueError:
        raise ValidationError(f"grid must look like start:stop:count, got {text!r}") from None
    if count < 1:
        raise ValidationError("grid count must be >= 1")
    return [float(v) for v in np.linspace(start, stop, count)]


def near_half_integer(nu, radius=0.02):
    """True within ``radius`` of any k/2; those orders are excluded from accuracy claims."""
    return abs(2 * nu - round(2 * nu)) < 2 * radius


def _derivative(method, nu, x, step, cfg):
    if method == "cs":
        d, res = dbesselk_dnu_cs(nu, x, step, cfg, full_output=True)
        return d, res.terms_used, res.path.value, res.nudged
    if method == "fd":
        res = besselk(nu, x, cfg)
        return dbesselk_dnu_fd(nu, x, step, cfg), res.terms_used, res.path.value, res.nudged
    return dbesselk_dnu_naive(nu, x), "", "closed-form", False


def run_sweep(spec, step=None, cfg=None, pc=DEFAULT_PRECISION, cache=None):
    """One row per (grid point, method); per-point failures are recorded in ``status``."""
    step = step or StepConfig()
    cfg = cfg or SeriesConfig()
    rows = []
    for nu, x in spec.points():
        try:
            ref = float(dbesselk_dnu_reference(nu, x, pc, cache))
        except NUMERICAL_ERRORS as exc:
            ref = math.nan
            log.warning("oracle failed at nu=%g x=%g: %s", nu, x, exc)
        for method in spec.methods:
            row = dict.fromkeys(SWEEP_COLUMNS, "")
            row.update(nu=nu, x=x, method=method, reference=ref)
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    d, terms, path, nudged = _derivative(method, nu, x, step, cfg)
                abs_err = abs(d - ref)
                row.update(
                    value=d,
                    abs_err=abs_err,
                    rel_err=abs_err / abs(ref) if ref else math.inf,
                    terms_used=terms,
                    path=path,
                    nudged=nudged,
                    status="ok",
                )
            except (DomainError, *NUMERICAL_ERRORS) as exc:
                row["status"] = f"{type(exc).__name__}: {exc}"
            rows.append(row)
    if cache is not None:
        cache.save()
    if spec.output_path:
        write_csv(spec.output_path, SWEEP_COLUMNS, rows)
    return rows


def _time_call(fn, repeats, warmup=10):
    for _ in range(min(warmup, repeats)):
        fn()
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter_ns()
        fn()
        times.append((time.perf_counter_ns() - t0) / 1000.0)
    if len(times) >= 4:
        q = statistics.quantiles(times, n=4)
        iqr = q[2] - q[0]
    else:
        iqr = math.nan
    return statistics.median(times), iqr


def run_bench(nu_grid=BENCH_NU, x_grid=BENCH_X, repeats=200, step=None, cfg=None, output_path=None):
    """Median wall time (microseconds) per derivative, CS vs adaptive FD, single-threaded."""
    step = step or StepConfig()
    cfg = cfg or SeriesConfig()
    fd_step = StepConfig(h_cs=step.h_cs, h_fd=step.h_fd, fd_order="adaptive", h_adaptive=step.h_adaptive)
    status = "ok" if repeats >= 100 else f"warning: unstable timing (repeats={repeats} < 100)"
    if repeats < 100:
        log.warning("repeats=%d < 100: medians are unstable", repeats)
    rows = []
    for nu in nu_grid:
        for x in x_grid:
            for method, fn in (
                ("cs", lambda: dbesselk_dnu_cs(nu, x, step, cfg)),
                ("fd", lambda: dbesselk_dnu_fd(nu, x, fd_step, cfg)),
            ):
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    med, iqr = _time_call(fn, repeats)
                rows.append(dict(nu=nu, x=x, method=method, median_us=med, iqr_us=iqr, repeats=repeats, status=status))
    if output_path:
        write_csv(output_path, BENCH_COLUMNS, rows)
    return rows


@dataclass
class FitResult:
    params: MaternParams
    trace: list = field(default_factory=list)
    converged: bool = False


def gp_fit(data, init, max_iters=50, lr=0.1, step=None, cfg=None, trace_path=None, grad_tol=1e-6):
    """Backtracking gradient descent on ``-2 log L`` over (log sigma, log rho, log nu)."""
    step = step or StepConfig()
    cfg = cfg or SeriesConfig()
    theta = np.log(init.as_tuple())

    def evaluate(th):
        p = MaternParams(*(float(v) for v in np.exp(th)))
        res = nll_grad(p, data, step, cfg)
        return res.value, res.gradient * np.exp(th)

    try:
        value, g = evaluate(theta)
    except NotPositiveDefinite as exc:
        raise NotPositiveDefinite(f"iteration 0 at {init}: {exc}") from None
    trace = []
    converged = False
    t = lr
    for it in range(max_iters + 1):
        gnorm = float(np.linalg.norm(g))
        s, r, n = (float(v) for v in np.exp(theta))
        trace.append(dict(iter=it, sigma=s, rho=r, nu=n, nll=value, grad_norm=gnorm, step=t))
        if gnorm < grad_tol:
            converged = True
            break
        if it == max_iters:
            break
        t = min(lr, 2.0 * t)
        while True:
            cand = theta - t * g
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    v_new, g_new = evaluate(cand)
                ok = v_new <= value - 1e-4 * t * gnorm**2
            except (NotPositiveDefinite, NoConvergence, OverflowError):
                ok = False
            if ok:
                theta, value, g = cand, v_new, g_new
                break
            t *= 0.5
            if t < 1e-12:
                break
        if t < 1e-12:
            log.info("line search failed at iteration %d; stopping", it)
            break
    if trace_path:
        write_csv(trace_path, TRACE_COLUMNS, trace)
    return FitResult(MaternParams(*(float(v) for v in np.exp(theta))), trace, converged)


def write_csv(path, columns, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=columns, extrasaction="ignore")
        w.writeheader()
        for row in rows:
            w.writerow({k: _fmt(row.get(k, "")) for k in columns})


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


def summarize_sweep(rows):
    """Counts behind the accuracy claims, over nudge-free orders only."""
    by_point = {}
    for row in rows:
        if row["status"] != "ok" or near_half_integer(row["nu"]):
            continue
        by_point.setdefault((row["nu"], row["x"]), {})[row["method"]] = row
    out = {"points": len(by_point)}
    both = [p for p in by_point.values() if "cs" in p and "fd" in p]
    if both:
        out["cs_le_fd"] = sum(p["cs"]["abs_err"] <= p["fd"]["abs_err"] for p in both) / len(both)
    cs = [p["cs"] for p in by_point.values() if "cs" in p]
    if cs:
        out["cs_max_rel_err"] = max(r["rel_err"] for r in cs)
        out["cs_max_abs_err"] = max(r["abs_err"] for r in cs)
        out["cs_paths"] = sorted({r["path"] for r in cs})
    return out


# --------------------------------------------------------------------- CLI


def _floats(text, n):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise ValidationError(f"expected {n} comma-separated numbers, got {text!r}") from None
    if len(vals) != n:
        raise ValidationError(f"expected {n} comma-separated numbers, got {text!r}")
    return vals


def _cfg(args):
    kw = {}
    if getattr(args, "tol", None) is not None:
        kw["tol"] = args.tol
    if getattr(args, "threshold", None) is not None:
        kw["dispatch_threshold"] = args.threshold
    if getattr(args, "large_method", None):
        kw["large_method"] = args.large_method
    return SeriesConfig(**kw)


def cmd_eval(args):
    res = besselk(args.nu, args.x, _cfg(args))
    print(f"value {res.value.real!r}")
    print(f"path {res.path.value}")
    print(f"terms {res.terms_used}")
    if res.nudged:
        print(f"nudged nu_used={res.nu_used.real!r}")


def cmd_deriv(args):
    cfg = _cfg(args)
    if args.method == "cs":
        step = StepConfig(h_cs=args.h) if args.h else StepConfig()
        print(repr(dbesselk_dnu_cs(args.nu, args.x, step, cfg)))
    elif args.method == "fd":
        step = StepConfig(h_fd=args.h) if args.h else StepConfig()
        print(repr(dbesselk_dnu_fd(args.nu, args.x, step, cfg)))
    else:
        print(repr(dbesselk_dnu_naive(args.nu, args.x)))


def cmd_sweep(args):
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    spec = SweepSpec(args.mode, args.fixed, parse_grid(args.grid), methods, args.out)
    cache = OracleCache(args.oracle_cache) if args.oracle_cache else OracleCache()
    rows = run_sweep(spec, cfg=_cfg(args), cache=cache)
    summary = summarize_sweep(rows)
    for k, v in summary.items():
        print(f"{k} {v}")
    if "large-kummer" not in summary.get("cs_paths", []) and any(x > 10 for _, x in spec.points()):
        print("note: points with x > 10 use the continued-fraction evaluation of U, not the Kummer-M combination")


def cmd_bench(args):
    rows = run_bench(repeats=args.repeats, cfg=_cfg(args), output_path=args.out)
    faster = 0
    total = 0
    for i in range(0, len(rows), 2):
        cs, fd = rows[i], rows[i + 1]
        total += 1
        faster += cs["median_us"] < fd["median_us"]
    print(f"cs faster at {faster}/{total} grid points")


def cmd_gp_grad(args):
    data = Dataset.from_csv(args.data)
    p = MaternParams(args.sigma, args.rho, args.nu)
    res = nll_grad(p, data, cfg=_cfg(args))
    print(f"nll {res.value!r}")
    print("grad " + " ".join(repr(float(g)) for g in res.gradient))
    if res.chol_jitter_used:
        print(f"jitter {res.chol_jitter_used!r}")


def cmd_gp_fit(args):
    data = Dataset.from_csv(args.data)
    init = MaternParams(*_floats(args.init, 3))
    fit = gp_fit(data, init, args.iters, args.lr, cfg=_cfg(args), trace_path=args.trace)
    p = fit.params
    print(f"sigma {p.sigma!r}")
    print(f"rho {p.rho!r}")
    print(f"nu {p.nu!r}")
    print(f"nll {fit.trace[-1]['nll']!r}")
    print(f"iterations {fit.trace[-1]['iter']} converged {fit.converged}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser():
    ap = _Parser(prog="maternk", description="Complex-order Bessel K, its order derivative, and Matérn GP likelihoods.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def engine_opts(p):
        p.add_argument("--tol", type=float)
        p.add_argument("--threshold", type=float, help="small/large dispatch threshold on |x|")
        p.add_argument("--large-method", choices=("cf", "kummer"))

    p = sub.add_parser("eval", help="evaluate K_nu(x)")
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--x", type=float, required=True)
    engine_opts(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("deriv", help="dK_nu(x)/dnu")
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--method", choices=METHODS, default="cs")
    p.add_argument("--h", type=float)
    engine_opts(p)
    p.set_defaults(func=cmd_deriv)

    p = sub.add_parser("sweep", help="accuracy sweep against the multi-precision oracle")
    p.add_argument("--mode", choices=("fixed-x", "fixed-nu"), required=True)
    p.add_argument("--fixed", type=float, required=True)
    p.add_argument("--grid", required=True, help="start:stop:count")
    p.add_argument("--methods", default="cs,fd")
    p.add_argument("--out", required=True)
    p.add_argument("--oracle-cache", help="CSV memo for oracle values")
    engine_opts(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bench", help="timing of CS vs adaptive FD on the 5x5 grid")
    p.add_argument("--out", required=True)
    p.add_argument("--repeats", type=int, default=200)
    engine_opts(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gp-grad", help="-2 log-likelihood and gradient over (sigma, rho, nu)")
    p.add_argument("--data", required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--nu", type=float, required=True)
    engine_opts(p)
    p.set_defaults(func=cmd_gp_grad)

    p = sub.add_parser("gp-fit", help="demonstration gradient-descent fit")
    p.add_argument("--data", required=True)
    p.add_argument("--init", required=True, help="sigma,rho,nu")
    p.add_argument("--iters", type=int, default=50)
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--trace", required=True)
    engine_opts(p)
    p.set_defaults(func=cmd_gp_fit)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except (ValidationError, DomainError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
