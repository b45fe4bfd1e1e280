"""Command-line front end.

Exit codes: 0 success, 2 usage or domain error, 3 numerical failure
(optimizer non-convergence, overflow).
"""
from __future__ import annotations

import argparse
import sys

from . import distribution as dist
from . import moments
from .errors import ConvergenceError, DomainError
from .estimators import ESTIMATORS, fit
from .report import format_records, write_csv
from .simulation import AGGREGATES, StudyConfig, parse_grid, run_study

EXIT_USAGE = 2
EXIT_NUMERIC = 3


class InputError(Exception):
    pass


def _fmt(v: float) -> str:
    return repr(float(v))


def read_observations(path: str) -> list:
    """One value per line; blank lines and ``#`` comments are skipped."""
    values = []
    try:
        fh = open(path)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    with fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.split("#", 1)[0].strip()
            if not text:
                continue
            try:
                v = float(text)
            except ValueError:
                raise InputError(f"{path}:{lineno}: not a number: {text!r}") from None
            if not 0.0 < v < 1.0:
                raise InputError(f"{path}:{lineno}: value {text} is outside (0, 1)")
            values.append(v)
    if not values:
        raise InputError(f"{path}: no observations")
    return values


def cmd_fit(args) -> int:
    values = read_observations(args.input)
    fitted = fit(args.estimator, values)
    print(f"estimator: {args.estimator}")
    print(f"n: {len(values)}")
    if args.estimator == "umvue":
        print(f"t: {_fmt(fitted.t)}")
    else:
        print(f"alpha_hat: {_fmt(fitted.alpha_hat)}")
    if args.at is not None:
        print(f"pdf({_fmt(args.at)}): {_fmt(fitted.pdf(args.at))}")
        print(f"cdf({_fmt(args.at)}): {_fmt(fitted.cdf(args.at))}")
    return 0


def cmd_eval(args) -> int:
    f = dist.pdf(args.x, args.alpha)
    F = dist.cdf(args.x, args.alpha)
    print(f"alpha: {_fmt(args.alpha)}")
    print(f"x: {_fmt(args.x)}")
    print(f"pdf: {_fmt(f)}")
    print(f"cdf: {_fmt(F)}")
    print(f"quantile(cdf): {_fmt(dist.quantile(F, args.alpha))}")
    return 0


def cmd_mse_analytic(args) -> int:
    n, a, x = args.n, args.alpha, args.x
    if args.estimator == "umvue" and n < 3:
        raise DomainError(f"UMVUE needs n >= 3, got {n}")
    print(f"estimator: {args.estimator}")
    print(f"n: {n}")
    print(f"alpha: {_fmt(a)}")
    print(f"x: {_fmt(x)}")
    if args.estimator == "mle":
        print(f"pdf_mse: {_fmt(moments.mle_pdf_mse(n, a, x))}")
        print(f"cdf_mse: {_fmt(moments.mle_cdf_mse(n, a, x))}")
        print("method: bessel")
        return 0
    for target, fn, true in (
        ("pdf", moments.umvue_pdf_second_moment, dist.pdf(x, a)),
        ("cdf", moments.umvue_cdf_second_moment, dist.cdf(x, a)),
    ):
        sm = fn(n, a, x)
        print(f"{target}_mse: {_fmt(max(sm.quadrature - true * true, 0.0))}")
        series = "nan" if sm.series is None else _fmt(sm.series)
        print(f"{target}_second_moment_quadrature: {_fmt(sm.quadrature)}")
        print(f"{target}_second_moment_series: {series}")
        print(f"{target}_series_rel_diff: {sm.rel_diff:.3g}")
        print(f"{target}_series_reliable: {'yes' if sm.series_reliable else 'no'}")
    print("method: quadrature (series cross-check)")
    return 0


def cmd_sim(args) -> int:
    config = StudyConfig(
        alphas=args.alpha,
        sizes=args.n,
        reps=args.reps,
        seed=args.seed,
        estimators=args.estimators,
        grid=args.grid,
        aggregate=args.aggregate,
    )
    records = run_study(config, workers=args.workers)
    for r in records:
        if r.flagged:
            print(
                f"warning: {r.estimator} n={r.n} alpha={r.alpha:g}: "
                f"{r.failures}/{r.reps} replicates failed to fit",
                file=sys.stderr,
            )
    if args.out:
        write_csv(records, args.out)
    else:
        sys.stdout.write(format_records(records))
    return 0


def _float_list(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> tuple:
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _estimator_list(text: str) -> tuple:
    kinds = tuple(v.strip().lower() for v in text.split(","))
    bad = [k for k in kinds if k not in ESTIMATORS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown estimator(s) {bad}; choose from {ESTIMATORS}")
    return kinds


def _grid(text: str) -> tuple:
    try:
        return parse_grid(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="topp-leone",
        description="Topp-Leone PDF/CDF estimation: fitting, exact MSEs and simulation.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("fit", help="fit an estimator to a data file")
    f.add_argument("input", help="text file, one observation in (0, 1) per line")
    f.add_argument("--estimator", "-e", choices=ESTIMATORS, default="mle")
    f.add_argument("--at", type=float, help="also print the fitted pdf/cdf at this x")
    f.set_defaults(func=cmd_fit)

    e = sub.add_parser("eval", help="evaluate pdf, cdf and quantile")
    e.add_argument("--alpha", type=float, required=True)
    e.add_argument("--x", type=float, required=True)
    e.set_defaults(func=cmd_eval)

    m = sub.add_parser("mse-analytic", help="exact MSEs of the MLE or UMVUE curves")
    m.add_argument("--estimator", "-e", choices=("mle", "umvue"), default="mle")
    m.add_argument("--n", type=int, required=True)
    m.add_argument("--alpha", type=float, required=True)
    m.add_argument("--x", type=float, required=True)
    m.set_defaults(func=cmd_mse_analytic)

    s = sub.add_parser("sim", help="run the Monte Carlo MSE study and write CSV")
    s.add_argument("--alpha", type=_float_list, default=(0.5, 1.0, 2.0, 3.0))
    s.add_argument("--n", type=_int_list, default=(10, 20, 50, 100))
    s.add_argument("--reps", type=int, default=1000)
    s.add_argument("--seed", type=int, default=42)
    s.add_argument("--estimators", type=_estimator_list, default=ESTIMATORS)
    s.add_argument("--grid", type=_grid, default=parse_grid("0.05:0.95:19"), metavar="LO:HI:COUNT")
    s.add_argument("--aggregate", choices=AGGREGATES, default="mean")
    s.add_argument("--workers", type=int, default=1, help="threads for replicate chunks")
    s.add_argument("--out", "-o", help="CSV path (default: stdout)")
    s.set_defaults(func=cmd_sim)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OverflowError as exc:
        print(f"overflow: {exc}", file=sys.stderr)
        print("hint: the Bessel argument vanishes as x -> 1; move x away from 1", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
